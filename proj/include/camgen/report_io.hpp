// Copyright 2026 The camgen authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Validation report serialization.
//
// Text format: one `key<TAB>value` line per metric. Correlation keys carry
// the trace section and the lag, e.g. `reference.autocorr_size.3`. Infinite
// KL prints as `inf`.
//
// JSON format: a `summary` object plus a flat `metrics` array of
// {"metric", "trace", "lag", "value"} records (trace/lag only where they
// apply). Infinite values serialize as the string "inf".

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "camgen/error.hpp"
#include "camgen/metrics.hpp"
#include "camgen/model_io.hpp"

namespace camgen {

namespace detail {

inline std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_g9(v);
}

inline nlohmann::json json_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::string log_base_name(double base) {
  if (base == std::numbers::e) return "e";
  return format_g9(base);
}

}  // namespace detail

inline void write_report_text(const ValidationReport& report, std::ostream& out) {
  out << "schema\tcam-validation/1\n";
  out << "mode\t" << to_string(report.mode) << '\n';
  out << "m\t" << report.order << '\n';
  out << "kl_divergence\t" << detail::format_metric(report.kl) << '\n';
  out << "kl_log_base\t" << detail::log_base_name(report.kl_log_base) << '\n';
  out << "kl_smoothing\t" << detail::format_g9(report.kl_smoothing) << '\n';
  out << "total_variation\t" << detail::format_metric(report.tv) << '\n';
  out << "max_lag\t" << report.max_lag << '\n';
  auto section = [&](const char* name, const TraceStats& st) {
    out << name << ".events\t" << st.events << '\n';
    out << name << ".symbols\t" << st.symbols << '\n';
    if (!std::isnan(st.jitter_std_ms))
      out << name << ".jitter_std_ms\t" << detail::format_g9(st.jitter_std_ms) << '\n';
    for (std::size_t k = 0; k < st.autocorr_size.size(); ++k)
      out << name << ".autocorr_size." << k << '\t'
          << detail::format_g9(st.autocorr_size[k]) << '\n';
    for (std::size_t k = 0; k < st.autocorr_interval.size(); ++k)
      out << name << ".autocorr_interval." << k << '\t'
          << detail::format_g9(st.autocorr_interval[k]) << '\n';
    for (std::size_t k = 0; k < st.crosscorr.size(); ++k) {
      const int lag = static_cast<int>(k) - report.max_lag;
      out << name << ".crosscorr." << lag << '\t' << detail::format_g9(st.crosscorr[k])
          << '\n';
    }
  };
  section("reference", report.reference);
  section("generated", report.generated);
  if (!out) throw Error("report write failed");
}

inline void write_report_json(const ValidationReport& report, std::ostream& out) {
  nlohmann::json j;
  j["schema"] = "cam-validation/1";
  j["summary"] = {
      {"mode", to_string(report.mode)},
      {"m", report.order},
      {"kl_divergence", detail::json_metric(report.kl)},
      {"kl_log_base", detail::log_base_name(report.kl_log_base)},
      {"kl_smoothing", report.kl_smoothing},
      {"total_variation", detail::json_metric(report.tv)},
      {"max_lag", report.max_lag},
  };
  nlohmann::json metrics = nlohmann::json::array();
  auto push = [&](const char* metric, const char* trace, int lag, double v,
                  bool with_lag) {
    nlohmann::json rec;
    rec["metric"] = metric;
    if (trace != nullptr) rec["trace"] = trace;
    if (with_lag) rec["lag"] = lag;
    rec["value"] = detail::json_metric(v);
    metrics.push_back(std::move(rec));
  };
  push("kl_divergence", nullptr, 0, report.kl, false);
  push("total_variation", nullptr, 0, report.tv, false);
  auto section = [&](const char* name, const TraceStats& st) {
    metrics.push_back({{"metric", "events"}, {"trace", name}, {"value", st.events}});
    metrics.push_back({{"metric", "symbols"}, {"trace", name}, {"value", st.symbols}});
    if (!std::isnan(st.jitter_std_ms))
      push("jitter_std_ms", name, 0, st.jitter_std_ms, false);
    for (std::size_t k = 0; k < st.autocorr_size.size(); ++k)
      push("autocorr_size", name, static_cast<int>(k), st.autocorr_size[k], true);
    for (std::size_t k = 0; k < st.autocorr_interval.size(); ++k)
      push("autocorr_interval", name, static_cast<int>(k), st.autocorr_interval[k], true);
    for (std::size_t k = 0; k < st.crosscorr.size(); ++k)
      push("crosscorr", name, static_cast<int>(k) - report.max_lag, st.crosscorr[k],
           true);
  };
  section("reference", report.reference);
  section("generated", report.generated);
  j["metrics"] = std::move(metrics);
  out << j.dump(2) << '\n';
  if (!out) throw Error("report write failed");
}

inline void write_report_files(const ValidationReport& report, const std::string& path) {
  {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    write_report_text(report, f);
  }
  {
    std::ofstream f(path + ".json", std::ios::binary);
    if (!f) throw Error("cannot open '" + path + ".json' for writing");
    write_report_json(report, f);
  }
}

}  // namespace camgen
