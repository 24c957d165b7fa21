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

// Model file format (UTF-8, LF, "cam-model v1"):
//
//   # cam-model v1
//   mode=complete|size|interval
//   m=<order>
//   S=<comma list, bytes>          (modes with sizes)
//   G=<comma list, ms>             (modes with intervals)
//   jitter_std_ms=<sigma>          (modes with intervals)
//   label=<free text>              (optional)
//   [initial]
//   <m context symbols> <probability>
//   [transitions]
//   <m context symbols> <next symbol> <probability>
//
// Context symbols are 1-based and ordered oldest first. Rows are written in
// lexicographic order (context, then next symbol); probabilities carry 9
// significant digits. On load, each context whose probabilities sum outside
// 1 +/- 1e-3 is rejected; sums within the tolerance are re-normalized unless
// they are already within 1e-8 of 1, which keeps write->parse->write
// byte-identical.

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/model.hpp"

namespace camgen {

inline constexpr std::string_view kModelMagic = "# cam-model v1";

namespace detail {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string join_csv(const std::vector<int>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

inline std::vector<int> parse_int_csv(std::string_view text, const std::string& what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string_view field =
        text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    try {
      std::size_t used = 0;
      int v = std::stoi(std::string(field), &used);
      if (used != field.size()) throw std::invalid_argument("trailing");
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(what + ": bad integer '" + std::string(field) + "'");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (in >> f) fields.push_back(std::move(f));
  return fields;
}

inline double parse_prob(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error("model line " + std::to_string(line_no) + ": bad probability '" +
                field + "'");
  }
}

inline Symbol parse_symbol(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    long v = std::stol(field, &used);
    if (used != field.size() || v < 1) throw std::invalid_argument("range");
    return static_cast<Symbol>(v);
  } catch (const std::exception&) {
    throw Error("model line " + std::to_string(line_no) + ": bad symbol '" + field + "'");
  }
}

}  // namespace detail

inline void write_model(const Model& model, std::ostream& out) {
  model.validate();
  const ModelSpec& spec = model.spec;
  out << kModelMagic << '\n';
  out << "mode=" << to_string(spec.mode) << '\n';
  out << "m=" << spec.order << '\n';
  if (spec.models_sizes()) out << "S=" << detail::join_csv(spec.sizes.bytes()) << '\n';
  if (spec.models_intervals()) {
    out << "G=" << detail::join_csv(spec.intervals.ms()) << '\n';
    out << "jitter_std_ms=" << detail::format_g9(spec.jitter_std_ms) << '\n';
  }
  if (!model.label.empty()) out << "label=" << model.label << '\n';
  out << "[initial]\n";
  for (const auto& e : model.initial.entries()) {
    for (Symbol s : e.context) out << s << ' ';
    out << detail::format_g9(e.prob) << '\n';
  }
  out << "[transitions]\n";
  for (const Context* ctx : model.transitions.sorted_contexts()) {
    const TransitionTable::Row& row = *model.transitions.row(*ctx);
    for (const auto& e : row) {
      for (Symbol s : *ctx) out << s << ' ';
      out << e.next << ' ' << detail::format_g9(e.prob) << '\n';
    }
  }
  if (!out) throw Error("model write failed");
}

inline void write_model_file(const Model& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_model(model, f);
}

inline Model read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw Error("empty model file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kModelMagic)
    throw Error("not a cam-model file (expected '" + std::string(kModelMagic) + "')");

  std::optional<ModelMode> mode;
  std::optional<int> order;
  std::optional<std::vector<int>> s_list, g_list;
  double jitter = 0.0;
  bool have_jitter = false;
  std::string label;

  // Header keys until the [initial] section.
  bool in_initial = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "[initial]") {
      in_initial = true;
      break;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("model line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "mode") {
      mode = mode_from_string(value);
    } else if (key == "m") {
      order = static_cast<int>(detail::parse_symbol(value, line_no));
    } else if (key == "label") {
      label = value;
    } else if (key == "S") {
      s_list = detail::parse_int_csv(value, "S");
    } else if (key == "G") {
      g_list = detail::parse_int_csv(value, "G");
    } else if (key == "jitter_std_ms") {
      jitter = detail::parse_prob(value, line_no);
      have_jitter = true;
    } else {
      throw Error("model line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!in_initial) throw Error("model file has no [initial] section");
  if (!mode) throw Error("model file missing 'mode'");
  if (!order) throw Error("model file missing 'm'");
  if (jitter < 0.0) throw Error("jitter_std_ms must be >= 0");

  ModelSpec spec;
  switch (*mode) {
    case ModelMode::Complete:
      if (!s_list) throw Error("complete model missing 'S'");
      if (!g_list) throw Error("complete model missing 'G'");
      spec = ModelSpec::complete(SizeSet::of(*s_list), IntervalSet::of(*g_list), *order,
                                 jitter);
      break;
    case ModelMode::SizeOnly:
      if (!s_list) throw Error("size model missing 'S'");
      if (g_list) throw Error("size model must not define 'G'");
      if (have_jitter) throw Error("size model must not define 'jitter_std_ms'");
      spec = ModelSpec::size_only(SizeSet::of(*s_list), *order);
      break;
    case ModelMode::IntervalOnly:
      if (!g_list) throw Error("interval model missing 'G'");
      if (s_list) throw Error("interval model must not define 'S'");
      spec = ModelSpec::interval_only(IntervalSet::of(*g_list), *order, jitter);
      break;
  }

  const std::size_t m = static_cast<std::size_t>(*order);
  std::vector<InitialDistribution::Entry> initial_entries;
  bool in_transitions = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "[transitions]") {
      in_transitions = true;
      break;
    }
    auto fields = detail::split_fields(line);
    if (fields.size() != m + 1)
      throw Error("model line " + std::to_string(line_no) + ": expected " +
                  std::to_string(m + 1) + " fields in [initial] row");
    InitialDistribution::Entry e;
    e.context.reserve(m);
    for (std::size_t k = 0; k < m; ++k)
      e.context.push_back(detail::parse_symbol(fields[k], line_no));
    e.prob = detail::parse_prob(fields[m], line_no);
    initial_entries.push_back(std::move(e));
  }
  if (!in_transitions) throw Error("model file has no [transitions] section");

  // Transition rows grouped per context, then normalized per row.
  struct PendingRow {
    Context context;
    TransitionTable::Row entries;
  };
  std::vector<PendingRow> pending;
  std::unordered_map<Context, std::size_t, ContextHash> pending_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != m + 2)
      throw Error("model line " + std::to_string(line_no) + ": expected " +
                  std::to_string(m + 2) + " fields in [transitions] row");
    Context ctx;
    ctx.reserve(m);
    for (std::size_t k = 0; k < m; ++k)
      ctx.push_back(detail::parse_symbol(fields[k], line_no));
    TransitionTable::Entry entry;
    entry.next = detail::parse_symbol(fields[m], line_no);
    entry.prob = detail::parse_prob(fields[m + 1], line_no);
    auto [it, inserted] = pending_index.try_emplace(ctx, pending.size());
    if (inserted) pending.push_back({std::move(ctx), {}});
    pending[it->second].entries.push_back(entry);
  }

  Model model;
  model.spec = spec;
  model.label = label;
  if (initial_entries.empty()) throw Error("model file [initial] section is empty");
  model.initial =
      InitialDistribution::from_entries(std::move(initial_entries), kFileRowTolerance);
  if (pending.empty()) throw Error("model file [transitions] section is empty");
  for (auto& row : pending) {
    model.transitions.set_row(row.context, std::move(row.entries), kFileRowTolerance);
  }
  model.validate();
  return model;
}

inline Model read_model_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open model file '" + path + "'");
  try {
    return read_model(f);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Import adapter for header-less plain-text matrices: whitespace rows of
/// m+2 columns (m context symbols, next symbol, probability), with the
/// alphabet supplied out of band via `spec`. Zero-probability entries are
/// skipped. Rows of m+1 columns from `initial` seed the context
/// distribution; without one, contexts are weighted uniformly.
inline Model import_plain_matrix(std::istream& transitions, std::istream* initial,
                                 const ModelSpec& spec, std::string label = "") {
  spec.validate();
  const std::size_t m = static_cast<std::size_t>(spec.order);

  struct PendingRow {
    Context context;
    TransitionTable::Row entries;
  };
  std::vector<PendingRow> pending;
  std::unordered_map<Context, std::size_t, ContextHash> pending_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(transitions, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_fields(line);
    if (fields.size() != m + 2)
      throw Error("matrix line " + std::to_string(line_no) + ": expected " +
                  std::to_string(m + 2) + " columns");
    Context ctx;
    for (std::size_t k = 0; k < m; ++k)
      ctx.push_back(detail::parse_symbol(fields[k], line_no));
    TransitionTable::Entry entry;
    entry.next = detail::parse_symbol(fields[m], line_no);
    entry.prob = detail::parse_prob(fields[m + 1], line_no);
    if (entry.prob == 0.0) continue;
    auto [it, inserted] = pending_index.try_emplace(ctx, pending.size());
    if (inserted) pending.push_back({std::move(ctx), {}});
    pending[it->second].entries.push_back(entry);
  }
  if (pending.empty()) throw Error("matrix file contains no usable rows");

  Model model;
  model.spec = spec;
  model.label = std::move(label);
  for (auto& row : pending) {
    model.transitions.set_row(row.context, std::move(row.entries), kFileRowTolerance);
  }

  std::vector<InitialDistribution::Entry> initial_entries;
  if (initial != nullptr) {
    line_no = 0;
    while (std::getline(*initial, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = detail::split_fields(line);
      if (fields.size() != m + 1)
        throw Error("initial line " + std::to_string(line_no) + ": expected " +
                    std::to_string(m + 1) + " columns");
      InitialDistribution::Entry e;
      for (std::size_t k = 0; k < m; ++k)
        e.context.push_back(detail::parse_symbol(fields[k], line_no));
      e.prob = detail::parse_prob(fields[m], line_no);
      if (e.prob == 0.0) continue;
      initial_entries.push_back(std::move(e));
    }
    if (initial_entries.empty()) throw Error("initial file contains no usable rows");
  } else {
    const double w = 1.0 / static_cast<double>(model.transitions.context_count());
    for (const Context* ctx : model.transitions.sorted_contexts())
      initial_entries.push_back({*ctx, w});
  }
  model.initial =
      InitialDistribution::from_entries(std::move(initial_entries), kFileRowTolerance);
  model.validate();
  return model;
}

}  // namespace camgen
