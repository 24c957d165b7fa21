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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/model.hpp"

namespace camgen {

/// One CAM: generation time in milliseconds since trace start, size in bytes.
struct CamEvent {
  double t_ms = 0.0;
  int size_bytes = 0;

  friend bool operator==(const CamEvent& a, const CamEvent& b) {
    return a.t_ms == b.t_ms && a.size_bytes == b.size_bytes;
  }
};

// ---------------------------------------------------------------------------
// Trace CSV: header line `t_ms,size_bytes`, one row per CAM, LF endings,
// timestamps printed with exactly 3 decimals. The reader also accepts
// header-less input and ignores extra columns (e.g. the optional `symbol`
// column emitted by the generator).
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_double_field(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw Error("trace line " + std::to_string(line_no) + ": bad timestamp '" +
                std::string(field) + "'");
  return v;
}

inline int parse_size_field(std::string_view field, std::size_t line_no) {
  int v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || v < 1)
    throw Error("trace line " + std::to_string(line_no) + ": bad size '" +
                std::string(field) + "'");
  return v;
}

}  // namespace detail

inline std::vector<CamEvent> read_trace(std::istream& in) {
  std::vector<CamEvent> events;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first_content) {
      first_content = false;
      if (line.rfind("t_ms", 0) == 0) continue;  // header
    }
    std::string_view row(line);
    auto c1 = row.find(',');
    if (c1 == std::string_view::npos)
      throw Error("trace line " + std::to_string(line_no) + ": expected 't_ms,size_bytes'");
    std::string_view t_field = row.substr(0, c1);
    std::string_view rest = row.substr(c1 + 1);
    auto c2 = rest.find(',');
    std::string_view s_field = c2 == std::string_view::npos ? rest : rest.substr(0, c2);
    CamEvent e;
    e.t_ms = detail::parse_double_field(t_field, line_no);
    e.size_bytes = detail::parse_size_field(s_field, line_no);
    if (!events.empty() && e.t_ms <= events.back().t_ms)
      throw Error("trace line " + std::to_string(line_no) +
                  ": timestamps must be strictly increasing");
    events.push_back(e);
  }
  return events;
}

inline std::vector<CamEvent> read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open trace file '" + path + "'");
  return read_trace(f);
}

/// Writes the trace CSV. When `symbols` is non-empty it must align 1:1 with
/// `events` and is emitted as a third column.
inline void write_trace(std::span<const CamEvent> events, std::ostream& out,
                        std::span<const Symbol> symbols = {}) {
  if (!symbols.empty() && symbols.size() != events.size())
    throw Error("symbol column must align with events");
  for (std::size_t k = 1; k < events.size(); ++k) {
    if (events[k].t_ms <= events[k - 1].t_ms)
      throw Error("trace timestamps must be strictly increasing");
  }
  out << (symbols.empty() ? "t_ms,size_bytes\n" : "t_ms,size_bytes,symbol\n");
  char buf[96];
  for (std::size_t k = 0; k < events.size(); ++k) {
    int n;
    if (symbols.empty()) {
      n = std::snprintf(buf, sizeof buf, "%.3f,%d\n", events[k].t_ms, events[k].size_bytes);
    } else {
      n = std::snprintf(buf, sizeof buf, "%.3f,%d,%u\n", events[k].t_ms,
                        events[k].size_bytes, symbols[k]);
    }
    out.write(buf, n);
  }
  if (!out) throw Error("trace write failed");
}

inline void write_trace_file(std::span<const CamEvent> events, const std::string& path,
                             std::span<const Symbol> symbols = {}) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_trace(events, f, symbols);
}

// ---------------------------------------------------------------------------
// Quantization onto the model alphabet
// ---------------------------------------------------------------------------

struct QuantizeOptions {
  /// Sizes farther than this from every member of S are dropped.
  double size_snap_tolerance_bytes = 30.0;
};

/// A trace mapped onto a model alphabet. Symbols are grouped into segments;
/// Markov windows never span a segment boundary (boundaries arise from long
/// gaps and from dropped events). In interval-bearing modes each symbol has
/// one residual (raw inter-arrival minus the snapped interval), concatenated
/// across segments in emission order.
struct QuantizedTrace {
  ModelSpec spec;
  std::vector<std::vector<Symbol>> segments;
  std::vector<double> residuals_ms;
  std::size_t source_events = 0;
  std::size_t dropped = 0;  // events whose size failed the snap tolerance
  std::size_t clamped = 0;  // inter-arrivals below min(G) - q/2, pulled up
  std::size_t splits = 0;   // gaps above max(G) + q/2, segment boundaries

  std::size_t symbol_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.size();
    return n;
  }

  std::vector<Symbol> flattened() const {
    std::vector<Symbol> out;
    out.reserve(symbol_count());
    for (const auto& s : segments) out.insert(out.end(), s.begin(), s.end());
    return out;
  }
};

/// Maps raw events onto the alphabet of `spec`.
///
/// Sizes snap to the nearest member of S within the tolerance; failures drop
/// the event (counted) and break the segment. Inter-arrivals snap to the
/// nearest member of G; arrivals below min(G) - q/2 are clamped up (counted),
/// gaps above max(G) + q/2 split the trace into independent segments. In
/// complete mode the first event only anchors the first interval; its size is
/// not part of any symbol.
inline QuantizedTrace quantize(std::span<const CamEvent> events, const ModelSpec& spec,
                               const QuantizeOptions& options = {}) {
  spec.validate();
  for (std::size_t k = 1; k < events.size(); ++k) {
    if (events[k].t_ms <= events[k - 1].t_ms)
      throw Error("trace timestamps must be strictly increasing");
  }

  QuantizedTrace qt;
  qt.spec = spec;
  qt.source_events = events.size();

  std::vector<Symbol> segment;
  auto close_segment = [&] {
    if (!segment.empty()) qt.segments.push_back(std::move(segment));
    segment.clear();
  };

  if (spec.mode == ModelMode::SizeOnly) {
    for (const CamEvent& e : events) {
      auto [i, dist] = spec.sizes.nearest(e.size_bytes);
      if (dist > options.size_snap_tolerance_bytes) {
        ++qt.dropped;
        close_segment();
        continue;
      }
      segment.push_back(static_cast<Symbol>(i));
    }
    close_segment();
  } else {
    const double split_above =
        spec.intervals.max_ms() + spec.intervals.quantum_ms() / 2.0;
    const double clamp_below =
        spec.intervals.min_ms() - spec.intervals.quantum_ms() / 2.0;
    for (std::size_t k = 1; k < events.size(); ++k) {
      const double delta = events[k].t_ms - events[k - 1].t_ms;
      if (delta > split_above) {
        ++qt.splits;
        close_segment();
        continue;
      }
      std::size_t size_index = 1;
      if (spec.mode == ModelMode::Complete) {
        auto [i, dist] = spec.sizes.nearest(events[k].size_bytes);
        if (dist > options.size_snap_tolerance_bytes) {
          ++qt.dropped;
          close_segment();
          continue;
        }
        size_index = i;
      }
      auto [j, ignored] = spec.intervals.nearest(delta);
      if (delta < clamp_below) ++qt.clamped;
      const double residual = delta - spec.intervals.at(j);
      Symbol n = spec.mode == ModelMode::Complete
                     ? spec.symbol_for(size_index, j)
                     : static_cast<Symbol>(j);
      segment.push_back(n);
      qt.residuals_ms.push_back(residual);
    }
    close_segment();
  }

  if (qt.symbol_count() == 0)
    throw Error("no events could be mapped onto the model alphabet");
  return qt;
}

}  // namespace camgen
