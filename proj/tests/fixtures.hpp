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

// Shared test fixtures: hand-built models and oracle samplers that stay
// independent of the library's generator.

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "camgen/model.hpp"
#include "camgen/trace.hpp"

namespace camtest {

using camgen::Context;
using camgen::Model;
using camgen::ModelSpec;
using camgen::QuantizedTrace;
using camgen::Symbol;

/// Order-1 ground truth as plain data: row per previous symbol.
using OracleRows = std::map<Symbol, std::vector<std::pair<Symbol, double>>>;

/// Straightforward independent chain sampler (plain cumulative walk over the
/// row vector); used as the brute-force oracle for fitting tests.
inline std::vector<Symbol> oracle_chain(const OracleRows& rows, Symbol start,
                                        std::size_t count, std::uint64_t seed) {
  std::vector<Symbol> out;
  out.reserve(count + 1);
  out.push_back(start);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Symbol prev = start;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& row = rows.at(prev);
    const double u = unit(rng);
    double acc = 0.0;
    Symbol next = row.back().first;
    for (const auto& [sym, p] : row) {
      acc += p;
      if (u <= acc) {
        next = sym;
        break;
      }
    }
    out.push_back(next);
    prev = next;
  }
  return out;
}

/// Wraps a symbol stream in a single-segment quantized trace.
inline QuantizedTrace trace_from_symbols(std::vector<Symbol> symbols, ModelSpec spec) {
  QuantizedTrace qt;
  qt.spec = std::move(spec);
  qt.source_events = symbols.size() + 1;
  qt.segments.push_back(std::move(symbols));
  return qt;
}

/// Builds a full model from order-1 rows: the initial distribution is
/// uniform over the row contexts.
inline Model model_from_rows(const OracleRows& rows, ModelSpec spec,
                             double jitter_std_ms = -1.0) {
  Model model;
  model.spec = std::move(spec);
  if (jitter_std_ms >= 0.0) model.spec.jitter_std_ms = jitter_std_ms;
  std::vector<camgen::InitialDistribution::Entry> initial;
  const double w = 1.0 / static_cast<double>(rows.size());
  for (const auto& [prev, row] : rows) {
    camgen::TransitionTable::Row entries;
    for (const auto& [sym, p] : row) entries.push_back({sym, p});
    model.transitions.set_row({prev}, std::move(entries));
    initial.push_back({{prev}, w});
  }
  model.initial = camgen::InitialDistribution::from_entries(std::move(initial));
  model.validate();
  return model;
}

/// Hand-picked excerpt of a Volkswagen-highway m=5 transition table.
struct ExcerptRow {
  Context context;
  std::vector<std::pair<Symbol, double>> successors;
};

inline std::vector<ExcerptRow> vw_highway_excerpt_rows() {
  return {
      {{13, 6, 7, 14, 13}, {{13, 1.000}}},
      {{13, 6, 15, 6, 5}, {{8, 0.250}, {14, 0.750}}},
      {{13, 6, 15, 10, 13}, {{6, 1.000}}},
      {{13, 6, 15, 14, 5}, {{5, 0.333}, {16, 0.667}}},
      {{13, 6, 15, 14, 9}, {{16, 1.000}}},
      {{13, 6, 15, 14, 13}, {{2, 0.143}, {8, 0.143}, {12, 0.143}, {16, 0.571}}},
  };
}

/// Model carrying the excerpt rows; initial distribution is uniform over
/// the row contexts (most of which are dead ends, exercising redraws).
inline Model vw_highway_excerpt_model(double jitter_std_ms = 0.0) {
  Model model;
  model.spec = ModelSpec::complete(camgen::SizeSet::of({200, 300, 360, 455}),
                                   camgen::IntervalSet::standard(), 5, jitter_std_ms);
  auto rows = vw_highway_excerpt_rows();
  std::vector<camgen::InitialDistribution::Entry> initial;
  const double w = 1.0 / static_cast<double>(rows.size());
  for (auto& r : rows) {
    camgen::TransitionTable::Row entries;
    for (const auto& [sym, p] : r.successors) entries.push_back({sym, p});
    model.transitions.set_row(r.context, std::move(entries), camgen::kFileRowTolerance);
    initial.push_back({r.context, w});
  }
  model.initial = camgen::InitialDistribution::from_entries(std::move(initial));
  model.validate();
  return model;
}

/// Single-row degenerate model: one symbol, emitted forever.
inline Model single_symbol_model(double jitter_std_ms = 0.0) {
  OracleRows rows = {{1, {{1, 1.0}}}};
  return model_from_rows(
      rows,
      ModelSpec::complete(camgen::SizeSet::of({200}),
                          camgen::IntervalSet::of({100}, 100), 1, jitter_std_ms));
}

/// Order-1 complete model over |S|=2 x |G|=2 whose stationary distribution
/// couples size and interval (the mutual mass sits on symbols 1 and 4).
inline Model coupled_complete_model(double jitter_std_ms = 0.0) {
  OracleRows rows;
  for (Symbol prev = 1; prev <= 4; ++prev) {
    rows[prev] = {{1, 0.34}, {2, 0.16}, {3, 0.16}, {4, 0.34}};
  }
  return model_from_rows(
      rows, ModelSpec::complete(camgen::SizeSet::of({200, 400}),
                                camgen::IntervalSet::of({100, 200}, 100), 1,
                                jitter_std_ms));
}

/// Order-1 ground truth over the 40-symbol Volkswagen-style alphabet with a
/// fixed sparse structure; every symbol is reachable.
inline OracleRows vw_like_rows() {
  OracleRows rows;
  for (Symbol n = 1; n <= 40; ++n) {
    Symbol up = n % 40 + 1;
    Symbol down = (n + 38) % 40 + 1;
    Symbol far1 = (n * 7) % 40 + 1;
    Symbol far2 = (n * 13 + 5) % 40 + 1;
    std::map<Symbol, double> row;
    row[n] += 0.35;
    row[up] += 0.20;
    row[down] += 0.20;
    row[far1] += 0.15;
    row[far2] += 0.10;
    rows[n] = {row.begin(), row.end()};
  }
  return rows;
}

inline Model vw_like_model(int order = 1, double jitter_std_ms = 3.444) {
  return model_from_rows(
      vw_like_rows(),
      ModelSpec::complete(camgen::SizeSet::of({200, 300, 360, 455}),
                          camgen::IntervalSet::standard(), order, jitter_std_ms));
}

}  // namespace camtest
