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

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/model.hpp"
#include "camgen/trace.hpp"

namespace camgen {

/// Occurrence counts c(context, next) and row totals r(context). Conditional
/// probabilities are the ratio c/r, so every fitted row sums to one by
/// construction.
class CountTable {
 public:
  using Row = std::map<Symbol, std::uint64_t>;
  using Map = std::unordered_map<Context, Row, ContextHash>;

  void add(const Context& context, Symbol next, std::uint64_t k = 1) {
    rows_[context][next] += k;
    total_ += k;
  }

  std::uint64_t count(const Context& context, Symbol next) const {
    auto it = rows_.find(context);
    if (it == rows_.end()) return 0;
    auto jt = it->second.find(next);
    return jt == it->second.end() ? 0 : jt->second;
  }

  std::uint64_t row_total(const Context& context) const {
    auto it = rows_.find(context);
    if (it == rows_.end()) return 0;
    std::uint64_t r = 0;
    for (const auto& [next, c] : it->second) r += c;
    return r;
  }

  std::uint64_t total() const { return total_; }
  std::size_t context_count() const { return rows_.size(); }
  const Map& rows() const { return rows_; }

 private:
  Map rows_;
  std::uint64_t total_ = 0;
};

/// Jitter estimator. An observed inter-arrival residual is the difference of
/// the jitters of two consecutive CAMs drawn on a nominal grid, so its
/// variance is twice the jitter variance: sigma = std(residuals) / sqrt(2).
inline double jitter_std_from_residuals(std::span<const double> residuals) {
  if (residuals.size() < 2)
    throw Error("jitter estimation needs at least two interval residuals");
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(residuals.size());
  double ss = 0.0;
  for (double r : residuals) ss += (r - mean) * (r - mean);
  const double var = ss / static_cast<double>(residuals.size() - 1);
  return std::sqrt(var / 2.0);
}

struct FitResult {
  Model model;
  CountTable counts;
  std::size_t transition_windows = 0;  // (m+1)-windows counted
  std::size_t context_windows = 0;     // m-windows counted (initial distribution)
  std::size_t residual_samples = 0;
  std::size_t dead_end_contexts = 0;
};

/// Estimates a model of the given order from a quantized trace. Windows are
/// taken at every position (overlapping) and never span a segment boundary;
/// segments contribute jointly to one count table.
inline FitResult fit(const QuantizedTrace& trace, int order) {
  if (order < 1) throw Error("model order m must be >= 1");
  const std::size_t m = static_cast<std::size_t>(order);

  FitResult result;
  std::unordered_map<Context, std::uint64_t, ContextHash> context_counts;
  Context window;
  for (const auto& segment : trace.segments) {
    if (segment.size() >= m) {
      for (std::size_t k = 0; k + m <= segment.size(); ++k) {
        window.assign(segment.begin() + k, segment.begin() + k + m);
        ++context_counts[window];
        ++result.context_windows;
      }
    }
    if (segment.size() >= m + 1) {
      for (std::size_t k = 0; k + m + 1 <= segment.size(); ++k) {
        window.assign(segment.begin() + k, segment.begin() + k + m);
        result.counts.add(window, segment[k + m]);
        ++result.transition_windows;
      }
    }
  }
  if (result.transition_windows == 0)
    throw Error("insufficient data: trace must contain more than m=" +
                std::to_string(order) + " consecutive symbols");

  Model& model = result.model;
  model.spec = trace.spec;
  model.spec.order = order;
  model.spec.jitter_std_ms = 0.0;
  if (model.spec.models_intervals() && trace.residuals_ms.size() >= 2) {
    model.spec.jitter_std_ms = jitter_std_from_residuals(trace.residuals_ms);
    result.residual_samples = trace.residuals_ms.size();
  }

  for (const auto& [context, row] : result.counts.rows()) {
    std::uint64_t r = 0;
    for (const auto& [next, c] : row) r += c;
    TransitionTable::Row entries;
    entries.reserve(row.size());
    for (const auto& [next, c] : row) {
      entries.push_back({next, static_cast<double>(c) / static_cast<double>(r)});
    }
    model.transitions.set_row(context, std::move(entries));
  }

  std::vector<InitialDistribution::Entry> initial;
  initial.reserve(context_counts.size());
  for (const auto& [context, c] : context_counts) {
    initial.push_back({context, static_cast<double>(c) /
                                    static_cast<double>(result.context_windows)});
  }
  model.initial = InitialDistribution::from_entries(std::move(initial));

  result.dead_end_contexts = model.dead_end_context_count();
  model.validate();
  return result;
}

inline FitResult fit(const QuantizedTrace& trace) { return fit(trace, trace.spec.order); }

/// Projects a complete-mode quantized trace onto one of the separate
/// alphabets (size indices or interval indices).
inline QuantizedTrace project(const QuantizedTrace& trace, ModelMode target) {
  if (trace.spec.mode == target) return trace;
  if (trace.spec.mode != ModelMode::Complete)
    throw Error("only complete-mode traces can be projected");
  if (target == ModelMode::Complete)
    throw Error("cannot project a trace onto the complete alphabet");

  QuantizedTrace out;
  out.source_events = trace.source_events;
  out.dropped = trace.dropped;
  out.clamped = trace.clamped;
  out.splits = trace.splits;

  const std::size_t s_card = trace.spec.sizes.cardinality();
  out.segments.reserve(trace.segments.size());
  for (const auto& segment : trace.segments) {
    std::vector<Symbol> projected;
    projected.reserve(segment.size());
    for (Symbol n : segment) {
      projected.push_back(target == ModelMode::SizeOnly
                              ? static_cast<Symbol>(symbol_to_size_index(n, s_card))
                              : static_cast<Symbol>(symbol_to_interval_index(n, s_card)));
    }
    out.segments.push_back(std::move(projected));
  }
  if (target == ModelMode::SizeOnly) {
    out.spec = ModelSpec::size_only(trace.spec.sizes, trace.spec.order);
  } else {
    out.spec = ModelSpec::interval_only(trace.spec.intervals, trace.spec.order,
                                        trace.spec.jitter_std_ms);
    out.residuals_ms = trace.residuals_ms;
  }
  return out;
}

/// Fits a separate (size-only or interval-only) model. Complete-mode traces
/// are first projected; this equals running the ordinary fit on the projected
/// symbol stream. The jitter estimate is produced only in interval mode.
inline FitResult fit_separate(const QuantizedTrace& trace, const ModelSpec& separate_spec) {
  separate_spec.validate();
  if (separate_spec.mode == ModelMode::Complete)
    throw Error("fit_separate expects a size-only or interval-only spec");
  QuantizedTrace projected = project(trace, separate_spec.mode);
  if (separate_spec.models_sizes() &&
      separate_spec.sizes.bytes() != projected.spec.sizes.bytes())
    throw Error("separate spec size set does not match the quantized trace");
  if (separate_spec.models_intervals() &&
      separate_spec.intervals.ms() != projected.spec.intervals.ms())
    throw Error("separate spec interval set does not match the quantized trace");
  return fit(projected, separate_spec.order);
}

/// Candidate size bins from the trace's size histogram: local maxima of the
/// binned PDF whose mass exceeds `min_peak_prob`. Each peak is reported as
/// the count-weighted mean size over the peak bin and its two neighbours.
inline SizeSet detect_size_bins(std::span<const CamEvent> events, int hist_bin_bytes = 10,
                                double min_peak_prob = 0.05) {
  if (events.empty()) throw Error("size-bin detection needs at least one event");
  if (hist_bin_bytes < 1) throw Error("histogram bin must be >= 1 byte");

  struct Bin {
    std::uint64_t count = 0;
    std::uint64_t size_sum = 0;
  };
  std::map<long, Bin> bins;
  for (const CamEvent& e : events) {
    Bin& b = bins[e.size_bytes / hist_bin_bytes];
    ++b.count;
    b.size_sum += static_cast<std::uint64_t>(e.size_bytes);
  }
  const double total = static_cast<double>(events.size());
  auto mass = [&](long b) {
    auto it = bins.find(b);
    return it == bins.end() ? 0.0 : static_cast<double>(it->second.count) / total;
  };

  struct Peak {
    double mass = 0.0;
    int size = 0;
  };
  std::vector<Peak> peaks;
  for (const auto& [b, bin] : bins) {
    const double m = static_cast<double>(bin.count) / total;
    if (m < min_peak_prob) continue;
    if (m < mass(b - 1) || m < mass(b + 1)) continue;
    std::uint64_t count = 0, size_sum = 0;
    for (long nb = b - 1; nb <= b + 1; ++nb) {
      auto it = bins.find(nb);
      if (it == bins.end()) continue;
      count += it->second.count;
      size_sum += it->second.size_sum;
    }
    const int rep = static_cast<int>(
        std::llround(static_cast<double>(size_sum) / static_cast<double>(count)));
    peaks.push_back({m, rep});
  }
  if (peaks.empty())
    throw Error("no histogram peak above probability " + std::to_string(min_peak_prob) +
                "; pass explicit size bins");

  // Strongest peaks win; duplicates within one bin width collapse.
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.mass > b.mass; });
  std::vector<int> accepted;
  for (const Peak& p : peaks) {
    bool close = false;
    for (int s : accepted) {
      if (std::abs(s - p.size) <= hist_bin_bytes) close = true;
    }
    if (!close) accepted.push_back(p.size);
  }
  std::sort(accepted.begin(), accepted.end());
  return SizeSet::of(std::move(accepted));
}

}  // namespace camgen
