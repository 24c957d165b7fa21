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
#include <random>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/model.hpp"
#include "camgen/trace.hpp"

namespace camgen {

/// Jitter samples outside +/- this bound are redrawn, which keeps the mean at
/// zero and guarantees that inter-arrival deviations stay below half of the
/// 100 ms quantum, so quantization recovers generated symbols exactly.
inline constexpr double kJitterTruncationMs = 20.0;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream-splitting rule: generator instance `stream` is seeded with the
/// (stream+1)-th output of a SplitMix64 sequence started at `seed`.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t out = 0;
  for (std::uint64_t k = 0; k <= stream; ++k) out = splitmix64_next(s);
  return out;
}

/// Draws a preliminary context with probability equal to its weight.
inline Context seed_context(const InitialDistribution& initial, std::mt19937_64& rng) {
  if (initial.empty()) throw Error("initial distribution is empty");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return initial.sample(unit(rng));
}

/// One generated CAM together with the symbol that produced it.
struct Emission {
  Symbol symbol = 0;
  CamEvent event;
};

/// Walks one Markov chain. Instances are single-threaded; any number of them
/// may share one immutable Model.
class Generator {
 public:
  Generator(const Model& model, std::uint64_t seed, std::uint64_t stream = 0)
      : model_(&model), rng_(derive_stream_seed(seed, stream)) {
    model.validate();
    bool viable = false;
    for (const auto& e : model.initial.entries()) {
      if (model.transitions.contains(e.context)) {
        viable = true;
        break;
      }
    }
    if (!viable)
      throw Error("model is not generatable: every initial context is a dead end");
    context_ = seed_context(model.initial, rng_);
  }

  const ModelSpec& spec() const { return model_->spec; }
  const Context& context() const { return context_; }
  double nominal_time_ms() const { return nominal_t_ms_; }
  std::uint64_t dead_end_redraws() const { return dead_end_redraws_; }

  /// Inverse-CDF draw of the next symbol; the final row bucket absorbs any
  /// floating-point residue. Dead-end contexts redraw a fresh context from
  /// the initial distribution and continue.
  Symbol next_symbol() {
    for (int attempt = 0; attempt < kMaxDeadEndRedraws; ++attempt) {
      const TransitionTable::Row* row = model_->transitions.row(context_);
      if (row == nullptr) {
        ++dead_end_redraws_;
        context_ = seed_context(model_->initial, rng_);
        continue;
      }
      const double u = unit_(rng_);
      double acc = 0.0;
      Symbol chosen = row->back().next;
      for (const auto& e : *row) {
        acc += e.prob;
        if (u <= acc) {
          chosen = e.next;
          break;
        }
      }
      context_.erase(context_.begin());
      context_.push_back(chosen);
      return chosen;
    }
    throw Error("generator stuck on dead-end contexts; model is inconsistent");
  }

  /// Emits one CAM from a complete-mode model: size via the size index,
  /// nominal time advanced by the interval, Gaussian jitter added on top of
  /// the nominal schedule (never accumulated into it).
  Emission next_emission() {
    if (model_->spec.mode != ModelMode::Complete)
      throw Error("events require a complete-mode model; use generate_separate "
                  "for size-only/interval-only model pairs");
    Emission em;
    em.symbol = next_symbol();
    em.event.size_bytes = model_->spec.size_bytes_of(em.symbol);
    nominal_t_ms_ += model_->spec.interval_ms_of(em.symbol);
    em.event.t_ms = nominal_t_ms_ + sample_jitter();
    return em;
  }

  CamEvent next_event() { return next_emission().event; }

  /// Interval-bearing modes: advances the nominal schedule and returns the
  /// jittered emission time of the next CAM.
  double next_time_ms() {
    if (!model_->spec.models_intervals())
      throw Error("model does not carry intervals");
    const Symbol n = next_symbol();
    nominal_t_ms_ += model_->spec.interval_ms_of(n);
    return nominal_t_ms_ + sample_jitter();
  }

  /// Size-bearing modes: returns the size of the next CAM.
  int next_size_bytes() {
    if (!model_->spec.models_sizes()) throw Error("model does not carry sizes");
    return model_->spec.size_bytes_of(next_symbol());
  }

 private:
  static constexpr int kMaxDeadEndRedraws = 100000;

  double sample_jitter() {
    const double sigma = model_->spec.jitter_std_ms;
    if (sigma <= 0.0) return 0.0;
    std::normal_distribution<double> gauss(0.0, sigma);
    double j;
    do {
      j = gauss(rng_);
    } while (std::abs(j) > kJitterTruncationMs);
    return j;
  }

  const Model* model_;
  Context context_;
  double nominal_t_ms_ = 0.0;
  std::uint64_t dead_end_redraws_ = 0;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct GeneratedStream {
  std::vector<CamEvent> events;
  std::vector<Symbol> symbols;  // aligned 1:1 with events
};

/// Deterministic for a fixed (model, count, seed).
inline GeneratedStream generate_stream(const Model& model, std::size_t count,
                                       std::uint64_t seed) {
  GeneratedStream out;
  if (count == 0) return out;
  Generator gen(model, seed);
  out.events.reserve(count);
  out.symbols.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Emission em = gen.next_emission();
    out.symbols.push_back(em.symbol);
    out.events.push_back(em.event);
  }
  return out;
}

/// Generates every CAM whose nominal (jitter-free) time lies within the
/// duration.
inline GeneratedStream generate_stream_for_duration(const Model& model,
                                                    double duration_ms,
                                                    std::uint64_t seed) {
  GeneratedStream out;
  if (duration_ms <= 0.0) throw Error("duration must be > 0");
  Generator gen(model, seed);
  for (;;) {
    Emission em = gen.next_emission();
    if (gen.nominal_time_ms() > duration_ms) break;
    out.symbols.push_back(em.symbol);
    out.events.push_back(em.event);
  }
  return out;
}

/// Symbol sequence only; works for any model mode.
inline std::vector<Symbol> generate_symbols(const Model& model, std::size_t count,
                                            std::uint64_t seed) {
  std::vector<Symbol> out;
  if (count == 0) return out;
  Generator gen(model, seed);
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(gen.next_symbol());
  return out;
}

/// Two independent chains, one driving sizes and one driving emission times.
/// Streams 0 and 1 of the seed are used, so the chains share no randomness;
/// by construction the size/interval cross-correlation of the source data is
/// not reproduced.
inline std::vector<CamEvent> generate_separate(const Model& size_model,
                                               const Model& interval_model,
                                               std::size_t count, std::uint64_t seed) {
  if (size_model.spec.mode != ModelMode::SizeOnly)
    throw Error("generate_separate: first model must be size-only");
  if (interval_model.spec.mode != ModelMode::IntervalOnly)
    throw Error("generate_separate: second model must be interval-only");
  std::vector<CamEvent> out;
  if (count == 0) return out;
  Generator size_gen(size_model, seed, 0);
  Generator interval_gen(interval_model, seed, 1);
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    CamEvent e;
    e.t_ms = interval_gen.next_time_ms();
    e.size_bytes = size_gen.next_size_bytes();
    out.push_back(e);
  }
  return out;
}

}  // namespace camgen
