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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "camgen/error.hpp"

namespace camgen {

/// 1-based index into the source alphabet A.
using Symbol = std::uint32_t;

/// Markov context: the previous `m` symbols, ordered oldest -> newest.
using Context = std::vector<Symbol>;

// Row-sum tolerances. Rows built in memory (counting) must be normalized to
// kDefaultRowTolerance; rows loaded from plain-text files are accepted up to
// kFileRowTolerance and re-normalized. Rows whose sum is already within
// kRenormalizeSkip of 1 are kept bit-exact, so that a written file parses and
// re-writes byte-identically.
inline constexpr double kDefaultRowTolerance = 1e-6;
inline constexpr double kFileRowTolerance = 1e-3;
inline constexpr double kRenormalizeSkip = 1e-8;

enum class ModelMode {
  Complete,      // A = S x G: one symbol per (size, interval) pair
  SizeOnly,      // A = S
  IntervalOnly,  // A = G
};

inline std::string to_string(ModelMode mode) {
  switch (mode) {
    case ModelMode::Complete:
      return "complete";
    case ModelMode::SizeOnly:
      return "size";
    case ModelMode::IntervalOnly:
      return "interval";
  }
  return "?";
}

inline ModelMode mode_from_string(std::string_view name) {
  if (name == "complete") return ModelMode::Complete;
  if (name == "size") return ModelMode::SizeOnly;
  if (name == "interval") return ModelMode::IntervalOnly;
  throw Error("unknown model mode '" + std::string(name) +
              "' (expected complete, size or interval)");
}

// ---------------------------------------------------------------------------
// Alphabet index arithmetic. Symbols, size indices and interval indices are
// all 1-based; the size index cycles fastest:
//   i = ((n - 1) % |S|) + 1
//   j = floor((n - 1) / |S|) + 1
//   n = (j - 1) * |S| + i
// ---------------------------------------------------------------------------

inline std::size_t symbol_to_size_index(Symbol n, std::size_t s_card) {
  if (n < 1) throw Error("symbol index must be >= 1");
  if (s_card < 1) throw Error("size set cardinality must be >= 1");
  return static_cast<std::size_t>((n - 1) % s_card) + 1;
}

inline std::size_t symbol_to_interval_index(Symbol n, std::size_t s_card) {
  if (n < 1) throw Error("symbol index must be >= 1");
  if (s_card < 1) throw Error("size set cardinality must be >= 1");
  return static_cast<std::size_t>((n - 1) / s_card) + 1;
}

inline Symbol indices_to_symbol(std::size_t i, std::size_t j, std::size_t s_card) {
  if (s_card < 1) throw Error("size set cardinality must be >= 1");
  if (i < 1 || i > s_card)
    throw Error("size index " + std::to_string(i) + " out of range 1.." +
                std::to_string(s_card));
  if (j < 1) throw Error("interval index must be >= 1");
  return static_cast<Symbol>((j - 1) * s_card + i);
}

// ---------------------------------------------------------------------------
// Alphabet definition
// ---------------------------------------------------------------------------

/// Ordered set S of message sizes in bytes, strictly increasing.
class SizeSet {
 public:
  SizeSet() = default;

  static SizeSet of(std::vector<int> bytes) {
    if (bytes.empty()) throw Error("size set must contain at least one size");
    for (std::size_t k = 0; k < bytes.size(); ++k) {
      if (bytes[k] < 1) throw Error("message sizes must be >= 1 byte");
      if (k > 0 && bytes[k] <= bytes[k - 1])
        throw Error("size set must be strictly increasing");
    }
    SizeSet s;
    s.bytes_ = std::move(bytes);
    return s;
  }

  bool empty() const { return bytes_.empty(); }
  std::size_t cardinality() const { return bytes_.size(); }
  const std::vector<int>& bytes() const { return bytes_; }

  int at(std::size_t index1) const {
    if (index1 < 1 || index1 > bytes_.size())
      throw Error("size index " + std::to_string(index1) + " out of range");
    return bytes_[index1 - 1];
  }

  /// Nearest member of S to a raw size. Returns (1-based index, distance);
  /// ties resolve to the smaller size.
  std::pair<std::size_t, double> nearest(double size_bytes) const {
    if (bytes_.empty()) throw Error("size set is empty");
    auto it = std::lower_bound(bytes_.begin(), bytes_.end(), size_bytes);
    if (it == bytes_.begin())
      return {1, std::abs(static_cast<double>(*it) - size_bytes)};
    if (it == bytes_.end()) {
      std::size_t i = bytes_.size();
      return {i, std::abs(size_bytes - static_cast<double>(bytes_.back()))};
    }
    double up = static_cast<double>(*it) - size_bytes;
    double down = size_bytes - static_cast<double>(*(it - 1));
    if (down <= up)
      return {static_cast<std::size_t>(it - bytes_.begin()), down};
    return {static_cast<std::size_t>(it - bytes_.begin()) + 1, up};
  }

 private:
  std::vector<int> bytes_;
};

/// Ordered set G of generation intervals in milliseconds. Every member is a
/// positive multiple of the base quantum q.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// quantum_ms == 0 derives the quantum as the gcd of the members.
  static IntervalSet of(std::vector<int> ms, int quantum_ms = 0) {
    if (ms.empty()) throw Error("interval set must contain at least one interval");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (ms[k] < 1) throw Error("intervals must be >= 1 ms");
      if (k > 0 && ms[k] <= ms[k - 1])
        throw Error("interval set must be strictly increasing");
    }
    int q = quantum_ms;
    if (q == 0) {
      for (int v : ms) q = std::gcd(q, v);
    }
    if (q < 1) throw Error("interval quantum must be >= 1 ms");
    for (int v : ms) {
      if (v % q != 0)
        throw Error("interval " + std::to_string(v) +
                    " ms is not a multiple of the quantum " + std::to_string(q) + " ms");
    }
    IntervalSet g;
    g.ms_ = std::move(ms);
    g.quantum_ms_ = q;
    return g;
  }

  /// The ETSI range: {100, 200, ..., 1000} ms with a 100 ms quantum.
  static IntervalSet standard() {
    std::vector<int> ms;
    for (int v = 100; v <= 1000; v += 100) ms.push_back(v);
    return of(std::move(ms), 100);
  }

  bool empty() const { return ms_.empty(); }
  std::size_t cardinality() const { return ms_.size(); }
  const std::vector<int>& ms() const { return ms_; }
  int quantum_ms() const { return quantum_ms_; }
  int min_ms() const { return ms_.front(); }
  int max_ms() const { return ms_.back(); }

  int at(std::size_t index1) const {
    if (index1 < 1 || index1 > ms_.size())
      throw Error("interval index " + std::to_string(index1) + " out of range");
    return ms_[index1 - 1];
  }

  /// Nearest member of G to an inter-arrival time. Ties resolve to the
  /// smaller interval.
  std::pair<std::size_t, double> nearest(double delta_ms) const {
    if (ms_.empty()) throw Error("interval set is empty");
    auto it = std::lower_bound(ms_.begin(), ms_.end(), delta_ms);
    if (it == ms_.begin())
      return {1, std::abs(static_cast<double>(*it) - delta_ms)};
    if (it == ms_.end()) {
      std::size_t j = ms_.size();
      return {j, std::abs(delta_ms - static_cast<double>(ms_.back()))};
    }
    double up = static_cast<double>(*it) - delta_ms;
    double down = delta_ms - static_cast<double>(*(it - 1));
    if (down <= up)
      return {static_cast<std::size_t>(it - ms_.begin()), down};
    return {static_cast<std::size_t>(it - ms_.begin()) + 1, up};
  }

 private:
  std::vector<int> ms_;
  int quantum_ms_ = 100;
};

// ---------------------------------------------------------------------------
// Model specification
// ---------------------------------------------------------------------------

struct ModelSpec {
  ModelMode mode = ModelMode::Complete;
  int order = 1;  // m
  SizeSet sizes;
  IntervalSet intervals;
  double jitter_std_ms = 0.0;  // meaningful only when intervals are modeled

  static ModelSpec complete(SizeSet s, IntervalSet g, int order,
                            double jitter_std_ms = 0.0) {
    ModelSpec spec;
    spec.mode = ModelMode::Complete;
    spec.order = order;
    spec.sizes = std::move(s);
    spec.intervals = std::move(g);
    spec.jitter_std_ms = jitter_std_ms;
    spec.validate();
    return spec;
  }

  static ModelSpec size_only(SizeSet s, int order) {
    ModelSpec spec;
    spec.mode = ModelMode::SizeOnly;
    spec.order = order;
    spec.sizes = std::move(s);
    spec.validate();
    return spec;
  }

  static ModelSpec interval_only(IntervalSet g, int order,
                                 double jitter_std_ms = 0.0) {
    ModelSpec spec;
    spec.mode = ModelMode::IntervalOnly;
    spec.order = order;
    spec.intervals = std::move(g);
    spec.jitter_std_ms = jitter_std_ms;
    spec.validate();
    return spec;
  }

  bool models_sizes() const { return mode != ModelMode::IntervalOnly; }
  bool models_intervals() const { return mode != ModelMode::SizeOnly; }

  std::size_t alphabet_size() const {
    switch (mode) {
      case ModelMode::Complete:
        return sizes.cardinality() * intervals.cardinality();
      case ModelMode::SizeOnly:
        return sizes.cardinality();
      case ModelMode::IntervalOnly:
        return intervals.cardinality();
    }
    return 0;
  }

  void validate() const {
    if (order < 1) throw Error("model order m must be >= 1");
    if (jitter_std_ms < 0.0) throw Error("jitter standard deviation must be >= 0");
    if (models_sizes() && sizes.empty())
      throw Error("mode '" + to_string(mode) + "' requires a size set");
    if (models_intervals() && intervals.empty())
      throw Error("mode '" + to_string(mode) + "' requires an interval set");
    if (!models_sizes() && !sizes.empty())
      throw Error("interval-only model must not carry a size set");
    if (!models_intervals() && !intervals.empty())
      throw Error("size-only model must not carry an interval set");
  }

  void check_symbol(Symbol n) const {
    if (n < 1 || n > alphabet_size())
      throw Error("symbol " + std::to_string(n) + " out of range 1.." +
                  std::to_string(alphabet_size()));
  }

  std::size_t size_index_of(Symbol n) const {
    if (!models_sizes()) throw Error("model does not carry sizes");
    check_symbol(n);
    if (mode == ModelMode::SizeOnly) return n;
    return symbol_to_size_index(n, sizes.cardinality());
  }

  std::size_t interval_index_of(Symbol n) const {
    if (!models_intervals()) throw Error("model does not carry intervals");
    check_symbol(n);
    if (mode == ModelMode::IntervalOnly) return n;
    return symbol_to_interval_index(n, sizes.cardinality());
  }

  Symbol symbol_for(std::size_t size_index, std::size_t interval_index) const {
    if (mode != ModelMode::Complete)
      throw Error("(size, interval) pairs only exist in complete mode");
    if (interval_index > intervals.cardinality())
      throw Error("interval index " + std::to_string(interval_index) +
                  " out of range 1.." + std::to_string(intervals.cardinality()));
    return indices_to_symbol(size_index, interval_index, sizes.cardinality());
  }

  int size_bytes_of(Symbol n) const { return sizes.at(size_index_of(n)); }
  int interval_ms_of(Symbol n) const { return intervals.at(interval_index_of(n)); }
};

// ---------------------------------------------------------------------------
// Transition table (sparse) and initial distribution
// ---------------------------------------------------------------------------

struct ContextHash {
  std::size_t operator()(const Context& c) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (Symbol s : c) {
      h ^= s;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

namespace detail {

// Validates a probability row and normalizes it in place. Sums already within
// kRenormalizeSkip of 1 are kept as-is so file round-trips stay byte-stable.
inline void check_and_normalize(std::vector<double>& probs, double tolerance,
                                const std::string& what) {
  double sum = 0.0;
  double largest = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw Error(what + ": probabilities must be > 0");
    if (p > 1.0 + tolerance) throw Error(what + ": probability " + std::to_string(p) + " exceeds 1");
    sum += p;
    largest = std::max(largest, p);
  }
  if (std::abs(sum - 1.0) > tolerance)
    throw Error(what + ": probabilities sum to " + std::to_string(sum) +
                ", outside tolerance " + std::to_string(tolerance));
  if (std::abs(sum - 1.0) > kRenormalizeSkip || largest > 1.0) {
    for (double& p : probs) p /= sum;  // p <= sum, so results stay in (0, 1]
  }
}

inline void check_context(const Context& c, const std::string& what) {
  if (c.empty()) throw Error(what + ": context must not be empty");
  for (Symbol s : c) {
    if (s < 1) throw Error(what + ": context symbols must be >= 1");
  }
}

}  // namespace detail

/// Sparse conditional-probability table: one row per observed context, each
/// row listing the successors with non-zero probability. Zero-probability
/// entries are never stored.
class TransitionTable {
 public:
  struct Entry {
    Symbol next = 0;
    double prob = 0.0;
  };
  using Row = std::vector<Entry>;  // sorted by next symbol
  using Map = std::unordered_map<Context, Row, ContextHash>;

  void set_row(const Context& context, Row row, double tolerance = kDefaultRowTolerance) {
    detail::check_context(context, "transition row");
    if (row.empty()) throw Error("transition row must not be empty");
    if (order_ == 0) order_ = context.size();
    if (context.size() != order_)
      throw Error("transition context length " + std::to_string(context.size()) +
                  " does not match table order " + std::to_string(order_));
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.next < b.next; });
    std::vector<double> probs;
    probs.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k].next < 1) throw Error("transition row: next symbol must be >= 1");
      if (k > 0 && row[k].next == row[k - 1].next)
        throw Error("duplicate successor " + std::to_string(row[k].next) +
                    " in transition row");
      probs.push_back(row[k].prob);
    }
    detail::check_and_normalize(probs, tolerance, "transition row");
    for (std::size_t k = 0; k < row.size(); ++k) row[k].prob = probs[k];
    auto [it, inserted] = rows_.try_emplace(context, std::move(row));
    if (!inserted) throw Error("duplicate transition context");
    entry_count_ += it->second.size();
  }

  const Row* row(const Context& context) const {
    auto it = rows_.find(context);
    return it == rows_.end() ? nullptr : &it->second;
  }

  bool contains(const Context& context) const { return rows_.count(context) > 0; }
  bool empty() const { return rows_.empty(); }
  std::size_t context_count() const { return rows_.size(); }
  std::size_t entry_count() const { return entry_count_; }
  std::size_t order() const { return order_; }
  const Map& rows() const { return rows_; }

  /// Contexts in lexicographic order, for deterministic serialization.
  std::vector<const Context*> sorted_contexts() const {
    std::vector<const Context*> out;
    out.reserve(rows_.size());
    for (const auto& [ctx, row] : rows_) out.push_back(&ctx);
    std::sort(out.begin(), out.end(),
              [](const Context* a, const Context* b) { return *a < *b; });
    return out;
  }

 private:
  Map rows_;
  std::size_t entry_count_ = 0;
  std::size_t order_ = 0;
};

/// Empirical distribution over the length-m contexts observed in a trace;
/// used to draw the preliminary sequence that seeds generation.
class InitialDistribution {
 public:
  struct Entry {
    Context context;
    double prob = 0.0;
  };

  InitialDistribution() = default;

  static InitialDistribution from_entries(std::vector<Entry> entries,
                                          double tolerance = kDefaultRowTolerance) {
    if (entries.empty()) throw Error("initial distribution must not be empty");
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.context < b.context; });
    const std::size_t m = entries.front().context.size();
    std::vector<double> probs;
    probs.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      detail::check_context(entries[k].context, "initial distribution");
      if (entries[k].context.size() != m)
        throw Error("initial distribution contexts differ in length");
      if (k > 0 && entries[k].context == entries[k - 1].context)
        throw Error("duplicate context in initial distribution");
      probs.push_back(entries[k].prob);
    }
    detail::check_and_normalize(probs, tolerance, "initial distribution");
    InitialDistribution d;
    d.entries_ = std::move(entries);
    d.cumulative_.reserve(d.entries_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < d.entries_.size(); ++k) {
      d.entries_[k].prob = probs[k];
      acc += probs[k];
      d.cumulative_.push_back(acc);
    }
    return d;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t order() const { return entries_.empty() ? 0 : entries_.front().context.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  double prob(const Context& context) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), context,
                               [](const Entry& e, const Context& c) { return e.context < c; });
    if (it == entries_.end() || it->context != context) return 0.0;
    return it->prob;
  }

  /// Inverse-CDF draw; u must be in [0, 1). The final entry absorbs any
  /// floating-point residue.
  const Context& sample(double u) const {
    if (entries_.empty()) throw Error("initial distribution is empty");
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k >= entries_.size()) k = entries_.size() - 1;
    return entries_[k].context;
  }

 private:
  std::vector<Entry> entries_;       // sorted by context
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct Model {
  ModelSpec spec;
  InitialDistribution initial;
  TransitionTable transitions;
  std::string label;

  /// Structural consistency: orders match, every symbol fits the alphabet.
  void validate() const {
    spec.validate();
    if (transitions.empty()) throw Error("model has no transition rows");
    if (initial.empty()) throw Error("model has no initial distribution");
    if (transitions.order() != static_cast<std::size_t>(spec.order))
      throw Error("transition table order " + std::to_string(transitions.order()) +
                  " does not match spec order " + std::to_string(spec.order));
    if (initial.order() != static_cast<std::size_t>(spec.order))
      throw Error("initial distribution order does not match spec order");
    const std::size_t a = spec.alphabet_size();
    auto check = [a](Symbol s) {
      if (s < 1 || s > a)
        throw Error("symbol " + std::to_string(s) + " out of alphabet range 1.." +
                    std::to_string(a));
    };
    for (const auto& [ctx, row] : transitions.rows()) {
      for (Symbol s : ctx) check(s);
      for (const auto& e : row) check(e.next);
    }
    for (const auto& e : initial.entries()) {
      for (Symbol s : e.context) check(s);
    }
  }

  /// Contexts that appear in the initial distribution but have no transition
  /// row: the trailing window of a fitted trace.
  std::size_t dead_end_context_count() const {
    std::size_t n = 0;
    for (const auto& e : initial.entries()) {
      if (!transitions.contains(e.context)) ++n;
    }
    return n;
  }
};

}  // namespace camgen
