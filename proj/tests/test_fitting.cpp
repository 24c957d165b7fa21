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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "camgen/fitting.hpp"
#include "fixtures.hpp"

using namespace camgen;
using camtest::trace_from_symbols;

namespace {

ModelSpec four_symbol_spec(int order) {
  return ModelSpec::complete(SizeSet::of({200, 400}), IntervalSet::of({100, 200}, 100),
                             order);
}

double row_prob(const Model& model, const Context& ctx, Symbol next) {
  const auto* row = model.transitions.row(ctx);
  REQUIRE(row != nullptr);
  for (const auto& e : *row) {
    if (e.next == next) return e.prob;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("order-1 fit counts transitions exactly") {
  SECTION("strictly alternating symbols") {
    auto result = fit(trace_from_symbols({1, 2, 1, 2, 1, 2, 1}, four_symbol_spec(1)));
    CHECK(row_prob(result.model, {1}, 2) == 1.0);
    CHECK(row_prob(result.model, {2}, 1) == 1.0);
    CHECK(result.model.transitions.entry_count() == 2);
  }

  SECTION("mixed successors") {
    auto result = fit(trace_from_symbols({1, 1, 2, 1, 1, 2}, four_symbol_spec(1)));
    CHECK(row_prob(result.model, {1}, 1) == 0.5);
    CHECK(row_prob(result.model, {1}, 2) == 0.5);
    CHECK(row_prob(result.model, {2}, 1) == 1.0);
  }
}

TEST_CASE("initial distribution counts overlapping windows") {
  auto result = fit(trace_from_symbols({1, 1, 2, 1, 1, 2}, four_symbol_spec(2)));
  const auto& initial = result.model.initial;
  CHECK(initial.size() == 3);
  CHECK(initial.prob({1, 1}) == Catch::Approx(0.4));
  CHECK(initial.prob({1, 2}) == Catch::Approx(0.4));
  CHECK(initial.prob({2, 1}) == Catch::Approx(0.2));
  CHECK(result.context_windows == 5);
}

TEST_CASE("count table tracks occurrences and row totals") {
  CountTable counts;
  counts.add({1, 2}, 3);
  counts.add({1, 2}, 3);
  counts.add({1, 2}, 4);
  counts.add({2, 2}, 1);
  CHECK(counts.count({1, 2}, 3) == 2);
  CHECK(counts.count({1, 2}, 4) == 1);
  CHECK(counts.count({1, 2}, 9) == 0);
  CHECK(counts.row_total({1, 2}) == 3);
  CHECK(counts.row_total({9, 9}) == 0);
  CHECK(counts.total() == 4);
}

TEST_CASE("count conservation and row normalization on random traces") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> order_dist(1, 4);
    std::uniform_int_distribution<int> len_dist(20, 400);
    std::uniform_int_distribution<Symbol> sym_dist(1, 4);
    const int m = order_dist(rng);
    const int len = len_dist(rng);
    std::vector<Symbol> symbols;
    for (int k = 0; k < len; ++k) symbols.push_back(sym_dist(rng));

    auto result = fit(trace_from_symbols(symbols, four_symbol_spec(m)));
    CHECK(result.counts.total() == static_cast<std::uint64_t>(len - m));
    CHECK(result.transition_windows == static_cast<std::size_t>(len - m));
    CHECK(result.context_windows == static_cast<std::size_t>(len - m + 1));

    for (const auto& [ctx, row] : result.model.transitions.rows()) {
      double sum = 0.0;
      for (const auto& e : row) sum += e.prob;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    double initial_sum = 0.0;
    for (const auto& e : result.model.initial.entries()) initial_sum += e.prob;
    CHECK(std::abs(initial_sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("every window except the final one is a transition context") {
  auto result = fit(trace_from_symbols({1, 2, 3, 4, 2, 3}, four_symbol_spec(2)));
  const auto& model = result.model;
  for (const auto& e : model.initial.entries()) {
    if (e.context == Context{2, 3}) continue;  // trailing window, may dead-end
    CHECK(model.transitions.contains(e.context));
  }
  // {2,3} occurs mid-trace too, so here even the trailing window has a row
  CHECK(result.dead_end_contexts == 0);

  auto with_dead_end = fit(trace_from_symbols({1, 2, 3, 4}, four_symbol_spec(2)));
  CHECK(with_dead_end.dead_end_contexts == 1);
  CHECK_FALSE(with_dead_end.model.transitions.contains({3, 4}));
  CHECK(with_dead_end.model.initial.prob({3, 4}) > 0.0);
}

TEST_CASE("traces not longer than m are rejected") {
  CHECK_THROWS_AS(fit(trace_from_symbols({1, 2}, four_symbol_spec(2))), Error);
  CHECK_THROWS_AS(fit(trace_from_symbols({1}, four_symbol_spec(1))), Error);
  CHECK_NOTHROW(fit(trace_from_symbols({1, 2, 1}, four_symbol_spec(2))));
}

TEST_CASE("segments are fitted jointly but windows never span a boundary") {
  QuantizedTrace qt;
  qt.spec = four_symbol_spec(1);
  qt.segments = {{1, 2}, {2, 1}};
  qt.source_events = 5;
  auto result = fit(qt);
  CHECK(result.counts.total() == 2);  // (1,2) and (2,1); nothing across the gap
  CHECK(row_prob(result.model, {1}, 2) == 1.0);
  CHECK(row_prob(result.model, {2}, 1) == 1.0);
}

TEST_CASE("jitter estimator halves the residual variance") {
  std::mt19937_64 rng(5);
  const double sigma = 3.444;
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<double> jitters(20001);
  for (double& j : jitters) j = gauss(rng);
  std::vector<double> residuals;
  for (std::size_t k = 1; k < jitters.size(); ++k)
    residuals.push_back(jitters[k] - jitters[k - 1]);
  const double est = jitter_std_from_residuals(residuals);
  CHECK(est == Catch::Approx(sigma).epsilon(0.05));
  CHECK_THROWS_AS(jitter_std_from_residuals(std::vector<double>{1.0}), Error);
}

TEST_CASE("projection applies the index equations per symbol") {
  auto spec = ModelSpec::complete(SizeSet::of({200, 300, 360, 455}),
                                  IntervalSet::standard(), 1);
  auto qt = trace_from_symbols({13, 6, 15}, spec);

  auto intervals = project(qt, ModelMode::IntervalOnly);
  CHECK(intervals.flattened() == std::vector<Symbol>{4, 2, 4});
  CHECK(intervals.spec.mode == ModelMode::IntervalOnly);

  auto sizes = project(qt, ModelMode::SizeOnly);
  CHECK(sizes.flattened() == std::vector<Symbol>{1, 2, 3});
  CHECK(sizes.spec.mode == ModelMode::SizeOnly);
  CHECK(sizes.residuals_ms.empty());

  CHECK_THROWS_AS(project(sizes, ModelMode::IntervalOnly), Error);
}

TEST_CASE("separate fit equals the ordinary fit of the projected stream") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<Symbol> sym_dist(1, 8);
  std::vector<Symbol> symbols;
  for (int k = 0; k < 500; ++k) symbols.push_back(sym_dist(rng));
  auto spec = ModelSpec::complete(SizeSet::of({200, 400}),
                                  IntervalSet::of({100, 200, 300, 400}, 100), 1);
  auto qt = trace_from_symbols(symbols, spec);

  auto sep = fit_separate(qt, ModelSpec::size_only(SizeSet::of({200, 400}), 1));
  auto direct = fit(project(qt, ModelMode::SizeOnly));
  CHECK(sep.model.transitions.entry_count() == direct.model.transitions.entry_count());
  for (const auto& [ctx, row] : direct.model.transitions.rows()) {
    for (const auto& e : row) {
      CHECK(row_prob(sep.model, ctx, e.next) == e.prob);
    }
  }
  CHECK(sep.model.spec.jitter_std_ms == 0.0);

  auto sep_interval = fit_separate(
      qt, ModelSpec::interval_only(IntervalSet::of({100, 200, 300, 400}, 100), 1));
  CHECK(sep_interval.model.spec.mode == ModelMode::IntervalOnly);

  CHECK_THROWS_AS(fit_separate(qt, spec), Error);
  CHECK_THROWS_AS(
      fit_separate(qt, ModelSpec::size_only(SizeSet::of({100, 400}), 1)), Error);
}

TEST_CASE("order-1 recovery from an oracle-sampled chain") {
  camtest::OracleRows truth = {
      {1, {{1, 0.1}, {2, 0.2}, {3, 0.3}, {4, 0.4}}},
      {2, {{1, 0.25}, {2, 0.25}, {3, 0.25}, {4, 0.25}}},
      {3, {{2, 0.5}, {4, 0.5}}},
      {4, {{1, 0.7}, {3, 0.3}}},
  };
  auto symbols = camtest::oracle_chain(truth, 1, 200000, 99);
  auto result = fit(trace_from_symbols(symbols, four_symbol_spec(1)));
  for (const auto& [prev, row] : truth) {
    for (const auto& [next, p] : row) {
      CHECK(row_prob(result.model, {prev}, next) == Catch::Approx(p).margin(0.02));
    }
  }
}

TEST_CASE("size-bin detection finds histogram peaks") {
  SECTION("single mode") {
    std::vector<CamEvent> events;
    for (int k = 0; k < 100; ++k) events.push_back({k * 100.0, 200});
    auto s = detect_size_bins(events);
    CHECK(s.bytes() == std::vector<int>{200});
  }

  SECTION("four-mode mixture with noise") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> noise(-3, 3);
    std::vector<CamEvent> events;
    for (int k = 0; k < 20000; ++k) {
      const double u = unit(rng);
      int base = u < 0.4 ? 200 : u < 0.7 ? 300 : u < 0.9 ? 360 : 455;
      events.push_back({k * 100.0, base + noise(rng)});
    }
    auto s = detect_size_bins(events, 10, 0.05);
    REQUIRE(s.cardinality() == 4);
    const int expected[] = {200, 300, 360, 455};
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(std::abs(s.bytes()[k] - expected[k]) <= 10);
  }

  SECTION("flat histogram has no qualifying peak") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> size(200, 800);
    std::vector<CamEvent> events;
    for (int k = 0; k < 10000; ++k) events.push_back({k * 100.0, size(rng)});
    CHECK_THROWS_AS(detect_size_bins(events, 10, 0.05), Error);
  }

  SECTION("empty input is an error") {
    CHECK_THROWS_AS(detect_size_bins(std::vector<CamEvent>{}), Error);
  }
}
