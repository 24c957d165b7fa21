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

#include <random>
#include <sstream>

#include "camgen/trace.hpp"
#include "fixtures.hpp"

using namespace camgen;

namespace {

std::vector<CamEvent> parse(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

std::string render(const std::vector<CamEvent>& events) {
  std::ostringstream out;
  write_trace(events, out);
  return out.str();
}

ModelSpec vw_spec(int order = 1) {
  return ModelSpec::complete(SizeSet::of({200, 300, 360, 455}), IntervalSet::standard(),
                             order);
}

}  // namespace

TEST_CASE("trace reader accepts plain rows with or without a header") {
  auto bare = parse("0.0,200\n101.2,300\n");
  REQUIRE(bare.size() == 2);
  CHECK(bare[0] == CamEvent{0.0, 200});
  CHECK(bare[1] == CamEvent{101.2, 300});

  auto with_header = parse("t_ms,size_bytes\n0.0,200\n101.2,300\n");
  CHECK(with_header == bare);

  auto with_symbols = parse("t_ms,size_bytes,symbol\n0.0,200,4\n101.2,300,2\n");
  CHECK(with_symbols == bare);
}

TEST_CASE("trace reader handles degenerate input") {
  CHECK(parse("").empty());
  CHECK(parse("t_ms,size_bytes\n").empty());
}

TEST_CASE("trace reader tolerates CRLF endings") {
  auto events = parse("t_ms,size_bytes\r\n0.0,200\r\n101.2,300\r\n");
  REQUIRE(events.size() == 2);
  CHECK(events[1] == CamEvent{101.2, 300});
}

TEST_CASE("trace reader rejects malformed and non-monotonic rows") {
  CHECK_THROWS_AS(parse("100,200\n50,200\n"), Error);
  CHECK_THROWS_AS(parse("100,200\n100.0,200\n"), Error);
  CHECK_THROWS_AS(parse("abc,200\n"), Error);
  CHECK_THROWS_AS(parse("1.0,-5\n"), Error);
  CHECK_THROWS_AS(parse("1.0\n"), Error);

  try {
    parse("t_ms,size_bytes\n1.0,200\nbroken\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("trace writer emits the documented format") {
  CHECK(render({{0.0, 200}}) == "t_ms,size_bytes\n0.000,200\n");
  CHECK(render({{100.0, 200}, {200.0, 300}}) ==
        "t_ms,size_bytes\n100.000,200\n200.000,300\n");
  CHECK_THROWS_AS(render({{5.0, 200}, {4.0, 200}}), Error);

  std::ostringstream out;
  std::vector<CamEvent> events = {{100.0, 200}};
  std::vector<Symbol> symbols = {7};
  write_trace(events, out, symbols);
  CHECK(out.str() == "t_ms,size_bytes,symbol\n100.000,200,7\n");
}

TEST_CASE("trace round-trips exactly at the printed precision") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> step_us(1, 2000000);
  std::uniform_int_distribution<int> size(1, 1000);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<CamEvent> events;
    long long t_us = 0;
    std::uniform_int_distribution<int> len(0, 40);
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      t_us += step_us(rng);  // whole microseconds: representable at 3 decimals
      events.push_back({static_cast<double>(t_us) / 1000.0, size(rng)});
    }
    CHECK(parse(render(events)) == events);
  }
}

TEST_CASE("quantization maps sizes and inter-arrivals onto the alphabet") {
  auto spec = vw_spec();

  SECTION("interval snaps to the nearest member with the residual recorded") {
    std::vector<CamEvent> events = {{0.0, 200}, {101.2, 300}};
    auto qt = quantize(events, spec);
    REQUIRE(qt.symbol_count() == 1);
    // size 300 -> i=2, interval 100 -> j=1 -> n=2
    CHECK(qt.flattened() == std::vector<Symbol>{2});
    REQUIRE(qt.residuals_ms.size() == 1);
    CHECK(qt.residuals_ms[0] == Catch::Approx(1.2).margin(1e-9));
    CHECK(qt.dropped == 0);
  }

  SECTION("exact sizes hit their own index") {
    std::vector<CamEvent> events = {{0.0, 200}, {100.0, 455}};
    auto qt = quantize(events, spec);
    CHECK(spec.size_index_of(qt.flattened()[0]) == 4);
  }

  SECTION("sizes snap within the tolerance") {
    std::vector<CamEvent> events = {{0.0, 200}, {100.0, 280}};
    auto qt = quantize(events, spec);
    // |280-300| = 20 <= 30 -> snapped to 300
    CHECK(spec.size_bytes_of(qt.flattened()[0]) == 300);
  }

  SECTION("sizes beyond the tolerance drop the event") {
    std::vector<CamEvent> events = {{0.0, 200}, {100.0, 150}, {200.0, 200}};
    auto qt = quantize(events, spec);
    CHECK(qt.dropped == 1);
    // event 3 still quantizes against the dropped event's timestamp
    REQUIRE(qt.symbol_count() == 1);
    CHECK(spec.size_bytes_of(qt.flattened()[0]) == 200);
    CHECK(spec.interval_ms_of(qt.flattened()[0]) == 100);
  }

  SECTION("a mid-trace drop breaks the window chain") {
    std::vector<CamEvent> events = {
        {0.0, 200}, {100.0, 300}, {200.0, 150}, {300.0, 360}, {400.0, 455}};
    auto qt = quantize(events, spec);
    CHECK(qt.dropped == 1);
    REQUIRE(qt.segments.size() == 2);
    CHECK(qt.segments[0].size() == 1);
    CHECK(qt.segments[1].size() == 2);
    CHECK(qt.symbol_count() == events.size() - 1 - qt.dropped - qt.splits);
  }

  SECTION("short inter-arrivals clamp up to min(G)") {
    std::vector<CamEvent> events = {{0.0, 200}, {40.0, 200}};
    auto qt = quantize(events, spec);
    CHECK(qt.clamped == 1);
    CHECK(spec.interval_ms_of(qt.flattened()[0]) == 100);
    CHECK(qt.residuals_ms[0] == Catch::Approx(-60.0));
  }

  SECTION("long gaps split the trace into segments") {
    std::vector<CamEvent> events = {
        {0.0, 200}, {100.0, 200}, {1600.0, 200}, {1700.0, 200}};
    auto qt = quantize(events, spec);
    CHECK(qt.splits == 1);
    CHECK(qt.clamped == 0);
    REQUIRE(qt.segments.size() == 2);
    CHECK(qt.symbol_count() == 2);
  }

  SECTION("all events unmappable is an error") {
    std::vector<CamEvent> events = {{0.0, 500}, {100.0, 800}, {200.0, 900}};
    auto renault_like = ModelSpec::size_only(SizeSet::of({200}), 1);
    CHECK_THROWS_AS(quantize(events, renault_like), Error);
  }

  SECTION("fewer than two events cannot carry an interval") {
    std::vector<CamEvent> one = {{0.0, 200}};
    CHECK_THROWS_AS(quantize(one, spec), Error);
  }
}

TEST_CASE("size-only quantization maps every event") {
  auto spec = ModelSpec::size_only(SizeSet::of({200, 300}), 1);
  std::vector<CamEvent> events = {{0.0, 200}, {100.0, 300}, {200.0, 310}};
  auto qt = quantize(events, spec);
  CHECK(qt.flattened() == std::vector<Symbol>{1, 2, 2});
  CHECK(qt.residuals_ms.empty());

  std::vector<CamEvent> one = {{0.0, 300}};
  CHECK(quantize(one, spec).flattened() == std::vector<Symbol>{2});
}

TEST_CASE("interval-only quantization aligns residuals with symbols") {
  auto spec = ModelSpec::interval_only(IntervalSet::standard(), 1);
  std::vector<CamEvent> events = {{0.0, 999}, {98.5, 999}, {301.0, 999}};
  auto qt = quantize(events, spec);
  CHECK(qt.flattened() == std::vector<Symbol>{1, 2});
  REQUIRE(qt.residuals_ms.size() == 2);
  CHECK(qt.residuals_ms[0] == Catch::Approx(-1.5).margin(1e-9));
  CHECK(qt.residuals_ms[1] == Catch::Approx(2.5).margin(1e-9));
}

TEST_CASE("quantizing an already-quantized jitter-free trace is exact") {
  auto spec = vw_spec();
  std::vector<CamEvent> events;
  double t = 0.0;
  const int sizes[] = {200, 300, 360, 455};
  for (int k = 0; k < 32; ++k) {
    t += 100.0 * (k % 10 + 1);
    events.push_back({t, sizes[k % 4]});
  }
  auto qt = quantize(events, spec);
  CHECK(qt.dropped == 0);
  CHECK(qt.clamped == 0);
  CHECK(qt.splits == 0);
  CHECK(qt.symbol_count() == events.size() - 1);
  for (double r : qt.residuals_ms) CHECK(r == 0.0);

  // quantize(write/read round trip) is just as exact
  auto again = quantize(parse(render(events)), spec);
  CHECK(again.flattened() == qt.flattened());
}
