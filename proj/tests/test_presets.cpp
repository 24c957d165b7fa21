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

#include "camgen/presets.hpp"

using namespace camgen;

TEST_CASE("the eight measurement presets carry the campaign parameters") {
  REQUIRE(presets().size() == 8);

  const std::vector<int> vw = {200, 300, 360, 455};
  const std::vector<int> renault = {200, 330, 480, 600, 800};

  struct Expected {
    const char* name;
    const std::vector<int>* sizes;
    double sigma;
  };
  const Expected expected[] = {
      {"vw-urban", &vw, 3.235},          {"vw-suburban", &vw, 3.814},
      {"vw-highway", &vw, 3.444},        {"vw-universal", &vw, 3.553},
      {"renault-urban", &renault, 2.817}, {"renault-suburban", &renault, 2.769},
      {"renault-highway", &renault, 2.711}, {"renault-universal", &renault, 2.783},
  };
  for (const auto& e : expected) {
    const Preset& p = preset(e.name);
    CHECK(p.size_bytes == *e.sizes);
    CHECK(p.jitter_std_ms == e.sigma);
  }
}

TEST_CASE("preset specs expose the expected alphabets") {
  auto vw = preset_spec(preset("vw-highway"), ModelMode::Complete, 5);
  CHECK(vw.alphabet_size() == 40);
  CHECK(vw.intervals.cardinality() == 10);
  CHECK(vw.jitter_std_ms == 3.444);

  auto renault = preset_spec(preset("renault-universal"), ModelMode::Complete, 1);
  CHECK(renault.alphabet_size() == 50);

  auto size_spec = preset_spec(preset("vw-urban"), ModelMode::SizeOnly, 2);
  CHECK(size_spec.alphabet_size() == 4);
  CHECK(size_spec.jitter_std_ms == 0.0);

  auto interval_spec = preset_spec(preset("renault-highway"), ModelMode::IntervalOnly, 1);
  CHECK(interval_spec.alphabet_size() == 10);
  CHECK(interval_spec.jitter_std_ms == 2.711);
}

TEST_CASE("unknown presets are rejected") {
  CHECK(find_preset("vw-highway") != nullptr);
  CHECK(find_preset("bmw-autobahn") == nullptr);
  CHECK_THROWS_AS(preset("bmw-autobahn"), Error);
  CHECK(preset_names().size() == 8);
}
