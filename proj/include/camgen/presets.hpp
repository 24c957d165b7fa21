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

#include <string>
#include <string_view>
#include <vector>

#include "camgen/error.hpp"
#include "camgen/model.hpp"

namespace camgen {

/// Measurement-campaign parameter bundles: the per-OEM size alphabets, the
/// ETSI interval range and the per-scenario jitter standard deviations. A
/// preset fixes the alphabet for fitting (the fitted sigma then replaces the
/// bundled one) and provides defaults for matrix imports.
struct Preset {
  std::string_view name;
  std::string_view oem;
  std::string_view scenario;
  std::vector<int> size_bytes;
  double jitter_std_ms = 0.0;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<int> vw = {200, 300, 360, 455};
  static const std::vector<int> renault = {200, 330, 480, 600, 800};
  static const std::vector<Preset> all = {
      {"vw-urban", "volkswagen", "urban", vw, 3.235},
      {"vw-suburban", "volkswagen", "suburban", vw, 3.814},
      {"vw-highway", "volkswagen", "highway", vw, 3.444},
      {"vw-universal", "volkswagen", "universal", vw, 3.553},
      {"renault-urban", "renault", "urban", renault, 2.817},
      {"renault-suburban", "renault", "suburban", renault, 2.769},
      {"renault-highway", "renault", "highway", renault, 2.711},
      {"renault-universal", "renault", "universal", renault, 2.783},
  };
  return all;
}

inline const Preset* find_preset(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

inline const Preset& preset(std::string_view name) {
  const Preset* p = find_preset(name);
  if (p == nullptr) throw Error("unknown preset '" + std::string(name) + "'");
  return *p;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : presets()) names.emplace_back(p.name);
  return names;
}

inline ModelSpec preset_spec(const Preset& p, ModelMode mode, int order) {
  switch (mode) {
    case ModelMode::Complete:
      return ModelSpec::complete(SizeSet::of(p.size_bytes), IntervalSet::standard(),
                                 order, p.jitter_std_ms);
    case ModelMode::SizeOnly:
      return ModelSpec::size_only(SizeSet::of(p.size_bytes), order);
    case ModelMode::IntervalOnly:
      return ModelSpec::interval_only(IntervalSet::standard(), order, p.jitter_std_ms);
  }
  throw Error("unknown model mode");
}

}  // namespace camgen
