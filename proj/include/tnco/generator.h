// Copyright 2026 The tnco Authors
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

#ifndef TNCO_GENERATOR_H_
#define TNCO_GENERATOR_H_

#include <cstdint>

#include "tnco/network.h"

namespace tnco {

struct GeneratorConfig {
  int n = 25;
  double mean_degree = 3.0;
  Extent extent_low = 2;
  Extent extent_high = 6;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for n < 2, extent_low < 2,
// extent_high < extent_low or a non-positive mean degree.
void CheckGeneratorConfig(const GeneratorConfig& cfg);

// Random connected network with closed indices only. A uniform random
// spanning tree (decoded from a random Pruefer sequence) guarantees
// connectivity; further distinct node pairs are linked until the edge count
// reaches round(n * mean_degree / 2), capped at the complete graph. Every
// link is a fresh index with extent uniform on [extent_low, extent_high].
// Deterministic for a fixed config.
TensorNetwork RandomNetwork(const GeneratorConfig& cfg);

}  // namespace tnco

#endif  // TNCO_GENERATOR_H_
