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

#ifndef TNCO_CONFIG_H_
#define TNCO_CONFIG_H_

#include <filesystem>
#include <string>

#include "tnco/generator.h"
#include "tnco/gnn.h"
#include "tnco/trainer.h"

namespace tnco {

// Everything a training run needs, read from a JSON file of the form
//   {"mode": "single", "gnn": {...}, "train": {...}, "generator": {...}}
// Every section and key is optional; missing keys keep the defaults of the
// chosen mode. Unknown keys are rejected.
struct RunConfig {
  TrainMode mode = TrainMode::kMulti;
  GnnConfig gnn;
  TrainConfig train;
  GeneratorConfig generator;
};

// Multi and fixed-set modes use the struct defaults; single mode uses four
// 256-wide layers and SingleNetworkDefaults().
RunConfig DefaultRunConfig(TrainMode mode);

std::string RunConfigToJson(const RunConfig& cfg);
// Throws std::invalid_argument on malformed JSON, unknown keys, wrong value
// types or values that fail the per-struct checks.
RunConfig RunConfigFromJson(const std::string& text);
RunConfig LoadRunConfig(const std::filesystem::path& file);

// Checkpoint metadata: the run config plus the resolved reward scale.
std::string TrainMetaJson(const RunConfig& cfg, double reward_scale);
// Feature settings stored by TrainMetaJson; defaults when absent.
FeatureOptions FeaturesFromMeta(const std::string& meta_json);

}  // namespace tnco

#endif  // TNCO_CONFIG_H_
