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

#include "tnco/config.h"

#include <gtest/gtest.h>

namespace tnco {
namespace {

TEST(RunConfigTest, ModeDefaults) {
  RunConfig single = DefaultRunConfig(TrainMode::kSingle);
  EXPECT_EQ(single.gnn.layers, 4);
  EXPECT_EQ(single.gnn.hidden, 256);
  EXPECT_EQ(single.train.rollout_steps, 2096);
  RunConfig multi = DefaultRunConfig(TrainMode::kMulti);
  EXPECT_EQ(multi.train.rollout_steps, 4192);
}

TEST(RunConfigTest, RoundTrip) {
  RunConfig cfg = DefaultRunConfig(TrainMode::kFixedSet);
  cfg.gnn.aggregation = Aggregation::kMax;
  cfg.gnn.epsilon = 0.05;
  cfg.train.optimizer = OptimizerKind::kAdam;
  cfg.train.features.robust = false;
  cfg.train.path_pruning = false;
  cfg.train.seed = 12345678901234ULL;
  cfg.generator.n = 17;
  RunConfig back = RunConfigFromJson(RunConfigToJson(cfg));
  EXPECT_EQ(RunConfigToJson(back), RunConfigToJson(cfg));
  EXPECT_EQ(back.mode, TrainMode::kFixedSet);
  EXPECT_EQ(back.gnn.aggregation, Aggregation::kMax);
  EXPECT_FALSE(back.train.features.robust);
  EXPECT_FALSE(back.train.path_pruning);
  EXPECT_EQ(back.train.seed, 12345678901234ULL);
  EXPECT_EQ(back.generator.n, 17);
}

TEST(RunConfigTest, PartialUsesModeDefaults) {
  RunConfig cfg =
      RunConfigFromJson(R"({"mode": "single", "train": {"ppo_epochs": 3}})");
  EXPECT_EQ(cfg.mode, TrainMode::kSingle);
  EXPECT_EQ(cfg.train.ppo_epochs, 3);
  EXPECT_EQ(cfg.train.batch_size, 256);
  EXPECT_EQ(cfg.gnn.hidden, 256);
}

TEST(RunConfigTest, Rejections) {
  EXPECT_THROW(RunConfigFromJson("{"), std::invalid_argument);
  EXPECT_THROW(RunConfigFromJson(R"({"trian": {}})"), std::invalid_argument);
  EXPECT_THROW(RunConfigFromJson(R"({"train": {"lr": 1}})"),
               std::invalid_argument);
  EXPECT_THROW(RunConfigFromJson(R"({"train": {"batch_size": "x"}})"),
               std::invalid_argument);
  EXPECT_THROW(RunConfigFromJson(R"({"train": {"batch_size": 0}})"),
               std::invalid_argument);
  EXPECT_THROW(RunConfigFromJson(R"({"gnn": {"aggregation": "median"}})"),
               std::invalid_argument);
  EXPECT_THROW(LoadRunConfig("/nonexistent/run.json"), std::exception);
}

TEST(RunConfigTest, MetaCarriesFeatures) {
  RunConfig cfg = DefaultRunConfig(TrainMode::kMulti);
  cfg.train.features = {true, false};
  const std::string meta = TrainMetaJson(cfg, 42.0);
  FeatureOptions f = FeaturesFromMeta(meta);
  EXPECT_TRUE(f.robust);
  EXPECT_FALSE(f.solver_features);
  EXPECT_TRUE(FeaturesFromMeta("").robust);
  EXPECT_NE(meta.find("42"), std::string::npos);
}

}  // namespace
}  // namespace tnco
