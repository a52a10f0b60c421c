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

#include "tnco/trainer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "test_util.h"
#include "tnco/solvers.h"

namespace tnco {
namespace {

GnnConfig Tiny() {
  GnnConfig g;
  g.layers = 2;
  g.hidden = 8;
  return g;
}

TrainConfig SmallTrain() {
  TrainConfig c;
  c.rollout_steps = 64;
  c.batch_size = 32;
  c.ppo_epochs = 2;
  c.num_envs = 8;
  c.optimistic_buffer_size = 32;
  c.optimistic_capacity = 256;
  c.total_samples = 300;
  c.inference_paths = 8;
  c.inference_every = 2;
  c.reward_scale = 0;
  return c;
}

EpisodeSource Fixed(const TensorNetwork& net) {
  return [net](std::mt19937_64&) { return std::make_pair(net, 0); };
}

TEST(MixSeedTest, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t k = 0; k < 100; ++k) seen.insert(MixSeed(s, k));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(MixSeed(3, 9), MixSeed(3, 9));
}

TEST(OptimizerTest, SgdAndAdamSteps) {
  PolicyParams p = InitParams(Tiny(), 1);
  PolicyParams start = p;
  std::vector<Eigen::MatrixXd> grads;
  for (const auto& t : p.tensors) {
    grads.push_back(Eigen::MatrixXd::Constant(t.rows(), t.cols(), 2.0));
  }
  Optimizer sgd(OptimizerKind::kSgd, 0.1);
  sgd.Apply(p, grads);
  EXPECT_TRUE(p.tensors[0].isApprox((start.tensors[0].array() - 0.2).matrix()));

  PolicyParams q = start;
  Optimizer adam(OptimizerKind::kAdam, 0.01);
  adam.Apply(q, grads);
  // The first bias-corrected Adam step moves every entry by about lr.
  EXPECT_NEAR((start.tensors[0] - q.tensors[0]).maxCoeff(), 0.01, 1e-6);
  EXPECT_NEAR((start.tensors[0] - q.tensors[0]).minCoeff(), 0.01, 1e-6);
}

TEST(OptimizerTest, ClipGradNorm) {
  std::vector<Eigen::MatrixXd> g = {Eigen::MatrixXd::Constant(1, 1, 3),
                                    Eigen::MatrixXd::Constant(1, 1, 4)};
  EXPECT_DOUBLE_EQ(ClipGradNorm(g, 1), 5);
  EXPECT_NEAR(g[0](0, 0), 0.6, 1e-12);
  EXPECT_NEAR(g[1](0, 0), 0.8, 1e-12);
  EXPECT_NEAR(ClipGradNorm(g, 0), 1, 1e-12);
}

TEST(ConfigTest, ChecksAndParsers) {
  TrainConfig c;
  EXPECT_NO_THROW(CheckTrainConfig(c));
  c.optimistic_capacity = c.optimistic_buffer_size - 1;
  EXPECT_THROW(CheckTrainConfig(c), std::invalid_argument);
  EXPECT_EQ(ParseTrainMode("fixed"), TrainMode::kFixedSet);
  EXPECT_EQ(ParseOptimizer(OptimizerName(OptimizerKind::kAdam)),
            OptimizerKind::kAdam);
  EXPECT_THROW(ParseTrainMode("both"), std::invalid_argument);
}

TEST(RolloutTest, UnprunedEpisodesAreComplete) {
  TensorNetwork net = testing::Random(8, 2);
  PolicyParams p = InitParams(Tiny(), 1);
  PathRegistry reg;
  reg.best.resize(1);
  TrainConfig cfg = SmallTrain();
  cfg.path_pruning = false;
  std::mt19937_64 rng(1);
  Rollout r = CollectRollouts(p, Fixed(net), reg, cfg, 100.0, rng);
  EXPECT_GE(static_cast<int>(r.records.size()), cfg.rollout_steps);
  std::size_t total = 0;
  Flops best = kInfiniteCost;
  for (const Episode& ep : r.episodes) {
    EXPECT_FALSE(ep.pruned);
    ASSERT_EQ(ep.records.size(), 7u);
    total += ep.records.size();
    double sum = 0, reward = 0;
    for (int k : ep.records) {
      sum += r.records[k].cost;
      reward += r.records[k].reward;
      EXPECT_LE(r.records[k].log_prob, 0);
    }
    EXPECT_TRUE(r.records[ep.records.back()].terminal);
    EXPECT_EQ(sum, ep.cost);
    EXPECT_EQ(PathCost(net, ep.path), ep.cost);
    EXPECT_NEAR(reward, -ep.cost / 100.0, 1e-9 * ep.cost);
    best = std::min(best, ep.cost);
  }
  EXPECT_EQ(total, r.records.size());
  EXPECT_EQ(reg.best_cost(0), best);
}

TEST(RolloutTest, PruningAttachesTerminationValue) {
  TensorNetwork net = testing::Random(8, 2);
  PolicyParams p = InitParams(Tiny(), 1);
  PathRegistry reg;
  reg.best.resize(1);
  ContractionPath cheap = GreedySolve(net);
  cheap.total_cost = 1;  // below any single step
  reg.best[0] = cheap;
  TrainConfig cfg = SmallTrain();
  std::mt19937_64 rng(2);
  Rollout r = CollectRollouts(p, Fixed(net), reg, cfg, 100.0, rng);
  for (const Episode& ep : r.episodes) {
    EXPECT_TRUE(ep.pruned);
    ASSERT_EQ(ep.records.size(), 1u);
    const RolloutRecord& rec = r.records[ep.records[0]];
    ASSERT_TRUE(rec.termination_value);
    EXPECT_GT(*rec.termination_value, 0);
  }
  EXPECT_EQ(reg.best_cost(0), 1);
}

Rollout HandRollout() {
  Rollout r;
  Episode done;
  Episode cut;
  cut.pruned = true;
  for (int k = 0; k < 3; ++k) {
    RolloutRecord rec;
    rec.reward = -(k + 1);
    rec.value = -2;
    done.records.push_back(static_cast<int>(r.records.size()));
    r.records.push_back(rec);
  }
  RolloutRecord rec;
  rec.reward = -1;
  rec.termination_value = 50;
  cut.records.push_back(static_cast<int>(r.records.size()));
  r.records.push_back(rec);
  r.episodes = {done, cut};
  return r;
}

TEST(AdvantageTest, PlainReturns) {
  TrainConfig cfg;
  Advantages a = ComputeAdvantages(HandRollout(), cfg, 10.0);
  EXPECT_EQ(a.returns, (std::vector<double>{-6, -5, -3, -6}));
  EXPECT_EQ(a.advantage, (std::vector<double>{-4, -3, -1, -6}));
}

TEST(AdvantageTest, GaeWithUnitLambdaMatchesPlain) {
  TrainConfig cfg;
  cfg.use_gae = true;
  cfg.gae_lambda = 1;
  Advantages g = ComputeAdvantages(HandRollout(), cfg, 10.0);
  Advantages p = ComputeAdvantages(HandRollout(), TrainConfig{}, 10.0);
  for (std::size_t k = 0; k < g.advantage.size(); ++k) {
    EXPECT_NEAR(g.advantage[k], p.advantage[k], 1e-12);
  }
}

TEST(PpoTest, ZeroAdvantageLeavesActorUnchanged) {
  PolicyParams p = InitParams(Tiny(), 3);
  PolicyParams start = p;
  GraphBatch b = BuildBatch(testing::Random(6, 1));
  const double lp = std::log(Evaluate(p, b).probs[0]);
  std::vector<PpoSample> s = {{&b, 0, lp, 0.0, -1.0}};
  TrainConfig cfg;
  Optimizer opt(OptimizerKind::kSgd, 0.1);
  PpoStep(p, opt, s, cfg, false);
  for (std::size_t t = 0; t < p.tensors.size(); ++t) {
    if (p.names[t].rfind("actor.", 0) == 0) {
      EXPECT_EQ(p.tensors[t], start.tensors[t]) << p.names[t];
    }
  }
  EXPECT_NE(p.tensors.back(), start.tensors.back());  // value head moved
}

TEST(PpoTest, PositiveAdvantageRaisesProbability) {
  PolicyParams p = InitParams(Tiny(), 4);
  GraphBatch b = BuildBatch(testing::Random(5, 2));
  ASSERT_GE(b.num_edges(), 2);
  const double before = Evaluate(p, b).probs[0];
  TrainConfig cfg;
  Optimizer opt(OptimizerKind::kAdam, 1e-2);
  for (int k = 0; k < 50; ++k) {
    PolicyOutput o = Evaluate(p, b);
    std::vector<PpoSample> s = {{&b, 0, std::log(o.probs[0]), 1.0, 0},
                                {&b, 1, std::log(o.probs[1]), -1.0, 0}};
    PpoStep(p, opt, s, cfg, false);
  }
  EXPECT_GT(Evaluate(p, b).probs[0], before + 0.1);
}

TEST(OptimisticBufferTest, EmptyAndZeroScores) {
  PolicyParams p = InitParams(Tiny(), 1);
  OptimisticBuffer buf(16);
  EXPECT_TRUE(buf.Refresh(p, {}, 1.0).empty());
  std::mt19937_64 rng(1);
  EXPECT_TRUE(OptimisticBuffer::Draw(std::vector<double>{0, 0}, 10, rng)
                  .empty());
  TrainConfig cfg = SmallTrain();
  Optimizer opt(OptimizerKind::kSgd, 0.1);
  EXPECT_FALSE(OptimisticUpdate(p, opt, buf, Rollout{}, cfg, 1.0, rng));
}

TEST(OptimisticBufferTest, DrawIsProportional) {
  std::mt19937_64 rng(5);
  const std::vector<double> scores = {1, 0, 3};
  std::vector<int> counts(3);
  for (int k : OptimisticBuffer::Draw(scores, 20000, rng)) ++counts[k];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / 20000.0, 0.25, 0.02);
}

TEST(OptimisticBufferTest, RefreshKeepsCheapestUpToCapacity) {
  GnnConfig g = Tiny();
  g.use_bias = true;
  PolicyParams p = ZeroLike(InitParams(g, 1));
  // Critic outputs -10 everywhere: every cost-to-go under 10 scores.
  p.tensors[p.index_of("value.b")].setConstant(-10);
  TensorNetwork net = testing::Chain();
  OptimisticBuffer buf(2);
  for (Flops c : {12.0, 3.0, 7.0, 1.0}) {
    buf.Add({net, net.edges()[0], c, c});
  }
  std::vector<double> scores = buf.Refresh(p, {}, 1.0);
  ASSERT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf.samples()[0].cost_to_go, 3);
  EXPECT_EQ(buf.samples()[1].cost_to_go, 1);
  EXPECT_NEAR(scores[0], 7, 1e-12);
  EXPECT_NEAR(scores[1], 9, 1e-12);
}

// Stored cost-to-go comes from a real completion, so it never beats the
// optimum of the graph it starts from.
TEST(OptimisticBufferTest, CostToGoIsPessimistic) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TensorNetwork net = testing::Random(6, seed);
    PolicyParams p = InitParams(Tiny(), seed);
    PathRegistry reg;
    reg.best.resize(1);
    TrainConfig cfg = SmallTrain();
    std::mt19937_64 rng(seed);
    Rollout r = CollectRollouts(p, Fixed(net), reg, cfg, 1.0, rng);
    OptimisticBuffer buf(100000);
    buf.Merge(r);
    ASSERT_GT(buf.size(), 0u);
    for (const auto& s : buf.samples()) {
      EXPECT_GE(s.cost_to_go, OptimalCost(s.graph));
      EXPECT_EQ(s.cost, EdgeCost(s.graph, s.edge));
      TensorNetwork after = ContractEdge(s.graph, s.edge.u, s.edge.v).network;
      EXPECT_GE(s.cost_to_go - s.cost, OptimalCost(after));
    }
  }
}

TEST(InferTest, ArgmaxIsDeterministic) {
  TensorNetwork net = testing::Random(10, 1);
  PolicyParams p = InitParams(Tiny(), 2);
  InferOptions o;
  o.argmax = true;
  o.paths = 3;
  ContractionPath a = Infer(p, net, o);
  o.seed = 99;
  EXPECT_EQ(Infer(p, net, o).steps, a.steps);
  EXPECT_TRUE(IsComplete(net, a));
}

TEST(InferTest, MorePathsNeverHurt) {
  TensorNetwork net = testing::Random(12, 3);
  PolicyParams p = InitParams(Tiny(), 2);
  Flops last = kInfiniteCost;
  for (int paths : {1, 5, 20, 80, 200}) {
    InferOptions o;
    o.paths = paths;
    o.seed = 4;
    const Flops c = Infer(p, net, o).total_cost;
    EXPECT_LE(c, last);
    last = c;
  }
}

TEST(InferTest, PrunedSamplesFallBackToIncumbent) {
  TensorNetwork net = testing::Random(8, 3);
  PolicyParams p = InitParams(Tiny(), 2);
  InferOptions o;
  o.pruning = true;
  o.incumbent = GreedySolve(net);
  o.incumbent->total_cost = 1;
  o.paths = 10;
  EXPECT_EQ(Infer(p, net, o).steps, o.incumbent->steps);
}

// Hit count of the uniform policy against the count implied by the exact
// per-sample hit probability of each network.
TEST(InferTest, UniformPolicyFindsSmallOptima) {
  const PolicyParams p = ZeroLike(InitParams(Tiny(), 0));
  int hits = 0;
  double expected = 0, variance = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TensorNetwork net = testing::Random(6, seed);
    const testing::Plain plain = testing::ToPlain(net);
    const double q = testing::UniformHitProbability(
        plain, testing::EnumerateMinCost(plain));
    const double hit = 1 - std::pow(1 - q, 1000);
    expected += hit;
    variance += hit * (1 - hit);
    InferOptions o;
    o.paths = 1000;
    o.seed = seed;
    if (Infer(p, net, o).total_cost == OptimalCost(net)) ++hits;
  }
  EXPECT_GE(hits, expected - 3 * std::sqrt(variance));
}

TEST(TrainTest, SingleNetworkIsDeterministic) {
  TrainInputs in;
  in.nets = {testing::Random(8, 5)};
  std::ostringstream log_a, log_b;
  TrainResult a = Train(in, Tiny(), SmallTrain(), &log_a);
  TrainResult b = Train(in, Tiny(), SmallTrain(), &log_b);
  EXPECT_EQ(log_a.str(), log_b.str());
  EXPECT_FALSE(log_a.str().empty());
  ASSERT_TRUE(a.best_path);
  EXPECT_EQ(a.best_path->total_cost, PathCost(in.nets[0], *a.best_path));
  EXPECT_GE(a.samples, SmallTrain().total_samples);
  EXPECT_GT(a.reward_scale, 0);
  Flops last = kInfiniteCost;
  for (const auto& rec : a.log) {
    EXPECT_LE(rec.best_cost, last);
    last = rec.best_cost;
  }
  EXPECT_EQ(last, a.best_path->total_cost);
  EXPECT_TRUE(a.params.all_finite());
}

TEST(TrainTest, OtherModesRun) {
  TrainInputs multi;
  multi.mode = TrainMode::kMulti;
  multi.generator.n = 7;
  TrainResult m = Train(multi, Tiny(), SmallTrain());
  EXPECT_FALSE(m.best_path);
  EXPECT_TRUE(m.params.all_finite());

  TrainInputs fixed;
  fixed.mode = TrainMode::kFixedSet;
  fixed.nets = {testing::Random(6, 1), testing::Random(9, 2)};
  TrainConfig cfg = SmallTrain();
  cfg.features = {false, false};
  TrainResult f = Train(fixed, Tiny(), cfg);
  EXPECT_EQ(f.params.config.edge_features, 2);
}

TEST(TrainTest, CheckpointedPolicyInfersSamePath) {
  TrainInputs in;
  in.nets = {testing::Random(9, 8)};
  TrainResult r = Train(in, Tiny(), SmallTrain());
  const auto file =
      std::filesystem::temp_directory_path() / "tnco_trainer_test.ckpt";
  SaveCheckpoint(file, r.params);
  PolicyParams back = LoadCheckpoint(file);
  std::filesystem::remove(file);
  InferOptions o;
  o.paths = 20;
  o.seed = 1;
  EXPECT_EQ(Infer(back, in.nets[0], o).steps,
            Infer(r.params, in.nets[0], o).steps);
}

TEST(TrainLogTest, NonFiniteBecomesNull) {
  TrainLogRecord rec;
  const std::string j = rec.ToJson();
  EXPECT_NE(j.find("\"best_cost\":null"), std::string::npos);
  EXPECT_NE(j.find("\"inference_cost\":null"), std::string::npos);
}

}  // namespace
}  // namespace tnco
