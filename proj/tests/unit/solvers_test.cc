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

#include "tnco/solvers.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.h"

namespace tnco {
namespace {

TEST(OptimalTest, Chain) {
  ContractionPath p = OptimalSolve(testing::Chain());
  EXPECT_EQ(p.total_cost, 56);
  EXPECT_EQ(PathCost(testing::Chain(), p), 56);
  EXPECT_EQ(OptimalCost(testing::Chain()), 56);
}

TEST(OptimalTest, MatchesPlainEnumeration) {
  for (int n : {3, 4, 5, 6}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      TensorNetwork net = testing::Random(n, seed * 31 + n);
      ContractionPath p = OptimalSolve(net);
      EXPECT_TRUE(IsComplete(net, p));
      EXPECT_EQ(p.total_cost, testing::EnumerateMinCost(testing::ToPlain(net)))
          << "n=" << n << " seed=" << seed;
      EXPECT_EQ(testing::ReplayCost(net, StepPairs(p)), p.total_cost);
    }
  }
}

TEST(OptimalTest, TooLarge) {
  try {
    OptimalSolve(testing::Random(kOptimalMaxNodes + 1, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooLarge);
  }
}

TEST(GreedyTest, ChainPicksLargestScore) {
  ContractionPath p = GreedySolve(testing::Chain());
  EXPECT_EQ(p.total_cost, 56);
  EXPECT_EQ(p.steps.front().u, 0);
  EXPECT_EQ(p.steps.front().v, 1);
  ContractionPath smallest = GreedySolve(testing::Chain(), {false});
  EXPECT_EQ(smallest.total_cost, 160);
}

TEST(GreedyTest, DeterministicAndComplete) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(30, seed);
    ContractionPath a = GreedySolve(net);
    EXPECT_TRUE(IsComplete(net, a));
    EXPECT_EQ(a.steps, GreedySolve(net).steps);
  }
}

TEST(GreedyTest, MaxStepsStopsEarly) {
  TensorNetwork net = testing::Random(10, 2);
  ContractionPath full = GreedySolve(net);
  ContractionPath head = GreedySolve(net, {}, 4);
  ASSERT_EQ(head.steps.size(), 4u);
  EXPECT_TRUE(std::equal(head.steps.begin(), head.steps.end(),
                         full.steps.begin()));
}

TEST(RandomTest, DeterministicPerSeed) {
  TensorNetwork net = testing::Random(12, 1);
  EXPECT_EQ(RandomSolve(net, 5).steps, RandomSolve(net, 5).steps);
  EXPECT_TRUE(IsComplete(net, RandomSolve(net, 6)));
}

TEST(RandomTest, NeverBeatsOptimal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(7, seed);
    const Flops opt = OptimalCost(net);
    for (std::uint64_t s = 0; s < 20; ++s) {
      EXPECT_GE(RandomSolve(net, s).total_cost, opt);
    }
  }
}

TEST(AnnealTest, HillClimbNeverWorsens) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(10, seed);
    ContractionPath init = RandomSolve(net, seed);
    AnnealSchedule sched;
    sched.iterations = 500;
    sched.t_start = 0;
    ContractionPath p = AnnealSolve(net, init, sched, seed);
    EXPECT_TRUE(IsComplete(net, p));
    EXPECT_LE(p.total_cost, init.total_cost);
    EXPECT_EQ(PathCost(net, p), p.total_cost);
  }
}

TEST(AnnealTest, FindsOptimumOnSmallNetworks) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TensorNetwork net = testing::Random(6, seed);
    AnnealSchedule sched;
    sched.iterations = 3000;
    ContractionPath p = AnnealSolve(net, GreedySolve(net), sched, seed);
    if (p.total_cost == OptimalCost(net)) ++hits;
  }
  EXPECT_GE(hits, 45);
}

TEST(AnnealTest, DeterministicWithMonotoneTrace) {
  TensorNetwork net = testing::Random(15, 3);
  AnnealSchedule sched;
  sched.iterations = 2000;
  std::vector<Flops> trace;
  ContractionPath a = AnnealSolve(net, GreedySolve(net), sched, 9, &trace);
  ContractionPath b = AnnealSolve(net, GreedySolve(net), sched, 9);
  EXPECT_EQ(a.steps, b.steps);
  ASSERT_EQ(trace.size(), 2000u);
  for (std::size_t k = 1; k < trace.size(); ++k) {
    EXPECT_LE(trace[k], trace[k - 1]);
  }
  EXPECT_EQ(trace.back(), a.total_cost);
}

TEST(HybridTest, Extremes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(8, seed);
    const int n = static_cast<int>(net.num_nodes());
    EXPECT_EQ(HybridSolve(net, n - 1, OptimalSolve).total_cost,
              OptimalCost(net));
    const Solver greedy = [](const TensorNetwork& t) { return GreedySolve(t); };
    EXPECT_EQ(HybridSolve(net, 1, greedy).steps, GreedySolve(net).steps);
    EXPECT_THROW(HybridSolve(net, 0, OptimalSolve), std::invalid_argument);
    EXPECT_THROW(HybridSolve(net, n, OptimalSolve), std::invalid_argument);
  }
}

TEST(HybridTest, PrefixIsGreedyAndTailHelps) {
  int not_worse = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TensorNetwork net = testing::Random(10, seed);
    ContractionPath g = GreedySolve(net);
    ContractionPath h = HybridSolve(net, 4, OptimalSolve);
    EXPECT_TRUE(IsComplete(net, h));
    EXPECT_TRUE(std::equal(g.steps.begin(), g.steps.begin() + 5,
                           h.steps.begin()));
    if (h.total_cost <= g.total_cost) ++not_worse;
  }
  // The optimal tail finishes the same 5-node network greedy faces.
  EXPECT_EQ(not_worse, 50);
}

TEST(FallbackTest, CheapestFirstOnTies) {
  TensorNetwork net = testing::Chain();
  std::vector<ContractionPath> c = {
      MakePath(net, std::vector<std::pair<NodeId, NodeId>>{{1, 2}, {0, 3}}),
      MakePath(net, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}}),
      MakePath(net, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}})};
  EXPECT_EQ(&FallbackSelect(c), &c[1]);
  EXPECT_THROW(FallbackSelect(std::span<const ContractionPath>{}),
               std::invalid_argument);
}

}  // namespace
}  // namespace tnco
