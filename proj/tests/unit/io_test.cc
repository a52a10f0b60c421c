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

#include "tnco/io.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <sstream>

#include "test_util.h"
#include "tnco/generator.h"

namespace tnco {
namespace {

using Pairs = std::vector<std::pair<NodeId, NodeId>>;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

std::map<char, Extent> ChainSizes() {
  return {{'i', 2}, {'j', 10}, {'k', 2}, {'l', 2}, {'s', 2}};
}

TEST(EinsumTest, ChainEquation) {
  TensorNetwork net = ParseEinsum(ParseEquation("ij,jk,kls->ils", ChainSizes()));
  EXPECT_EQ(net, testing::Chain());
}

TEST(EinsumTest, InnerProduct) {
  TensorNetwork net =
      ParseEinsum(ParseEquation("ab,ab->", {{'a', 2}, {'b', 2}}));
  EXPECT_EQ(net.num_nodes(), 2u);
  EXPECT_EQ(net.edges().size(), 1u);
}

TEST(EinsumTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseEquation("ij,,k->", {}); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] { ParseEquation("ij,jk", {}); }),
            ErrorCode::kParseError);
  EXPECT_EQ(CodeOf([] {
              ParseEinsum(ParseEquation("ij,jk->i", {{'i', 2}, {'j', 2},
                                                     {'k', 2}}));
            }),
            ErrorCode::kParseError);  // k dangles
  EXPECT_EQ(CodeOf([] {
              ParseEinsum(ParseEquation("ij,jk->ik", {{'i', 2}, {'j', 2}}));
            }),
            ErrorCode::kParseError);  // no extent for k
  EXPECT_EQ(CodeOf([] {
              ParseEinsum(ParseEquation("ij,j,j->i", {{'i', 2}, {'j', 2}}));
            }),
            ErrorCode::kIndexOveruse);
}

TEST(EinsumTest, RoundTripUpToRelabeling) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(12, seed);
    TensorNetwork back = ParseEinsum(ToEinsum(net));
    ASSERT_EQ(back.num_nodes(), net.num_nodes());
    ASSERT_EQ(back.edges(), net.edges());  // node ids are kept, 0..n-1
    for (const Edge& e : net.edges()) {
      EXPECT_EQ(EdgeCost(back, e), EdgeCost(net, e));
    }
  }
}

TEST(NetworkFileTest, ChainFixture) {
  EXPECT_EQ(LoadNetwork(testing::DataPath("chain.tn")), testing::Chain());
}

TEST(NetworkFileTest, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TensorNetwork net = testing::Random(20, seed);
    std::stringstream ss;
    WriteNetwork(ss, net);
    EXPECT_EQ(ReadNetwork(ss), net);
  }
}

TEST(NetworkFileTest, OveruseIsFormatError) {
  std::stringstream ss(
      "tnco-network 1\nindex 0 2\nnode 0 0\nnode 1 0\nnode 2 0\n");
  EXPECT_EQ(CodeOf([&] { ReadNetwork(ss); }), ErrorCode::kFormatError);
}

TEST(NetworkFileTest, BadHeaderAndMissingFile) {
  std::stringstream ss("tnco-path 1\n");
  EXPECT_EQ(CodeOf([&] { ReadNetwork(ss); }), ErrorCode::kFormatError);
  EXPECT_EQ(CodeOf([] { LoadNetwork("/nonexistent/x.tn"); }),
            ErrorCode::kIoError);
}

TEST(PathFileTest, ChainFixtureReplays) {
  TensorNetwork net = testing::Chain();
  ContractionPath p = LoadPath(testing::DataPath("chain_ab_first.path"), net);
  EXPECT_EQ(p.total_cost, 56);
  TensorNetwork rest = ApplyPath(net, p);
  ASSERT_EQ(rest.num_nodes(), 1u);
  EXPECT_EQ(rest.indices(4), (IndexSet{0, 3, 4}));  // open i, l, s
}

TEST(PathFileTest, UnknownNodeIsFormatError) {
  TensorNetwork net = testing::Chain();
  std::stringstream ss("tnco-path 1\nnodes 3\ncost 56\n0 1\n2 7\n");
  PathFile f = ReadPath(ss);
  EXPECT_EQ(CodeOf([&] { PathFromFile(f, net); }), ErrorCode::kFormatError);
}

TEST(PathFileTest, LongRoundTrip) {
  TensorNetwork net = testing::Random(101, 5);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  TensorNetwork cur = net;
  while (cur.num_nodes() > 1) {
    const Edge e = cur.edges().back();
    pairs.emplace_back(e.u, e.v);
    cur = ContractEdge(cur, e.u, e.v).network;
  }
  ASSERT_EQ(pairs.size(), 100u);
  ContractionPath p = MakePath(net, pairs);
  const auto file =
      std::filesystem::temp_directory_path() / "tnco_io_test.path";
  SavePath(file, net, p);
  ContractionPath back = LoadPath(file, net);
  EXPECT_EQ(back.steps, p.steps);
  EXPECT_EQ(back.total_cost, p.total_cost);
  std::filesystem::remove(file);
}

TEST(GeneratorTest, Deterministic) {
  GeneratorConfig cfg;
  cfg.n = 25;
  cfg.seed = 7;
  EXPECT_EQ(RandomNetwork(cfg), RandomNetwork(cfg));
  cfg.seed = 8;
  GeneratorConfig other = cfg;
  other.seed = 7;
  EXPECT_FALSE(RandomNetwork(cfg) == RandomNetwork(other));
}

TEST(GeneratorTest, TwoNodes) {
  GeneratorConfig cfg;
  cfg.n = 2;
  TensorNetwork net = RandomNetwork(cfg);
  EXPECT_EQ(net.num_nodes(), 2u);
  EXPECT_EQ(net.edges().size(), 1u);
}

TEST(GeneratorTest, RejectsBadConfig) {
  GeneratorConfig cfg;
  cfg.n = 1;
  EXPECT_THROW(RandomNetwork(cfg), std::invalid_argument);
  cfg.n = 5;
  cfg.extent_low = 1;
  EXPECT_THROW(RandomNetwork(cfg), std::invalid_argument);
  cfg.extent_low = 4;
  cfg.extent_high = 3;
  EXPECT_THROW(RandomNetwork(cfg), std::invalid_argument);
}

TEST(GeneratorTest, DegreeAndExtentStatistics) {
  double degree_sum = 0;
  std::map<Extent, int> extent_counts;
  int links = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorConfig cfg;
    cfg.n = 50;
    cfg.seed = seed;
    TensorNetwork net = RandomNetwork(cfg);
    ASSERT_FALSE(Validate(net));
    degree_sum += 2.0 * net.edges().size() / net.num_nodes();
    for (const auto& [i, e] : net.extents()) {
      ++extent_counts[e];
      ++links;
    }
  }
  const double mean_degree = degree_sum / 100;
  EXPECT_GE(mean_degree, 2.5);
  EXPECT_LE(mean_degree, 3.5);
  ASSERT_EQ(extent_counts.size(), 5u);
  for (const auto& [e, c] : extent_counts) {
    EXPECT_GE(e, 2);
    EXPECT_LE(e, 6);
    EXPECT_NEAR(static_cast<double>(c) / links, 0.2, 0.02);
  }
}

}  // namespace
}  // namespace tnco
