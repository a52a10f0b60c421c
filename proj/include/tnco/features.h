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

#ifndef TNCO_FEATURES_H_
#define TNCO_FEATURES_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tnco/network.h"

namespace tnco {

// size(u) + size(v) - size(u contracted with v), where size is the product of
// a node's extents. Symmetric in (u, v). Throws kNotAnEdge.
double GreedyScore(const TensorNetwork& net, NodeId u, NodeId v);

// Columns of RawEdgeFeatures::values.
enum RawFeature { kCostFeature = 0, kExtensionFeature = 1, kGreedyFeature = 2 };

// One row per edge of net.edges(): (contraction cost, product of the shared
// extents, greedy score).
struct RawEdgeFeatures {
  std::vector<Edge> edges;
  Eigen::MatrixXd values;
};

RawEdgeFeatures ComputeRawEdgeFeatures(const TensorNetwork& net);

struct ScaledColumns {
  Eigen::VectorXd logged;
  Eigen::VectorXd high;
  Eigen::VectorXd low;
};

// Log-compresses a feature column (log|y| when every entry has the same
// strict sign, log(y - min + 1) otherwise), then rescales around the median
// m of the logged values: high = (y - m) / (max - m), low = (y - m) /
// (min - m). A zero denominator yields a zero column. All three outputs are
// clipped to [-100, 100].
ScaledColumns RobustScale(const Eigen::VectorXd& column);

struct FeatureOptions {
  // Off: raw columns divided by their largest magnitude.
  bool robust = true;
  // Off: the greedy-score column is dropped.
  bool solver_features = true;
};

int EdgeFeatureWidth(const FeatureOptions& opts);

// Node, edge and global features for one or more graphs. Several graphs are
// stacked block-diagonally; rows of a graph are contiguous.
struct GraphBatch {
  int num_graphs = 0;
  std::vector<int> node_graph;   // graph of each node row
  std::vector<int> edge_graph;   // graph of each edge row
  std::vector<int> edge_src;     // node row of each edge endpoint
  std::vector<int> edge_dst;
  std::vector<int> node_offset;  // num_graphs + 1 entries
  std::vector<int> edge_offset;  // num_graphs + 1 entries
  Eigen::MatrixXd x;             // nodes x 1, ones
  Eigen::MatrixXd e;             // edges x EdgeFeatureWidth
  Eigen::MatrixXd g;             // graphs x 1, ones

  int num_nodes() const { return static_cast<int>(node_graph.size()); }
  int num_edges() const { return static_cast<int>(edge_graph.size()); }
};

// Node rows follow ascending node id, edge rows follow net.edges().
GraphBatch BuildBatch(const TensorNetwork& net,
                      const FeatureOptions& opts = {});

GraphBatch ConcatBatches(std::span<const GraphBatch* const> parts);

}  // namespace tnco

#endif  // TNCO_FEATURES_H_
