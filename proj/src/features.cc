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

#include "tnco/features.h"

#include <algorithm>
#include <cmath>

namespace tnco {

namespace {

constexpr double kClip = 100.0;

double ProductOfExtents(const TensorNetwork& net, const IndexSet& idx) {
  double p = 1;
  for (IndexId i : idx) p *= static_cast<double>(net.extent(i));
  return p;
}

double Median(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  const Eigen::Index n = v.size();
  return n % 2 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

Eigen::VectorXd Clip(const Eigen::VectorXd& v) {
  return v.cwiseMax(-kClip).cwiseMin(kClip);
}

}  // namespace

double GreedyScore(const TensorNetwork& net, NodeId u, NodeId v) {
  if (!net.contains(u) || !net.contains(v) || !net.has_edge(u, v)) {
    throw Error(ErrorCode::kNotAnEdge, "(" + std::to_string(u) + ", " +
                                           std::to_string(v) +
                                           ") is not an edge");
  }
  const IndexSet& a = net.indices(u);
  const IndexSet& b = net.indices(v);
  return ProductOfExtents(net, a) + ProductOfExtents(net, b) -
         ProductOfExtents(net, SymmetricDifference(a, b));
}

RawEdgeFeatures ComputeRawEdgeFeatures(const TensorNetwork& net) {
  RawEdgeFeatures raw;
  raw.edges = net.edges();
  raw.values.resize(static_cast<Eigen::Index>(raw.edges.size()), 3);
  for (std::size_t r = 0; r < raw.edges.size(); ++r) {
    const Edge& e = raw.edges[r];
    auto row = static_cast<Eigen::Index>(r);
    raw.values(row, kCostFeature) = EdgeCost(net, e);
    raw.values(row, kExtensionFeature) =
        ProductOfExtents(net, net.shared_indices(e.u, e.v));
    raw.values(row, kGreedyFeature) = GreedyScore(net, e.u, e.v);
  }
  return raw;
}

ScaledColumns RobustScale(const Eigen::VectorXd& column) {
  ScaledColumns out;
  const Eigen::Index n = column.size();
  if (n == 0) return out;
  const bool all_positive = (column.array() > 0).all();
  const bool all_negative = (column.array() < 0).all();
  Eigen::VectorXd y;
  if (all_positive || all_negative) {
    y = column.array().abs().log();
  } else {
    y = (column.array() - column.minCoeff() + 1.0).log();
  }
  const double m = Median(y);
  const double hi = y.maxCoeff() - m;
  const double lo = y.minCoeff() - m;
  out.high = hi != 0 ? Eigen::VectorXd((y.array() - m) / hi)
                     : Eigen::VectorXd::Zero(n);
  out.low = lo != 0 ? Eigen::VectorXd((y.array() - m) / lo)
                    : Eigen::VectorXd::Zero(n);
  out.logged = Clip(y);
  out.high = Clip(out.high);
  out.low = Clip(out.low);
  return out;
}

int EdgeFeatureWidth(const FeatureOptions& opts) {
  const int raw = opts.solver_features ? 3 : 2;
  return opts.robust ? 3 * raw : raw;
}

GraphBatch BuildBatch(const TensorNetwork& net, const FeatureOptions& opts) {
  GraphBatch b;
  b.num_graphs = 1;
  const int n = static_cast<int>(net.num_nodes());
  std::map<NodeId, int> row;
  for (const auto& [id, idx] : net.nodes()) {
    row.emplace(id, static_cast<int>(row.size()));
  }
  b.node_graph.assign(n, 0);
  b.node_offset = {0, n};
  b.x = Eigen::MatrixXd::Ones(n, 1);
  b.g = Eigen::MatrixXd::Ones(1, 1);

  RawEdgeFeatures raw = ComputeRawEdgeFeatures(net);
  const int m = static_cast<int>(raw.edges.size());
  b.edge_graph.assign(m, 0);
  b.edge_offset = {0, m};
  for (const Edge& e : raw.edges) {
    b.edge_src.push_back(row.at(e.u));
    b.edge_dst.push_back(row.at(e.v));
  }

  const int num_raw = opts.solver_features ? 3 : 2;
  b.e.resize(m, EdgeFeatureWidth(opts));
  if (m == 0) return b;
  for (int c = 0; c < num_raw; ++c) {
    Eigen::VectorXd col = raw.values.col(c);
    if (opts.robust) {
      ScaledColumns s = RobustScale(col);
      b.e.col(3 * c) = s.logged;
      b.e.col(3 * c + 1) = s.high;
      b.e.col(3 * c + 2) = s.low;
    } else {
      const double scale = col.cwiseAbs().maxCoeff();
      b.e.col(c) = scale > 0 ? Eigen::VectorXd(col / scale) : col;
    }
  }
  return b;
}

GraphBatch ConcatBatches(std::span<const GraphBatch* const> parts) {
  GraphBatch b;
  int nodes = 0, edges = 0, graphs = 0, width = 0;
  for (const GraphBatch* p : parts) {
    nodes += p->num_nodes();
    edges += p->num_edges();
    graphs += p->num_graphs;
    width = static_cast<int>(p->e.cols());
  }
  b.num_graphs = graphs;
  b.x.resize(nodes, parts.empty() ? 1 : parts.front()->x.cols());
  b.e.resize(edges, width);
  b.g.resize(graphs, parts.empty() ? 1 : parts.front()->g.cols());
  b.node_offset.push_back(0);
  b.edge_offset.push_back(0);
  int node_base = 0, edge_base = 0, graph_base = 0;
  for (const GraphBatch* p : parts) {
    b.x.middleRows(node_base, p->num_nodes()) = p->x;
    b.e.middleRows(edge_base, p->num_edges()) = p->e;
    b.g.middleRows(graph_base, p->num_graphs) = p->g;
    for (int k : p->node_graph) b.node_graph.push_back(k + graph_base);
    for (int k : p->edge_graph) b.edge_graph.push_back(k + graph_base);
    for (int k : p->edge_src) b.edge_src.push_back(k + node_base);
    for (int k : p->edge_dst) b.edge_dst.push_back(k + node_base);
    for (std::size_t k = 1; k < p->node_offset.size(); ++k) {
      b.node_offset.push_back(p->node_offset[k] + node_base);
      b.edge_offset.push_back(p->edge_offset[k] + edge_base);
    }
    node_base += p->num_nodes();
    edge_base += p->num_edges();
    graph_base += p->num_graphs;
  }
  return b;
}

}  // namespace tnco
