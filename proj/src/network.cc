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

#include "tnco/network.h"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>

namespace tnco {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIndexOveruse: return "IndexOveruse";
    case ErrorCode::kDisconnectedNetwork: return "DisconnectedNetwork";
    case ErrorCode::kBadExtent: return "BadExtent";
    case ErrorCode::kNotAnEdge: return "NotAnEdge";
    case ErrorCode::kInvalidStep: return "InvalidStep";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kEpisodeFinished: return "EpisodeFinished";
    case ErrorCode::kNoEdges: return "NoEdges";
  }
  return "Unknown";
}

TensorNetwork::TensorNetwork(std::map<NodeId, IndexSet> nodes,
                             std::map<IndexId, Extent> extents,
                             std::optional<NodeId> next_id)
    : nodes_(std::move(nodes)), extents_(std::move(extents)) {
  for (auto& [id, idx] : nodes_) {
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  }
  NodeId max_id = nodes_.empty() ? -1 : nodes_.rbegin()->first;
  next_id_ = next_id.value_or(max_id + 1);
  if (next_id_ <= max_id) next_id_ = max_id + 1;
  BuildEdges();
}

void TensorNetwork::BuildEdges() {
  std::map<IndexId, std::vector<NodeId>> owners;
  for (const auto& [id, idx] : nodes_) {
    for (IndexId i : idx) owners[i].push_back(id);
  }
  std::set<Edge> unique;
  for (const auto& [index, ids] : owners) {
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        unique.emplace(ids[a], ids[b]);
      }
    }
  }
  edges_.assign(unique.begin(), unique.end());
}

bool TensorNetwork::has_edge(NodeId a, NodeId b) const {
  return edge_position(a, b).has_value();
}

std::optional<std::size_t> TensorNetwork::edge_position(NodeId a,
                                                        NodeId b) const {
  if (a == b) return std::nullopt;
  Edge key(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

const IndexSet& TensorNetwork::indices(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::kInvalidStep,
                "unknown node id " + std::to_string(id));
  }
  return it->second;
}

Extent TensorNetwork::extent(IndexId index) const {
  auto it = extents_.find(index);
  if (it == extents_.end()) {
    throw Error(ErrorCode::kBadExtent,
                "index " + std::to_string(index) + " has no extent");
  }
  return it->second;
}

Flops TensorNetwork::node_size(NodeId id) const {
  Flops size = 1;
  for (IndexId i : indices(id)) size *= static_cast<Flops>(extent(i));
  return size;
}

IndexSet TensorNetwork::shared_indices(NodeId a, NodeId b) const {
  return Intersection(indices(a), indices(b));
}

std::map<IndexId, int> TensorNetwork::index_appearances() const {
  std::map<IndexId, int> count;
  for (const auto& [id, idx] : nodes_) {
    for (IndexId i : idx) ++count[i];
  }
  return count;
}

std::optional<Error> Validate(const TensorNetwork& net) {
  for (const auto& [id, idx] : net.nodes()) {
    for (IndexId i : idx) {
      auto it = net.extents().find(i);
      if (it == net.extents().end()) {
        return Error(ErrorCode::kBadExtent,
                     "index " + std::to_string(i) + " of node " +
                         std::to_string(id) + " has no extent");
      }
      if (it->second < 1) {
        return Error(ErrorCode::kBadExtent,
                     "index " + std::to_string(i) + " has extent " +
                         std::to_string(it->second));
      }
    }
  }
  for (const auto& [index, count] : net.index_appearances()) {
    if (count > 2) {
      return Error(ErrorCode::kIndexOveruse,
                   "index " + std::to_string(index) + " appears in " +
                       std::to_string(count) + " tensors");
    }
  }
  if (net.num_nodes() <= 1) return std::nullopt;

  std::map<NodeId, std::vector<NodeId>> adjacency;
  for (const Edge& e : net.edges()) {
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
  }
  std::set<NodeId> seen{net.nodes().begin()->first};
  std::vector<NodeId> stack{net.nodes().begin()->first};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    for (NodeId next : adjacency[cur]) {
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  if (seen.size() != net.num_nodes()) {
    return Error(ErrorCode::kDisconnectedNetwork,
                 std::to_string(net.num_nodes() - seen.size()) +
                     " nodes unreachable from node " +
                     std::to_string(net.nodes().begin()->first));
  }
  return std::nullopt;
}

void ValidateOrThrow(const TensorNetwork& net) {
  if (auto err = Validate(net)) throw *err;
}

IndexSet SymmetricDifference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

IndexSet Union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

IndexSet Intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

namespace {

void RequireEdge(const TensorNetwork& net, NodeId a, NodeId b) {
  if (!net.contains(a) || !net.contains(b) || !net.has_edge(a, b)) {
    throw Error(ErrorCode::kNotAnEdge, "(" + std::to_string(a) + ", " +
                                           std::to_string(b) +
                                           ") is not an edge");
  }
}

}  // namespace

Flops EdgeCost(const TensorNetwork& net, NodeId a, NodeId b) {
  RequireEdge(net, a, b);
  Flops cost = 1;
  for (IndexId i : Union(net.indices(a), net.indices(b))) {
    cost *= static_cast<Flops>(net.extent(i));
  }
  return cost;
}

Contraction ContractEdge(const TensorNetwork& net, NodeId a, NodeId b) {
  RequireEdge(net, a, b);
  std::map<NodeId, IndexSet> nodes = net.nodes();
  IndexSet merged = SymmetricDifference(nodes.at(a), nodes.at(b));
  nodes.erase(a);
  nodes.erase(b);
  NodeId result = net.next_id();
  nodes.emplace(result, std::move(merged));
  return {TensorNetwork(std::move(nodes), net.extents(), result + 1), result};
}

ContractionPath MakePath(const TensorNetwork& net,
                         std::span<const std::pair<NodeId, NodeId>> pairs) {
  ContractionPath path;
  TensorNetwork cur = net;
  for (auto [a, b] : pairs) {
    if (!cur.contains(a) || !cur.contains(b) || !cur.has_edge(a, b)) {
      throw Error(ErrorCode::kInvalidStep,
                  "step " + std::to_string(path.steps.size()) + ": (" +
                      std::to_string(a) + ", " + std::to_string(b) +
                      ") is not an edge");
    }
    Flops cost = EdgeCost(cur, a, b);
    auto next = ContractEdge(cur, a, b);
    path.steps.push_back({a, b, next.result});
    path.step_costs.push_back(cost);
    path.total_cost += cost;
    cur = std::move(next.network);
  }
  return path;
}

std::vector<std::pair<NodeId, NodeId>> StepPairs(const ContractionPath& path) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(path.steps.size());
  for (const ContractionStep& s : path.steps) pairs.emplace_back(s.u, s.v);
  return pairs;
}

namespace {

// Replays the path, calling visit(step_index, cost) for each step.
template <typename Visit>
TensorNetwork Replay(const TensorNetwork& net, const ContractionPath& path,
                     Visit&& visit) {
  TensorNetwork cur = net;
  for (std::size_t t = 0; t < path.steps.size(); ++t) {
    const ContractionStep& s = path.steps[t];
    if (!cur.contains(s.u) || !cur.contains(s.v) || !cur.has_edge(s.u, s.v)) {
      throw Error(ErrorCode::kInvalidStep,
                  "step " + std::to_string(t) + ": (" + std::to_string(s.u) +
                      ", " + std::to_string(s.v) + ") is not an edge");
    }
    if (s.result != cur.next_id()) {
      throw Error(ErrorCode::kInvalidStep,
                  "step " + std::to_string(t) + ": result id " +
                      std::to_string(s.result) + " expected " +
                      std::to_string(cur.next_id()));
    }
    visit(t, EdgeCost(cur, s.u, s.v));
    cur = ContractEdge(cur, s.u, s.v).network;
  }
  return cur;
}

}  // namespace

Flops PathCost(const TensorNetwork& net, const ContractionPath& path) {
  Flops total = 0;
  Replay(net, path, [&](std::size_t, Flops c) { total += c; });
  return total;
}

TensorNetwork ApplyPath(const TensorNetwork& net, const ContractionPath& path) {
  return Replay(net, path, [](std::size_t, Flops) {});
}

bool IsComplete(const TensorNetwork& net, const ContractionPath& path) {
  return ApplyPath(net, path).num_nodes() == 1;
}

ContractionPath Concatenate(const ContractionPath& head,
                            const ContractionPath& tail) {
  ContractionPath out = head;
  out.steps.insert(out.steps.end(), tail.steps.begin(), tail.steps.end());
  out.step_costs.insert(out.step_costs.end(), tail.step_costs.begin(),
                        tail.step_costs.end());
  out.total_cost = head.total_cost + tail.total_cost;
  return out;
}

}  // namespace tnco
