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

#ifndef TNCO_NETWORK_H_
#define TNCO_NETWORK_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tnco {

using NodeId = int;
using IndexId = int;
using Extent = std::int64_t;
// Flop counts overflow 64-bit integers on large networks; ordering decisions
// only need relative magnitudes.
using Flops = double;

// Sorted, duplicate-free list of index ids.
using IndexSet = std::vector<IndexId>;

enum class ErrorCode {
  kIndexOveruse,
  kDisconnectedNetwork,
  kBadExtent,
  kNotAnEdge,
  kInvalidStep,
  kShapeMismatch,
  kParseError,
  kFormatError,
  kIoError,
  kTooLarge,
  kEpisodeFinished,
  kNoEdges,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Unordered node pair, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// A tensor network viewed as a graph: nodes are tensors, two nodes are
// adjacent when their index sets intersect. Immutable after construction.
//
// Node ids follow the SSA convention: contracting two nodes creates a fresh
// node with id next_id(), so a sequence of contractions can be replayed from
// node-id pairs alone.
class TensorNetwork {
 public:
  TensorNetwork() = default;

  // Index lists are sorted and deduplicated. next_id defaults to one past the
  // largest node id.
  TensorNetwork(std::map<NodeId, IndexSet> nodes,
                std::map<IndexId, Extent> extents,
                std::optional<NodeId> next_id = std::nullopt);

  const std::map<NodeId, IndexSet>& nodes() const { return nodes_; }
  const std::map<IndexId, Extent>& extents() const { return extents_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  NodeId next_id() const { return next_id_; }

  // All adjacent pairs, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  bool has_edge(NodeId a, NodeId b) const;
  // Position of the edge in edges(), or nullopt.
  std::optional<std::size_t> edge_position(NodeId a, NodeId b) const;

  const IndexSet& indices(NodeId id) const;
  Extent extent(IndexId index) const;

  // Product of the extents of the node's indices (1 for a scalar).
  Flops node_size(NodeId id) const;
  // Indices carried by both nodes.
  IndexSet shared_indices(NodeId a, NodeId b) const;

  // Number of nodes whose index set contains each index.
  std::map<IndexId, int> index_appearances() const;

  friend bool operator==(const TensorNetwork&, const TensorNetwork&) = default;

 private:
  void BuildEdges();

  std::map<NodeId, IndexSet> nodes_;
  std::map<IndexId, Extent> extents_;
  NodeId next_id_ = 0;
  std::vector<Edge> edges_;
};

// Returns the first violated structural rule (bad extent, index used by more
// than two tensors, disconnected graph), or nullopt for a valid network.
std::optional<Error> Validate(const TensorNetwork& net);
void ValidateOrThrow(const TensorNetwork& net);

IndexSet SymmetricDifference(const IndexSet& a, const IndexSet& b);
IndexSet Union(const IndexSet& a, const IndexSet& b);
IndexSet Intersection(const IndexSet& a, const IndexSet& b);

// Flops of contracting the pair: product of extents over the union of both
// index sets. Throws kNotAnEdge.
Flops EdgeCost(const TensorNetwork& net, NodeId a, NodeId b);
inline Flops EdgeCost(const TensorNetwork& net, const Edge& e) {
  return EdgeCost(net, e.u, e.v);
}

struct Contraction {
  TensorNetwork network;
  NodeId result = 0;
};

// Replaces a and b by one node carrying the symmetric difference of their
// index sets. Throws kNotAnEdge.
Contraction ContractEdge(const TensorNetwork& net, NodeId a, NodeId b);

struct ContractionStep {
  NodeId u = 0;
  NodeId v = 0;
  NodeId result = 0;

  friend bool operator==(const ContractionStep&,
                         const ContractionStep&) = default;
};

struct ContractionPath {
  std::vector<ContractionStep> steps;
  Flops total_cost = 0;

  // Per-step costs in application order. Filled by MakePath.
  std::vector<Flops> step_costs;
};

// Builds a path from node-id pairs, assigning SSA result ids and costs.
// Throws kInvalidStep if a pair is not an edge at the step where it applies.
ContractionPath MakePath(const TensorNetwork& net,
                         std::span<const std::pair<NodeId, NodeId>> pairs);

// Node-id pairs of the steps, in order.
std::vector<std::pair<NodeId, NodeId>> StepPairs(const ContractionPath& path);

// Replays the path and returns the sum of per-step costs. Throws kInvalidStep
// if a pair is not adjacent, or if a recorded result id disagrees with the
// SSA numbering.
Flops PathCost(const TensorNetwork& net, const ContractionPath& path);

// Network left after applying every step of the path.
TensorNetwork ApplyPath(const TensorNetwork& net, const ContractionPath& path);

// True when the path reduces the network to a single node.
bool IsComplete(const TensorNetwork& net, const ContractionPath& path);

// Appends the steps of tail (already expressed in the SSA ids of the network
// produced by head) to head.
ContractionPath Concatenate(const ContractionPath& head,
                            const ContractionPath& tail);

}  // namespace tnco

#endif  // TNCO_NETWORK_H_
