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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "tnco/solvers.h"

namespace tnco {

namespace {

using LeafPair = std::pair<NodeId, NodeId>;

class OrderDecoder {
 public:
  explicit OrderDecoder(const TensorNetwork& net) : net_(net) {
    for (const auto& [id, idx] : net.nodes()) leaves_.push_back(id);
    for (const Edge& e : net.edges()) leaf_edges_.push_back(e);
  }

  const std::vector<NodeId>& leaves() const { return leaves_; }
  const std::vector<Edge>& leaf_edges() const { return leaf_edges_; }

  // Expresses a path as leaf pairs: each step names one original node from
  // each of the two clusters it merges.
  std::vector<LeafPair> Encode(const ContractionPath& path) const {
    std::map<NodeId, NodeId> rep;
    for (NodeId id : leaves_) rep[id] = id;
    std::vector<LeafPair> order;
    for (const auto& s : path.steps) {
      order.emplace_back(rep.at(s.u), rep.at(s.v));
      rep[s.result] = std::min(rep.at(s.u), rep.at(s.v));
    }
    return order;
  }

  // Applies the order, skipping inapplicable pairs and completing greedily
  // by cheapest edge. Rewrites `order` to the pairs actually applied.
  ContractionPath Decode(std::vector<LeafPair>& order) const {
    std::map<NodeId, NodeId> parent;
    std::map<NodeId, NodeId> live;  // cluster root -> current node id
    for (NodeId id : leaves_) {
      parent[id] = id;
      live[id] = id;
    }
    auto find = [&](NodeId x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };

    TensorNetwork cur = net_;
    std::vector<LeafPair> applied;
    std::vector<std::pair<NodeId, NodeId>> pairs;
    auto apply = [&](NodeId ra, NodeId rb, LeafPair leaves) {
      NodeId u = live.at(ra), v = live.at(rb);
      pairs.emplace_back(u, v);
      NodeId result = cur.next_id();
      cur = ContractEdge(cur, u, v).network;
      parent[rb] = ra;
      live.erase(rb);
      live[ra] = result;
      applied.push_back(leaves);
    };

    for (const LeafPair& p : order) {
      NodeId ra = find(p.first), rb = find(p.second);
      if (ra == rb || !cur.has_edge(live.at(ra), live.at(rb))) continue;
      apply(ra, rb, p);
    }
    while (cur.num_nodes() > 1) {
      std::map<NodeId, NodeId> root_of;  // current node id -> cluster root
      for (const auto& [root, id] : live) root_of[id] = root;
      const Edge* best = nullptr;
      Flops best_cost = 0;
      for (const Edge& e : cur.edges()) {
        Flops c = EdgeCost(cur, e);
        if (best == nullptr || c < best_cost) {
          best = &e;
          best_cost = c;
        }
      }
      Edge e = *best;
      NodeId ra = root_of.at(e.u), rb = root_of.at(e.v);
      apply(ra, rb, {ra, rb});
    }
    order = std::move(applied);
    return MakePath(net_, pairs);
  }

 private:
  const TensorNetwork& net_;
  std::vector<NodeId> leaves_;
  std::vector<Edge> leaf_edges_;
};

}  // namespace

ContractionPath AnnealSolve(const TensorNetwork& net,
                            const ContractionPath& init,
                            const AnnealSchedule& schedule, std::uint64_t seed,
                            std::vector<Flops>* best_trace) {
  if (net.num_nodes() <= 2) return MakePath(net, StepPairs(init));

  OrderDecoder decoder(net);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<LeafPair> current = decoder.Encode(init);
  ContractionPath current_path = decoder.Decode(current);
  Flops current_cost = current_path.total_cost;
  // Decoding an encoded complete path reproduces it step for step.
  ContractionPath best_path = current_path;

  const auto start = std::chrono::steady_clock::now();
  const int iters = std::max(1, schedule.iterations);
  const int len = static_cast<int>(current.size());
  std::uniform_int_distribution<int> position(0, len - 1);
  std::uniform_int_distribution<std::size_t> edge_pick(
      0, decoder.leaf_edges().size() - 1);

  for (int it = 0; it < iters; ++it) {
    if (schedule.time_limit_s > 0 && (it & 63) == 0) {
      std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      if (elapsed.count() > schedule.time_limit_s) break;
    }
    double temperature = 0;
    if (schedule.t_start > 0) {
      const double frac = iters > 1 ? static_cast<double>(it) / (iters - 1) : 0;
      temperature =
          schedule.t_start * std::pow(schedule.t_end / schedule.t_start, frac);
    }

    std::vector<LeafPair> candidate = current;
    const int move = static_cast<int>(unit(rng) * 3);
    int i = position(rng), j = position(rng);
    if (move == 0) {
      std::swap(candidate[i], candidate[j]);
    } else if (move == 1) {
      LeafPair p = candidate[i];
      candidate.erase(candidate.begin() + i);
      candidate.insert(candidate.begin() + j, p);
    } else {
      const Edge& e = decoder.leaf_edges()[edge_pick(rng)];
      candidate[i] = {e.u, e.v};
    }

    ContractionPath path = decoder.Decode(candidate);
    const double delta = std::log(path.total_cost) - std::log(current_cost);
    bool accept = delta <= 0;
    if (!accept && temperature > 0) {
      accept = unit(rng) < std::exp(-delta / temperature);
    }
    if (accept) {
      current = std::move(candidate);
      current_cost = path.total_cost;
      if (path.total_cost < best_path.total_cost) best_path = std::move(path);
    }
    if (best_trace != nullptr) best_trace->push_back(best_path.total_cost);
  }
  return best_path;
}

}  // namespace tnco
