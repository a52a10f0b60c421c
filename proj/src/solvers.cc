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

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

#include "tnco/env.h"
#include "tnco/features.h"

namespace tnco {

namespace {

class BranchAndBound {
 public:
  explicit BranchAndBound(const TensorNetwork& net) : net_(net) {}

  struct State {
    std::vector<IndexSet> sets;  // sorted
    std::vector<NodeId> ids;     // node id of each entry of sets
  };

  State Root() const {
    State s;
    for (const auto& [id, idx] : net_.nodes()) {
      s.sets.push_back(idx);
      s.ids.push_back(id);
    }
    Canonicalize(s);
    return s;
  }

  Flops Search(const State& s, Flops budget) {
    if (s.sets.size() <= 1) return 0;
    const std::string key = Key(s);
    auto hit = memo_.find(key);
    if (hit != memo_.end()) {
      if (hit->second.exact || hit->second.value >= budget) {
        return hit->second.value;
      }
    }

    struct Branch {
      Flops cost;
      int i, j;
    };
    std::vector<Branch> branches;
    for (int i = 0; i < static_cast<int>(s.sets.size()); ++i) {
      for (int j = i + 1; j < static_cast<int>(s.sets.size()); ++j) {
        if (Intersection(s.sets[i], s.sets[j]).empty()) continue;
        branches.push_back({Cost(Union(s.sets[i], s.sets[j])), i, j});
      }
    }
    std::stable_sort(branches.begin(), branches.end(),
                     [](const Branch& a, const Branch& b) {
                       return a.cost < b.cost;
                     });

    Flops best = kInfiniteCost;
    Flops lower = kInfiniteCost;
    int bi = -1, bj = -1;
    for (const Branch& br : branches) {
      const Flops bound = std::min(budget, best);
      if (br.cost >= bound) {
        lower = std::min(lower, br.cost);
        break;
      }
      const Flops sub = Search(Child(s, br.i, br.j), bound - br.cost);
      lower = std::min(lower, br.cost + sub);
      if (br.cost + sub < best) {
        best = br.cost + sub;
        bi = br.i;
        bj = br.j;
      }
    }

    Entry& entry = memo_[key];
    if (best < budget) {
      entry = {best, true, bi, bj};
      return best;
    }
    entry.value = std::max(entry.value, lower);
    return lower;
  }

  // Follows the memoized choices from the root. Only valid after a search
  // with an unbounded budget.
  ContractionPath Reconstruct(const State& root) const {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    State s = root;
    TensorNetwork cur = net_;
    while (s.sets.size() > 1) {
      const Entry& e = memo_.at(Key(s));
      NodeId u = s.ids[e.i], v = s.ids[e.j];
      pairs.emplace_back(u, v);
      NodeId result = cur.next_id();
      cur = ContractEdge(cur, u, v).network;
      s = Child(s, e.i, e.j, result);
    }
    return MakePath(net_, pairs);
  }

 private:
  struct Entry {
    Flops value = 0;
    bool exact = false;
    int i = -1, j = -1;
  };

  static void Canonicalize(State& s) {
    std::vector<std::size_t> order(s.sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return s.sets[a] < s.sets[b];
                     });
    State sorted;
    for (std::size_t k : order) {
      sorted.sets.push_back(std::move(s.sets[k]));
      sorted.ids.push_back(s.ids[k]);
    }
    s = std::move(sorted);
  }

  static std::string Key(const State& s) {
    std::string key;
    for (const IndexSet& set : s.sets) {
      for (IndexId i : set) {
        key.append(reinterpret_cast<const char*>(&i), sizeof(i));
      }
      key.push_back('|');
    }
    return key;
  }

  Flops Cost(const IndexSet& idx) const {
    Flops c = 1;
    for (IndexId i : idx) c *= static_cast<Flops>(net_.extent(i));
    return c;
  }

  static State Child(const State& s, int i, int j, NodeId result = -1) {
    State c;
    for (int k = 0; k < static_cast<int>(s.sets.size()); ++k) {
      if (k == i || k == j) continue;
      c.sets.push_back(s.sets[k]);
      c.ids.push_back(s.ids[k]);
    }
    c.sets.push_back(SymmetricDifference(s.sets[i], s.sets[j]));
    c.ids.push_back(result);
    Canonicalize(c);
    return c;
  }

  const TensorNetwork& net_;
  std::unordered_map<std::string, Entry> memo_;
};

void RequireOptimalSize(const TensorNetwork& net) {
  if (static_cast<int>(net.num_nodes()) > kOptimalMaxNodes) {
    throw Error(ErrorCode::kTooLarge,
                std::to_string(net.num_nodes()) +
                    " nodes exceed the exhaustive search limit of " +
                    std::to_string(kOptimalMaxNodes));
  }
}

}  // namespace

ContractionPath OptimalSolve(const TensorNetwork& net) {
  RequireOptimalSize(net);
  ValidateOrThrow(net);
  BranchAndBound search(net);
  auto root = search.Root();
  search.Search(root, kInfiniteCost);
  return search.Reconstruct(root);
}

Flops OptimalCost(const TensorNetwork& net) {
  RequireOptimalSize(net);
  ValidateOrThrow(net);
  BranchAndBound search(net);
  return search.Search(search.Root(), kInfiniteCost);
}

ContractionPath GreedySolve(const TensorNetwork& net,
                            const GreedyOptions& opts, int max_steps) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  TensorNetwork cur = net;
  while (cur.num_nodes() > 1 &&
         (max_steps < 0 || static_cast<int>(pairs.size()) < max_steps)) {
    if (cur.edges().empty()) {
      throw Error(ErrorCode::kDisconnectedNetwork,
                  "no edge left to contract");
    }
    using Key = std::tuple<double, Flops, NodeId, NodeId>;
    std::optional<Key> best;
    for (const Edge& e : cur.edges()) {
      double score = GreedyScore(cur, e.u, e.v);
      Key key{opts.prefer_largest_score ? -score : score, EdgeCost(cur, e),
              e.u, e.v};
      if (!best || key < *best) best = key;
    }
    NodeId u = std::get<2>(*best), v = std::get<3>(*best);
    pairs.emplace_back(u, v);
    cur = ContractEdge(cur, u, v).network;
  }
  return MakePath(net, pairs);
}

ContractionPath RandomSolve(const TensorNetwork& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  TensorNetwork cur = net;
  while (cur.num_nodes() > 1) {
    const auto& edges = cur.edges();
    if (edges.empty()) {
      throw Error(ErrorCode::kDisconnectedNetwork,
                  "no edge left to contract");
    }
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    Edge e = edges[pick(rng)];
    pairs.emplace_back(e.u, e.v);
    cur = ContractEdge(cur, e.u, e.v).network;
  }
  return MakePath(net, pairs);
}

ContractionPath HybridSolve(const TensorNetwork& net, int k,
                            const Solver& tail, const GreedyOptions& opts) {
  const int n = static_cast<int>(net.num_nodes());
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("hybrid tail length must be in [1, n-1]");
  }
  ContractionPath head = GreedySolve(net, opts, n - 1 - k);
  TensorNetwork rest = ApplyPath(net, head);
  ContractionPath suffix = tail(rest);
  // Recompute costs through the full replay so the result is self-consistent.
  std::vector<std::pair<NodeId, NodeId>> pairs = StepPairs(head);
  for (const auto& p : StepPairs(suffix)) pairs.push_back(p);
  return MakePath(net, pairs);
}

const ContractionPath& FallbackSelect(
    std::span<const ContractionPath> candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("no candidate paths");
  }
  const ContractionPath* best = &candidates.front();
  for (const ContractionPath& p : candidates) {
    if (p.total_cost < best->total_cost) best = &p;
  }
  return *best;
}

}  // namespace tnco
