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

#ifndef TNCO_TESTS_TEST_UTIL_H_
#define TNCO_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tnco/generator.h"
#include "tnco/network.h"

namespace tnco::testing {

inline std::string DataPath(const std::string& name) {
  return std::string(TNCO_TEST_DATA) + "/" + name;
}

// A{i,j} B{j,k} C{k,l,s} with i=l=s=2, j=10, k=2. Index ids i..s = 0..4.
inline TensorNetwork Chain() {
  return TensorNetwork({{0, {0, 1}}, {1, {1, 2}}, {2, {2, 3, 4}}},
                       {{0, 2}, {1, 10}, {2, 2}, {3, 2}, {4, 2}});
}

inline TensorNetwork Random(int n, std::uint64_t seed, Extent hi = 6,
                            double degree = 3.0) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.extent_high = hi;
  cfg.extent_low = std::min<Extent>(2, hi);
  cfg.mean_degree = degree;
  return RandomNetwork(cfg);
}

// Deliberately separate model of contraction used as an oracle: a list of
// index sets and an extent table, no ids, no memo, no pruning.
struct Plain {
  std::vector<std::set<int>> sets;
  std::map<int, double> extent;
};

inline Plain ToPlain(const TensorNetwork& net) {
  Plain p;
  for (const auto& [id, idx] : net.nodes()) {
    p.sets.emplace_back(idx.begin(), idx.end());
  }
  for (const auto& [i, e] : net.extents()) p.extent[i] = static_cast<double>(e);
  return p;
}

inline bool Share(const std::set<int>& a, const std::set<int>& b) {
  for (int i : a) {
    if (b.count(i)) return true;
  }
  return false;
}

inline double PairCost(const Plain& p, const std::set<int>& a,
                       const std::set<int>& b) {
  std::set<int> u = a;
  u.insert(b.begin(), b.end());
  double c = 1;
  for (int i : u) c *= p.extent.at(i);
  return c;
}

inline std::set<int> SymDiff(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> out;
  for (int i : a) {
    if (!b.count(i)) out.insert(i);
  }
  for (int i : b) {
    if (!a.count(i)) out.insert(i);
  }
  return out;
}

// Minimum total cost over every order of adjacent-pair contractions.
inline double EnumerateMinCost(const Plain& p) {
  if (p.sets.size() <= 1) return 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < p.sets.size(); ++j) {
      if (!Share(p.sets[i], p.sets[j])) continue;
      Plain child;
      child.extent = p.extent;
      for (std::size_t k = 0; k < p.sets.size(); ++k) {
        if (k != i && k != j) child.sets.push_back(p.sets[k]);
      }
      child.sets.push_back(SymDiff(p.sets[i], p.sets[j]));
      best = std::min(best, PairCost(p, p.sets[i], p.sets[j]) +
                                EnumerateMinCost(child));
    }
  }
  return best;
}

// Probability that a policy choosing uniformly among adjacent pairs at every
// step completes with total cost at most budget.
inline double UniformHitProbability(const Plain& p, double budget) {
  if (p.sets.size() <= 1) return budget >= -1e-9 ? 1 : 0;
  double sum = 0;
  int choices = 0;
  for (std::size_t i = 0; i < p.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < p.sets.size(); ++j) {
      if (!Share(p.sets[i], p.sets[j])) continue;
      ++choices;
      const double c = PairCost(p, p.sets[i], p.sets[j]);
      if (c > budget * (1 + 1e-12)) continue;
      Plain child;
      child.extent = p.extent;
      for (std::size_t k = 0; k < p.sets.size(); ++k) {
        if (k != i && k != j) child.sets.push_back(p.sets[k]);
      }
      child.sets.push_back(SymDiff(p.sets[i], p.sets[j]));
      sum += UniformHitProbability(child, budget - c);
    }
  }
  return sum / choices;
}

// Replays SSA node-id pairs and sums the pair costs.
inline double ReplayCost(const TensorNetwork& net,
                         const std::vector<std::pair<int, int>>& pairs) {
  Plain p = ToPlain(net);
  std::map<int, std::set<int>> live;
  int next = 0;
  for (const auto& [id, idx] : net.nodes()) {
    live[id] = {idx.begin(), idx.end()};
    next = std::max(next, id + 1);
  }
  double total = 0;
  for (const auto& [u, v] : pairs) {
    const auto a = live.at(u), b = live.at(v);
    if (!Share(a, b)) throw std::runtime_error("oracle: not adjacent");
    total += PairCost(p, a, b);
    live.erase(u);
    live.erase(v);
    live[next++] = SymDiff(a, b);
  }
  return total;
}

}  // namespace tnco::testing

#endif  // TNCO_TESTS_TEST_UTIL_H_
