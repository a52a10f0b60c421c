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

#include "tnco/generator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace tnco {

void CheckGeneratorConfig(const GeneratorConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("generator needs n >= 2");
  if (cfg.extent_low < 2) {
    throw std::invalid_argument("generator needs extent_low >= 2");
  }
  if (cfg.extent_high < cfg.extent_low) {
    throw std::invalid_argument("generator needs extent_high >= extent_low");
  }
  if (!(cfg.mean_degree > 0)) {
    throw std::invalid_argument("generator needs mean_degree > 0");
  }
}

TensorNetwork RandomNetwork(const GeneratorConfig& cfg) {
  CheckGeneratorConfig(cfg);
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.n;

  std::set<Edge> links;
  if (n == 2) {
    links.emplace(0, 1);
  } else {
    std::uniform_int_distribution<int> node(0, n - 1);
    std::vector<int> prufer(n - 2);
    for (int& p : prufer) p = node(rng);
    std::vector<int> degree(n, 1);
    for (int p : prufer) ++degree[p];
    for (int p : prufer) {
      int leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      links.emplace(leaf, p);
      --degree[leaf];
      --degree[p];
    }
    int a = -1;
    for (int k = 0; k < n; ++k) {
      if (degree[k] == 1) {
        if (a < 0) {
          a = k;
        } else {
          links.emplace(a, k);
          break;
        }
      }
    }
  }

  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  const long long target = std::min<long long>(
      max_edges, std::llround(n * cfg.mean_degree / 2.0));
  std::uniform_int_distribution<int> node(0, n - 1);
  while (static_cast<long long>(links.size()) < target) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    links.emplace(a, b);
  }

  std::uniform_int_distribution<Extent> extent(cfg.extent_low,
                                               cfg.extent_high);
  std::map<NodeId, IndexSet> nodes;
  for (int k = 0; k < n; ++k) nodes[k];
  std::map<IndexId, Extent> extents;
  IndexId next = 0;
  for (const Edge& e : links) {
    extents[next] = extent(rng);
    nodes[e.u].push_back(next);
    nodes[e.v].push_back(next);
    ++next;
  }
  return TensorNetwork(std::move(nodes), std::move(extents));
}

}  // namespace tnco
