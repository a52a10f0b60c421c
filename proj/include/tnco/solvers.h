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

#ifndef TNCO_SOLVERS_H_
#define TNCO_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tnco/network.h"

namespace tnco {

using Solver = std::function<ContractionPath(const TensorNetwork&)>;

// Largest network optimal_solve accepts.
constexpr int kOptimalMaxNodes = 12;

// Minimum-cost path by depth-first branch and bound. Subproblems are memoized
// on the sorted multiset of live index sets, so networks that differ only in
// node ids share work. Throws kTooLarge above kOptimalMaxNodes nodes.
ContractionPath OptimalSolve(const TensorNetwork& net);

// Optimal cost only; same search as OptimalSolve.
Flops OptimalCost(const TensorNetwork& net);

struct GreedyOptions {
  // true: contract the edge with the largest greedy score (the most memory
  // freed). false: the smallest.
  bool prefer_largest_score = true;
};

// Repeatedly contracts the best-scoring edge. Ties go to the cheaper edge,
// then the lexicographically smaller node pair. Stops after max_steps steps
// when max_steps >= 0.
ContractionPath GreedySolve(const TensorNetwork& net,
                            const GreedyOptions& opts = {},
                            int max_steps = -1);

// Uniformly random edge at every step.
ContractionPath RandomSolve(const TensorNetwork& net, std::uint64_t seed);

// The first n-1-k steps come from GreedySolve; the remaining k-step network
// goes to tail. Requires 1 <= k <= n-1.
ContractionPath HybridSolve(const TensorNetwork& net, int k,
                            const Solver& tail,
                            const GreedyOptions& opts = {});

// Cheapest candidate; the first one wins ties. Requires a non-empty list.
const ContractionPath& FallbackSelect(
    std::span<const ContractionPath> candidates);

struct AnnealSchedule {
  int iterations = 20000;
  // Temperatures act on log(cost) differences and cool geometrically.
  // t_start == 0 gives pure hill climbing.
  double t_start = 1.0;
  double t_end = 1e-3;
  // Stop early after this many seconds (0: no limit).
  double time_limit_s = 0;
};

// Simulated annealing over contraction orders. An order is a list of leaf
// pairs; decoding contracts the clusters holding each pair, skips pairs that
// are already merged or not adjacent, and completes the path with the
// cheapest remaining edges. Moves swap two steps, move one step, or redirect
// one step to another adjacent leaf pair. Metropolis acceptance; returns the
// best order seen, never worse than init. If best_trace is given, it receives
// the best cost after each iteration.
ContractionPath AnnealSolve(const TensorNetwork& net,
                            const ContractionPath& init,
                            const AnnealSchedule& schedule, std::uint64_t seed,
                            std::vector<Flops>* best_trace = nullptr);

}  // namespace tnco

#endif  // TNCO_SOLVERS_H_
