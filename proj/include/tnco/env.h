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

#ifndef TNCO_ENV_H_
#define TNCO_ENV_H_

#include <atomic>
#include <limits>
#include <optional>

#include "tnco/network.h"

namespace tnco {

constexpr Flops kInfiniteCost = std::numeric_limits<Flops>::infinity();

// Pruning threshold: cheapest completed path seen so far.
struct PruneContext {
  Flops best_cost = kInfiniteCost;
  bool enabled = true;
};

PruneContext UpdateBest(PruneContext ctx, Flops completed_cost);

// Monotone-min cell shared between environments running on different
// threads. A stale read only delays pruning.
class SharedBest {
 public:
  Flops load() const { return best_.load(std::memory_order_relaxed); }
  // Returns true if the stored value decreased.
  bool offer(Flops cost);

 private:
  std::atomic<Flops> best_{kInfiniteCost};
};

struct EnvState {
  TensorNetwork graph;
  Flops accumulated_cost = 0;
  int step = 0;
  int n = 0;
  bool done = false;
  bool pruned = false;
  ContractionPath path;
};

struct StepOutcome {
  EnvState state;
  Flops cost = 0;
  bool done = false;
  bool pruned = false;
  // Estimated remaining cost; present iff pruned.
  std::optional<Flops> termination_value;
};

// Validates the network (throws on violation) and starts an episode.
EnvState Reset(const TensorNetwork& net);

// Contracts the edge. When pruning is enabled and the accumulated cost
// exceeds ctx.best_cost before the episode completes, the episode ends as
// pruned with a termination value attached. Throws kEpisodeFinished or
// kNotAnEdge.
StepOutcome Step(const EnvState& state, const Edge& edge,
                 const PruneContext& ctx);

// Estimated cost of finishing a path that was cut after l steps:
//   min_e w(e) + (C_l / l + C_min / n) * (n - l) / 2
// with w(e) taken over the edges of the current graph. Throws kNoEdges on a
// single-node graph and std::invalid_argument when l == 0 or C_min is not
// finite.
Flops TerminationValue(const EnvState& state, const PruneContext& ctx);

}  // namespace tnco

#endif  // TNCO_ENV_H_
