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

#include "tnco/env.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnco {

PruneContext UpdateBest(PruneContext ctx, Flops completed_cost) {
  ctx.best_cost = std::min(ctx.best_cost, completed_cost);
  return ctx;
}

bool SharedBest::offer(Flops cost) {
  Flops cur = best_.load(std::memory_order_relaxed);
  while (cost < cur) {
    if (best_.compare_exchange_weak(cur, cost, std::memory_order_relaxed)) {
      return true;
    }
  }
  return false;
}

EnvState Reset(const TensorNetwork& net) {
  ValidateOrThrow(net);
  EnvState s;
  s.graph = net;
  s.n = static_cast<int>(net.num_nodes());
  s.done = s.n <= 1;
  return s;
}

StepOutcome Step(const EnvState& state, const Edge& edge,
                 const PruneContext& ctx) {
  if (state.done) {
    throw Error(ErrorCode::kEpisodeFinished, "episode already finished");
  }
  const Flops cost = EdgeCost(state.graph, edge);
  Contraction next = ContractEdge(state.graph, edge.u, edge.v);

  StepOutcome out;
  out.cost = cost;
  out.state.graph = std::move(next.network);
  out.state.accumulated_cost = state.accumulated_cost + cost;
  out.state.step = state.step + 1;
  out.state.n = state.n;
  out.state.path = state.path;
  out.state.path.steps.push_back({edge.u, edge.v, next.result});
  out.state.path.step_costs.push_back(cost);
  out.state.path.total_cost = out.state.accumulated_cost;

  const bool complete = out.state.graph.num_nodes() == 1;
  if (!complete && ctx.enabled && std::isfinite(ctx.best_cost) &&
      out.state.accumulated_cost > ctx.best_cost) {
    out.state.pruned = true;
    out.termination_value = TerminationValue(out.state, ctx);
  }
  out.state.done = complete || out.state.pruned;
  out.done = out.state.done;
  out.pruned = out.state.pruned;
  return out;
}

Flops TerminationValue(const EnvState& state, const PruneContext& ctx) {
  const auto& edges = state.graph.edges();
  if (edges.empty()) {
    throw Error(ErrorCode::kNoEdges, "terminal state has no edges");
  }
  if (state.step < 1) {
    throw std::invalid_argument("termination value needs at least one step");
  }
  if (!std::isfinite(ctx.best_cost)) {
    throw std::invalid_argument("termination value needs a finite best cost");
  }
  Flops cheapest = kInfiniteCost;
  for (const Edge& e : edges) cheapest = std::min(cheapest, EdgeCost(state.graph, e));
  const double l = state.step;
  const double n = state.n;
  return cheapest +
         (state.accumulated_cost / l + ctx.best_cost / n) * (n - l) / 2.0;
}

}  // namespace tnco
