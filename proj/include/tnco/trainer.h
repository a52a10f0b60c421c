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

#ifndef TNCO_TRAINER_H_
#define TNCO_TRAINER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tnco/env.h"
#include "tnco/features.h"
#include "tnco/generator.h"
#include "tnco/gnn.h"
#include "tnco/network.h"

namespace tnco {

// Deterministic seed derivation for sub-streams.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

enum class OptimizerKind { kSgd, kAdam };

const char* OptimizerName(OptimizerKind k);
OptimizerKind ParseOptimizer(const std::string& name);

struct TrainConfig {
  int rollout_steps = 4192;
  int batch_size = 512;
  int ppo_epochs = 8;
  double learning_rate = 3e-2;
  double value_weight = 0.1;
  double entropy_weight = 0;
  double clip_ratio = 0.2;
  // Costs are divided by this before becoming rewards. Zero picks the greedy
  // cost of the first training network.
  double reward_scale = 1e14;
  int optimistic_buffer_size = 4096;
  // Samples kept between updates; must be at least optimistic_buffer_size.
  int optimistic_capacity = 8192;
  std::int64_t total_samples = 1000000;
  // Stop after the first rollout phase that ends past this many seconds
  // (0: no limit).
  double time_limit_s = 0;
  int inference_paths = 50;
  // Single-network mode evaluates the policy every this many rollout phases.
  int inference_every = 40;
  // Episodes run in lockstep during collection.
  int num_envs = 32;
  std::uint64_t seed = 0;

  bool normalize_advantages = true;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  // Global gradient-norm clip; zero disables.
  double max_grad_norm = 0;
  // Undiscounted GAE instead of plain returns.
  bool use_gae = false;
  double gae_lambda = 0.95;

  // Ablation switches.
  FeatureOptions features;
  bool optimistic_buffer = true;
  bool path_pruning = true;
};

// Defaults for training on a single network.
TrainConfig SingleNetworkDefaults();

// Throws std::invalid_argument on non-positive sizes or rates, negative
// weights, or a capacity below the buffer draw size.
void CheckTrainConfig(const TrainConfig& cfg);

// Plain gradient descent or Adam over every parameter tensor.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);
  void Apply(PolicyParams& params, const std::vector<Eigen::MatrixXd>& grads);

 private:
  OptimizerKind kind_;
  double lr_;
  long step_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

// Rescales grads so their joint L2 norm is at most max_norm; returns the norm
// before clipping.
double ClipGradNorm(std::vector<Eigen::MatrixXd>& grads, double max_norm);

struct RolloutRecord {
  int episode = 0;
  GraphBatch batch;
  TensorNetwork graph;
  int action = 0;  // edge row within batch
  Edge edge;
  double log_prob = 0;
  Flops cost = 0;  // unscaled
  double reward = 0;
  double value = 0;
  bool terminal = false;
  // Unscaled; set on the last record of a pruned episode.
  std::optional<Flops> termination_value;
};

struct Episode {
  int slot = -1;  // registry slot of the network, -1 when unregistered
  ContractionPath path;
  Flops cost = 0;
  bool pruned = false;
  std::vector<int> records;  // indices into Rollout::records, in step order
};

// Cheapest completed path per registered network.
struct PathRegistry {
  std::vector<std::optional<ContractionPath>> best;

  Flops best_cost(int slot) const;
  // Returns true when the path improves the slot.
  bool Offer(int slot, const ContractionPath& path);
};

// Supplies the network for each new episode: returns (network, slot).
using EpisodeSource = std::function<std::pair<TensorNetwork, int>(
    std::mt19937_64& rng)>;

struct Rollout {
  std::vector<RolloutRecord> records;
  std::vector<Episode> episodes;
};

// Runs episodes in lockstep batches of cfg.num_envs, sampling each action
// from the policy, until at least cfg.rollout_steps records exist; episodes
// in flight are always finished. Completed paths update the registry, and
// with cfg.path_pruning the registry's best cost drives pruning.
Rollout CollectRollouts(const PolicyParams& params, const EpisodeSource& source,
                        PathRegistry& registry, const TrainConfig& cfg,
                        double reward_scale, std::mt19937_64& rng);

struct Advantages {
  std::vector<double> advantage;
  std::vector<double> returns;
};

// Plain returns are suffix sums of the scaled rewards, plus
// -termination_value / reward_scale on pruned episodes. Advantage is the
// return minus the recorded value.
Advantages ComputeAdvantages(const Rollout& rollout, const TrainConfig& cfg,
                             double reward_scale);

struct LossStats {
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  int updates = 0;
};

// Training targets for one sampled transition.
struct PpoSample {
  const GraphBatch* batch = nullptr;
  int action = 0;
  double old_log_prob = 0;
  double advantage = 0;
  double target = 0;
};

// One clipped-surrogate gradient step over the samples.
LossStats PpoStep(PolicyParams& params, Optimizer& opt,
                  std::span<const PpoSample> samples, const TrainConfig& cfg,
                  bool normalize_advantages);

// cfg.ppo_epochs shuffled passes of minibatches of cfg.batch_size.
LossStats PpoUpdate(PolicyParams& params, Optimizer& opt,
                    const Rollout& rollout, const Advantages& adv,
                    const TrainConfig& cfg, std::mt19937_64& rng);

struct OptimisticSample {
  TensorNetwork graph;
  Edge edge;
  Flops cost = 0;          // w(e)
  Flops cost_to_go = 0;    // C(G, e), includes w(e)
};

class OptimisticBuffer {
 public:
  explicit OptimisticBuffer(int capacity) : capacity_(capacity) {}

  // Adds every transition of the completed episodes in the rollout.
  void Merge(const Rollout& rollout);
  void Add(OptimisticSample s) { samples_.push_back(std::move(s)); }

  // Recomputes max(V(G) - C(G, e), 0) with the current critic, where V is
  // the critic's cost estimate, drops zero-score samples and keeps the
  // highest scores up to capacity. Returns the scores of the kept samples.
  std::vector<double> Refresh(const PolicyParams& params,
                              const FeatureOptions& features,
                              double reward_scale);

  // Draws count indices with probability proportional to scores.
  static std::vector<int> Draw(std::span<const double> scores, int count,
                               std::mt19937_64& rng);

  const std::vector<OptimisticSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  int capacity_;
  std::vector<OptimisticSample> samples_;
};

// Merges the rollout, refreshes scores, draws cfg.optimistic_buffer_size
// samples and takes PPO steps treating -C(G, e) / reward_scale as the
// return. Returns false when nothing was drawn.
bool OptimisticUpdate(PolicyParams& params, Optimizer& opt,
                      OptimisticBuffer& buffer, const Rollout& rollout,
                      const TrainConfig& cfg, double reward_scale,
                      std::mt19937_64& rng);

struct InferOptions {
  int paths = 50;
  std::uint64_t seed = 0;
  // Always take the most probable edge instead of sampling.
  bool argmax = false;
  bool pruning = false;
  FeatureOptions features;
  // Returned when every sample is pruned.
  std::optional<ContractionPath> incumbent;
};

// Samples opts.paths episodes and returns the cheapest completed one.
ContractionPath Infer(const PolicyParams& params, const TensorNetwork& net,
                      const InferOptions& opts);

enum class TrainMode { kSingle, kMulti, kFixedSet };

const char* TrainModeName(TrainMode m);
TrainMode ParseTrainMode(const std::string& name);

struct TrainLogRecord {
  int epoch = 0;
  std::int64_t samples = 0;
  Flops best_cost = kInfiniteCost;
  double mean_episode_cost = 0;
  double prune_rate = 0;
  std::size_t buffer_occupancy = 0;
  double policy_loss = 0;
  double value_loss = 0;
  std::optional<Flops> inference_cost;

  std::string ToJson() const;
};

struct TrainResult {
  PolicyParams params;
  double reward_scale = 0;
  // Single-network mode: best path seen during training or inference.
  std::optional<ContractionPath> best_path;
  std::vector<TrainLogRecord> log;
  std::int64_t samples = 0;
};

struct TrainInputs {
  TrainMode mode = TrainMode::kSingle;
  // kSingle uses nets[0]; kFixedSet draws uniformly from nets.
  std::vector<TensorNetwork> nets;
  // kMulti draws a fresh network per episode.
  GeneratorConfig generator;
};

// Alternates collection, PPO and optimistic updates until cfg.total_samples
// transitions have been collected or cfg.time_limit_s has passed. Log records are also written to log_out
// as JSON lines when it is non-null.
TrainResult Train(const TrainInputs& inputs, const GnnConfig& gnn,
                  const TrainConfig& cfg, std::ostream* log_out = nullptr);

}  // namespace tnco

#endif  // TNCO_TRAINER_H_
