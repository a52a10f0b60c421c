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

#include "tnco/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "tnco/solvers.h"

namespace tnco {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a combined word.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const char* OptimizerName(OptimizerKind k) {
  return k == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind ParseOptimizer(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

TrainConfig SingleNetworkDefaults() {
  TrainConfig cfg;
  cfg.rollout_steps = 2096;
  cfg.batch_size = 256;
  cfg.value_weight = 0.001;
  cfg.total_samples = 3000000;
  return cfg;
}

void CheckTrainConfig(const TrainConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(cfg.rollout_steps >= 1, "rollout_steps must be >= 1");
  require(cfg.batch_size >= 1, "batch_size must be >= 1");
  require(cfg.ppo_epochs >= 0, "ppo_epochs must be >= 0");
  require(cfg.learning_rate > 0, "learning_rate must be > 0");
  require(cfg.value_weight >= 0, "value_weight must be >= 0");
  require(cfg.entropy_weight >= 0, "entropy_weight must be >= 0");
  require(cfg.clip_ratio > 0, "clip_ratio must be > 0");
  require(cfg.reward_scale >= 0, "reward_scale must be >= 0");
  require(cfg.optimistic_buffer_size >= 1,
          "optimistic_buffer_size must be >= 1");
  require(cfg.optimistic_capacity >= cfg.optimistic_buffer_size,
          "optimistic_capacity must be >= optimistic_buffer_size");
  require(cfg.total_samples >= 1, "total_samples must be >= 1");
  require(cfg.time_limit_s >= 0, "time_limit_s must be >= 0");
  require(cfg.inference_paths >= 1, "inference_paths must be >= 1");
  require(cfg.inference_every >= 1, "inference_every must be >= 1");
  require(cfg.num_envs >= 1, "num_envs must be >= 1");
  require(cfg.max_grad_norm >= 0, "max_grad_norm must be >= 0");
  require(cfg.gae_lambda >= 0 && cfg.gae_lambda <= 1,
          "gae_lambda must be in [0, 1]");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), lr_(learning_rate) {}

void Optimizer::Apply(PolicyParams& params,
                      const std::vector<Eigen::MatrixXd>& grads) {
  if (kind_ == OptimizerKind::kSgd) {
    for (std::size_t k = 0; k < grads.size(); ++k) {
      params.tensors[k] -= lr_ * grads[k];
    }
    return;
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  if (m_.empty()) {
    for (const auto& g : grads) {
      m_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
      v_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    }
  }
  ++step_;
  const double c1 = 1 - std::pow(kBeta1, step_);
  const double c2 = 1 - std::pow(kBeta2, step_);
  for (std::size_t k = 0; k < grads.size(); ++k) {
    m_[k] = kBeta1 * m_[k] + (1 - kBeta1) * grads[k];
    v_[k] = kBeta2 * v_[k] + (1 - kBeta2) * grads[k].cwiseAbs2();
    params.tensors[k].array() -=
        lr_ * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + kEps);
  }
}

double ClipGradNorm(std::vector<Eigen::MatrixXd>& grads, double max_norm) {
  double sq = 0;
  for (const auto& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    for (auto& g : grads) g *= max_norm / norm;
  }
  return norm;
}

Flops PathRegistry::best_cost(int slot) const {
  if (slot < 0 || slot >= static_cast<int>(best.size()) || !best[slot]) {
    return kInfiniteCost;
  }
  return best[slot]->total_cost;
}

bool PathRegistry::Offer(int slot, const ContractionPath& path) {
  if (slot < 0 || slot >= static_cast<int>(best.size())) return false;
  if (best[slot] && best[slot]->total_cost <= path.total_cost) return false;
  best[slot] = path;
  return true;
}

namespace {

int SampleFrom(const Eigen::VectorXd& probs, int begin, int end,
               std::mt19937_64& rng) {
  double total = 0;
  for (int r = begin; r < end; ++r) total += probs[r];
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double target = u(rng) * total;
  double acc = 0;
  int last_positive = begin;
  for (int r = begin; r < end; ++r) {
    if (probs[r] <= 0) continue;
    acc += probs[r];
    last_positive = r;
    if (target < acc) return r - begin;
  }
  return last_positive - begin;
}

int ArgMax(const Eigen::VectorXd& probs, int begin, int end) {
  int best = begin;
  for (int r = begin + 1; r < end; ++r) {
    if (probs[r] > probs[best]) best = r;
  }
  return best - begin;
}

PolicyOutput EvaluateMany(const PolicyParams& params,
                          const std::vector<GraphBatch>& batches,
                          GraphBatch* joined = nullptr) {
  std::vector<const GraphBatch*> parts;
  parts.reserve(batches.size());
  for (const auto& b : batches) parts.push_back(&b);
  GraphBatch batch = ConcatBatches(parts);
  PolicyOutput out = Evaluate(params, batch);
  if (joined) *joined = std::move(batch);
  return out;
}

void RequireContractible(const TensorNetwork& net) {
  if (net.num_nodes() < 2) {
    throw std::invalid_argument("training networks need at least 2 nodes");
  }
}

}  // namespace

Rollout CollectRollouts(const PolicyParams& params, const EpisodeSource& source,
                        PathRegistry& registry, const TrainConfig& cfg,
                        double reward_scale, std::mt19937_64& rng) {
  struct Active {
    EnvState state;
    int episode;
  };
  Rollout out;
  std::vector<Active> active;

  auto remaining = [&] {
    std::size_t r = out.records.size();
    for (const Active& a : active) r += a.state.n - 1 - a.state.step;
    return r;
  };
  auto fill = [&] {
    while (static_cast<int>(active.size()) < cfg.num_envs &&
           static_cast<int>(remaining()) < cfg.rollout_steps) {
      auto [net, slot] = source(rng);
      RequireContractible(net);
      Episode ep;
      ep.slot = slot;
      out.episodes.push_back(std::move(ep));
      active.push_back(
          {Reset(net), static_cast<int>(out.episodes.size()) - 1});
    }
  };

  fill();
  while (!active.empty()) {
    std::vector<GraphBatch> batches;
    batches.reserve(active.size());
    for (const Active& a : active) {
      batches.push_back(BuildBatch(a.state.graph, cfg.features));
    }
    GraphBatch joined;
    PolicyOutput pol = EvaluateMany(params, batches, &joined);

    std::vector<Active> still;
    for (std::size_t i = 0; i < active.size(); ++i) {
      Active& a = active[i];
      Episode& ep = out.episodes[a.episode];
      const int begin = joined.edge_offset[i];
      const int end = joined.edge_offset[i + 1];
      const int action = SampleFrom(pol.probs, begin, end, rng);
      const Edge edge = a.state.graph.edges()[action];

      PruneContext ctx{registry.best_cost(ep.slot), cfg.path_pruning};
      StepOutcome step = Step(a.state, edge, ctx);

      RolloutRecord rec;
      rec.episode = a.episode;
      rec.batch = std::move(batches[i]);
      rec.graph = a.state.graph;
      rec.action = action;
      rec.edge = edge;
      rec.log_prob = std::log(pol.probs[begin + action]);
      rec.cost = step.cost;
      rec.reward = -step.cost / reward_scale;
      rec.value = pol.value[i];
      rec.terminal = step.done;
      rec.termination_value = step.termination_value;
      ep.records.push_back(static_cast<int>(out.records.size()));
      out.records.push_back(std::move(rec));

      a.state = std::move(step.state);
      if (a.state.done) {
        ep.path = a.state.path;
        ep.cost = a.state.accumulated_cost;
        ep.pruned = a.state.pruned;
        if (!ep.pruned) registry.Offer(ep.slot, ep.path);
      } else {
        still.push_back(std::move(a));
      }
    }
    active = std::move(still);
    fill();
  }
  return out;
}

Advantages ComputeAdvantages(const Rollout& rollout, const TrainConfig& cfg,
                             double reward_scale) {
  Advantages adv;
  adv.advantage.assign(rollout.records.size(), 0);
  adv.returns.assign(rollout.records.size(), 0);
  for (const Episode& ep : rollout.episodes) {
    if (ep.records.empty()) continue;
    const RolloutRecord& last = rollout.records[ep.records.back()];
    const double tail =
        last.termination_value ? -*last.termination_value / reward_scale : 0;
    double ret = tail;
    double next_value = tail;
    double gae = 0;
    for (auto it = ep.records.rbegin(); it != ep.records.rend(); ++it) {
      const RolloutRecord& r = rollout.records[*it];
      if (cfg.use_gae) {
        const double delta = r.reward + next_value - r.value;
        gae = delta + cfg.gae_lambda * gae;
        adv.advantage[*it] = gae;
        adv.returns[*it] = gae + r.value;
        next_value = r.value;
      } else {
        ret += r.reward;
        adv.returns[*it] = ret;
        adv.advantage[*it] = ret - r.value;
      }
    }
  }
  return adv;
}

LossStats PpoStep(PolicyParams& params, Optimizer& opt,
                  std::span<const PpoSample> samples, const TrainConfig& cfg,
                  bool normalize_advantages) {
  LossStats stats;
  if (samples.empty()) return stats;
  const int count = static_cast<int>(samples.size());

  std::vector<const GraphBatch*> parts;
  Eigen::MatrixXd old_log_prob(count, 1), advantage(count, 1),
      target(count, 1);
  for (int i = 0; i < count; ++i) {
    parts.push_back(samples[i].batch);
    old_log_prob(i, 0) = samples[i].old_log_prob;
    advantage(i, 0) = samples[i].advantage;
    target(i, 0) = samples[i].target;
  }
  if (normalize_advantages && count > 1) {
    const double mean = advantage.mean();
    const double var = (advantage.array() - mean).square().mean();
    advantage = (advantage.array() - mean) / (std::sqrt(var) + 1e-8);
  }
  GraphBatch batch = ConcatBatches(parts);
  std::vector<int> rows(count);
  for (int i = 0; i < count; ++i) {
    rows[i] = batch.edge_offset[i] + samples[i].action;
  }

  ad::Tape t;
  ParamVars vars = RecordParams(t, params);
  PolicyVars pv = Forward(t, params, vars, batch);
  ad::Var log_prob = t.Log(t.GatherRows(pv.probs, rows));
  ad::Var ratio = t.Exp(t.Sub(log_prob, t.Constant(old_log_prob)));
  ad::Var adv = t.Constant(advantage);
  ad::Var surrogate = t.Minimum(
      t.Mul(ratio, adv),
      t.Mul(t.Clamp(ratio, 1 - cfg.clip_ratio, 1 + cfg.clip_ratio), adv));
  ad::Var policy_loss = t.Scale(t.Mean(surrogate), -1);
  ad::Var value_loss =
      t.Mean(t.Square(t.Sub(pv.value, t.Constant(target))));
  ad::Var total = t.Add(policy_loss, t.Scale(value_loss, cfg.value_weight));
  if (cfg.entropy_weight > 0) {
    ad::Var plogp = t.Mul(pv.probs, t.Log(pv.probs));
    ad::Var entropy = t.Scale(t.Sum(plogp), -1.0 / count);
    stats.entropy = t.value(entropy)(0, 0);
    total = t.Sub(total, t.Scale(entropy, cfg.entropy_weight));
  }
  t.Backward(total);

  std::vector<Eigen::MatrixXd> grads;
  grads.reserve(vars.vars.size());
  for (ad::Var v : vars.vars) grads.push_back(t.grad(v));
  ClipGradNorm(grads, cfg.max_grad_norm);
  opt.Apply(params, grads);

  stats.policy_loss = t.value(policy_loss)(0, 0);
  stats.value_loss = t.value(value_loss)(0, 0);
  stats.updates = 1;
  return stats;
}

namespace {

void Accumulate(LossStats& into, const LossStats& s) {
  into.policy_loss += s.policy_loss;
  into.value_loss += s.value_loss;
  into.entropy += s.entropy;
  into.updates += s.updates;
}

LossStats Averaged(LossStats s) {
  if (s.updates > 0) {
    s.policy_loss /= s.updates;
    s.value_loss /= s.updates;
    s.entropy /= s.updates;
  }
  return s;
}

LossStats RunMinibatches(PolicyParams& params, Optimizer& opt,
                         const std::vector<PpoSample>& samples, int epochs,
                         const TrainConfig& cfg, bool normalize,
                         std::mt19937_64& rng) {
  LossStats total;
  std::vector<PpoSample> order = samples;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t len =
          std::min<std::size_t>(cfg.batch_size, order.size() - start);
      Accumulate(total,
                 PpoStep(params, opt,
                         std::span<const PpoSample>(order).subspan(start, len),
                         cfg, normalize));
    }
  }
  return Averaged(total);
}

}  // namespace

LossStats PpoUpdate(PolicyParams& params, Optimizer& opt,
                    const Rollout& rollout, const Advantages& adv,
                    const TrainConfig& cfg, std::mt19937_64& rng) {
  std::vector<PpoSample> samples;
  samples.reserve(rollout.records.size());
  for (std::size_t i = 0; i < rollout.records.size(); ++i) {
    const RolloutRecord& r = rollout.records[i];
    samples.push_back(
        {&r.batch, r.action, r.log_prob, adv.advantage[i], adv.returns[i]});
  }
  return RunMinibatches(params, opt, samples, cfg.ppo_epochs, cfg,
                        cfg.normalize_advantages, rng);
}

void OptimisticBuffer::Merge(const Rollout& rollout) {
  for (const Episode& ep : rollout.episodes) {
    if (ep.pruned || ep.records.empty()) continue;
    Flops to_go = 0;
    std::vector<OptimisticSample> staged;
    for (auto it = ep.records.rbegin(); it != ep.records.rend(); ++it) {
      const RolloutRecord& r = rollout.records[*it];
      to_go += r.cost;
      staged.push_back({r.graph, r.edge, r.cost, to_go});
    }
    for (auto it = staged.rbegin(); it != staged.rend(); ++it) {
      samples_.push_back(std::move(*it));
    }
  }
}

namespace {

constexpr std::size_t kEvalChunk = 256;

// Critic values for every graph, evaluated in chunks.
std::vector<double> CriticValues(const PolicyParams& params,
                                 const std::vector<const TensorNetwork*>& nets,
                                 const FeatureOptions& features) {
  std::vector<double> values;
  values.reserve(nets.size());
  for (std::size_t start = 0; start < nets.size(); start += kEvalChunk) {
    const std::size_t end = std::min(nets.size(), start + kEvalChunk);
    std::vector<GraphBatch> batches;
    for (std::size_t k = start; k < end; ++k) {
      batches.push_back(BuildBatch(*nets[k], features));
    }
    PolicyOutput out = EvaluateMany(params, batches);
    for (Eigen::Index k = 0; k < out.value.size(); ++k) {
      values.push_back(out.value[k]);
    }
  }
  return values;
}

}  // namespace

std::vector<double> OptimisticBuffer::Refresh(const PolicyParams& params,
                                              const FeatureOptions& features,
                                              double reward_scale) {
  std::vector<const TensorNetwork*> nets;
  for (const auto& s : samples_) nets.push_back(&s.graph);
  std::vector<double> values = CriticValues(params, nets, features);

  // The critic predicts -cost / reward_scale; compare in scaled units.
  std::vector<std::pair<double, std::size_t>> kept;
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const double score =
        -values[k] - samples_[k].cost_to_go / reward_scale;
    if (score > 0) kept.emplace_back(score, k);
  }
  if (static_cast<int>(kept.size()) > capacity_) {
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.first > b.first;
    });
    kept.resize(capacity_);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second < b.second;
    });
  }
  std::vector<OptimisticSample> next;
  std::vector<double> scores;
  for (const auto& [score, k] : kept) {
    next.push_back(std::move(samples_[k]));
    scores.push_back(score);
  }
  samples_ = std::move(next);
  return scores;
}

std::vector<int> OptimisticBuffer::Draw(std::span<const double> scores,
                                        int count, std::mt19937_64& rng) {
  std::vector<double> cumulative;
  double total = 0;
  for (double s : scores) {
    total += std::max(s, 0.0);
    cumulative.push_back(total);
  }
  std::vector<int> out;
  if (!(total > 0)) return out;
  std::uniform_real_distribution<double> u(0.0, total);
  for (int k = 0; k < count; ++k) {
    const double x = u(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    int idx = static_cast<int>(
        std::min<std::ptrdiff_t>(it - cumulative.begin(), scores.size() - 1));
    // Skip zero-width slots left by the clamp to the last entry.
    while (idx > 0 && scores[idx] <= 0) --idx;
    out.push_back(idx);
  }
  return out;
}

bool OptimisticUpdate(PolicyParams& params, Optimizer& opt,
                      OptimisticBuffer& buffer, const Rollout& rollout,
                      const TrainConfig& cfg, double reward_scale,
                      std::mt19937_64& rng) {
  buffer.Merge(rollout);
  std::vector<double> scores =
      buffer.Refresh(params, cfg.features, reward_scale);
  std::vector<int> drawn =
      OptimisticBuffer::Draw(scores, cfg.optimistic_buffer_size, rng);
  if (drawn.empty()) return false;

  // Features and current policy outputs per distinct drawn sample.
  std::vector<int> distinct = drawn;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  std::vector<GraphBatch> batches;
  std::vector<int> actions;
  std::vector<int> slot_of(buffer.size(), -1);
  for (int k : distinct) {
    const OptimisticSample& s = buffer.samples()[k];
    slot_of[k] = static_cast<int>(batches.size());
    batches.push_back(BuildBatch(s.graph, cfg.features));
    actions.push_back(static_cast<int>(*s.graph.edge_position(s.edge.u, s.edge.v)));
  }
  std::vector<double> log_probs, values;
  for (std::size_t start = 0; start < batches.size(); start += kEvalChunk) {
    const std::size_t end = std::min(batches.size(), start + kEvalChunk);
    std::vector<GraphBatch> chunk(batches.begin() + start,
                                  batches.begin() + end);
    GraphBatch joined;
    PolicyOutput out = EvaluateMany(params, chunk, &joined);
    for (std::size_t k = start; k < end; ++k) {
      const int row = joined.edge_offset[k - start] + actions[k];
      log_probs.push_back(std::log(out.probs[row]));
      values.push_back(out.value[k - start]);
    }
  }

  std::vector<PpoSample> samples;
  samples.reserve(drawn.size());
  for (int k : drawn) {
    const int slot = slot_of[k];
    const double ret = -buffer.samples()[k].cost_to_go / reward_scale;
    samples.push_back({&batches[slot], actions[slot], log_probs[slot],
                       ret - values[slot], ret});
  }
  RunMinibatches(params, opt, samples, 1, cfg, false, rng);
  return true;
}

ContractionPath Infer(const PolicyParams& params, const TensorNetwork& net,
                      const InferOptions& opts) {
  if (opts.paths < 1) throw std::invalid_argument("infer needs paths >= 1");
  ValidateOrThrow(net);
  if (net.num_nodes() < 2) return ContractionPath{};

  std::optional<ContractionPath> best = opts.incumbent;
  auto best_cost = [&] { return best ? best->total_cost : kInfiniteCost; };
  constexpr int kChunk = 64;

  struct Sample {
    EnvState state;
    std::mt19937_64 rng;
  };
  for (int start = 0; start < opts.paths; start += kChunk) {
    std::vector<Sample> active;
    for (int j = start; j < std::min(opts.paths, start + kChunk); ++j) {
      active.push_back({Reset(net), std::mt19937_64(MixSeed(opts.seed, j))});
    }
    while (!active.empty()) {
      std::vector<GraphBatch> batches;
      for (const Sample& s : active) {
        batches.push_back(BuildBatch(s.state.graph, opts.features));
      }
      GraphBatch joined;
      PolicyOutput pol = EvaluateMany(params, batches, &joined);
      std::vector<Sample> still;
      for (std::size_t i = 0; i < active.size(); ++i) {
        Sample& s = active[i];
        const int begin = joined.edge_offset[i];
        const int end = joined.edge_offset[i + 1];
        const int action = opts.argmax ? ArgMax(pol.probs, begin, end)
                                       : SampleFrom(pol.probs, begin, end,
                                                    s.rng);
        PruneContext ctx{best_cost(), opts.pruning};
        StepOutcome step =
            Step(s.state, s.state.graph.edges()[action], ctx);
        s.state = std::move(step.state);
        if (!s.state.done) {
          still.push_back(std::move(s));
        } else if (!s.state.pruned &&
                   s.state.accumulated_cost < best_cost()) {
          best = s.state.path;
        }
      }
      active = std::move(still);
    }
  }
  return *best;
}

const char* TrainModeName(TrainMode m) {
  switch (m) {
    case TrainMode::kSingle: return "single";
    case TrainMode::kMulti: return "multi";
    case TrainMode::kFixedSet: return "fixed";
  }
  return "single";
}

TrainMode ParseTrainMode(const std::string& name) {
  if (name == "single") return TrainMode::kSingle;
  if (name == "multi") return TrainMode::kMulti;
  if (name == "fixed") return TrainMode::kFixedSet;
  throw std::invalid_argument("unknown training mode '" + name + "'");
}

std::string TrainLogRecord::ToJson() const {
  auto finite_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::json j = {{"epoch", epoch},
                      {"samples", samples},
                      {"best_cost", finite_or_null(best_cost)},
                      {"mean_episode_cost", finite_or_null(mean_episode_cost)},
                      {"prune_rate", prune_rate},
                      {"buffer_occupancy", buffer_occupancy},
                      {"policy_loss", finite_or_null(policy_loss)},
                      {"value_loss", finite_or_null(value_loss)}};
  j["inference_cost"] =
      inference_cost ? finite_or_null(*inference_cost) : nlohmann::json(nullptr);
  return j.dump();
}

TrainResult Train(const TrainInputs& inputs, const GnnConfig& gnn,
                  const TrainConfig& cfg, std::ostream* log_out) {
  CheckTrainConfig(cfg);
  GnnConfig gcfg = gnn;
  gcfg.edge_features = EdgeFeatureWidth(cfg.features);
  CheckGnnConfig(gcfg);

  if (inputs.mode != TrainMode::kMulti) {
    if (inputs.nets.empty()) {
      throw std::invalid_argument("training needs at least one network");
    }
    for (const auto& net : inputs.nets) {
      ValidateOrThrow(net);
      RequireContractible(net);
    }
  } else {
    CheckGeneratorConfig(inputs.generator);
  }

  TrainResult result;
  result.reward_scale = cfg.reward_scale;
  if (result.reward_scale == 0) {
    const TensorNetwork ref = inputs.mode == TrainMode::kMulti
                                  ? RandomNetwork(inputs.generator)
                                  : inputs.nets.front();
    result.reward_scale = std::max<Flops>(1, GreedySolve(ref).total_cost);
  }
  const double scale = result.reward_scale;

  PolicyParams params = InitParams(gcfg, cfg.seed);
  Optimizer opt(cfg.optimizer, cfg.learning_rate);
  std::mt19937_64 rng(MixSeed(cfg.seed, 1));
  OptimisticBuffer buffer(cfg.optimistic_capacity);

  PathRegistry registry;
  std::uint64_t generated = 0;
  EpisodeSource source;
  switch (inputs.mode) {
    case TrainMode::kSingle:
      registry.best.resize(1);
      source = [&](std::mt19937_64&) {
        return std::make_pair(inputs.nets.front(), 0);
      };
      break;
    case TrainMode::kFixedSet:
      registry.best.resize(inputs.nets.size());
      source = [&](std::mt19937_64& r) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(inputs.nets.size()) - 1);
        const int k = pick(r);
        return std::make_pair(inputs.nets[k], k);
      };
      break;
    case TrainMode::kMulti:
      source = [&](std::mt19937_64&) {
        GeneratorConfig g = inputs.generator;
        g.seed = MixSeed(inputs.generator.seed, generated++);
        return std::make_pair(RandomNetwork(g), -1);
      };
      break;
  }

  auto registry_best = [&] {
    Flops b = kInfiniteCost;
    for (std::size_t k = 0; k < registry.best.size(); ++k) {
      b = std::min(b, registry.best_cost(static_cast<int>(k)));
    }
    return b;
  };
  auto infer_single = [&](int epoch) {
    InferOptions io;
    io.paths = cfg.inference_paths;
    io.seed = MixSeed(cfg.seed, 1000 + epoch);
    io.features = cfg.features;
    ContractionPath p = Infer(params, inputs.nets.front(), io);
    registry.Offer(0, p);
    return p.total_cost;
  };

  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (cfg.time_limit_s <= 0) return false;
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    return elapsed.count() >= cfg.time_limit_s;
  };

  int epoch = 0;
  while (result.samples < cfg.total_samples && !out_of_time()) {
    Rollout rollout =
        CollectRollouts(params, source, registry, cfg, scale, rng);
    result.samples += static_cast<std::int64_t>(rollout.records.size());

    Advantages adv = ComputeAdvantages(rollout, cfg, scale);
    LossStats stats = PpoUpdate(params, opt, rollout, adv, cfg, rng);
    if (cfg.optimistic_buffer) {
      OptimisticUpdate(params, opt, buffer, rollout, cfg, scale, rng);
    }

    TrainLogRecord rec;
    rec.epoch = epoch;
    rec.samples = result.samples;
    rec.policy_loss = stats.policy_loss;
    rec.value_loss = stats.value_loss;
    rec.buffer_occupancy = buffer.size();
    int completed = 0, pruned = 0;
    double cost_sum = 0;
    for (const Episode& ep : rollout.episodes) {
      if (ep.pruned) {
        ++pruned;
      } else {
        ++completed;
        cost_sum += ep.cost;
      }
    }
    rec.mean_episode_cost =
        completed > 0 ? cost_sum / completed : kInfiniteCost;
    rec.prune_rate = rollout.episodes.empty()
                         ? 0
                         : static_cast<double>(pruned) /
                               static_cast<double>(rollout.episodes.size());
    if (inputs.mode == TrainMode::kSingle &&
        (epoch + 1) % cfg.inference_every == 0) {
      rec.inference_cost = infer_single(epoch);
    }
    rec.best_cost = registry_best();
    if (log_out) *log_out << rec.ToJson() << '\n';
    result.log.push_back(rec);
    ++epoch;
  }

  if (inputs.mode == TrainMode::kSingle) {
    const Flops final_cost = infer_single(epoch);
    if (!result.log.empty()) {
      result.log.back().inference_cost = final_cost;
      result.log.back().best_cost = registry_best();
    }
    result.best_path = registry.best[0];
  }
  result.params = std::move(params);
  return result;
}

}  // namespace tnco
