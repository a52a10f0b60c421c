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

#ifndef TNCO_GNN_H_
#define TNCO_GNN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tnco/autodiff.h"
#include "tnco/features.h"

namespace tnco {

enum class Aggregation { kMean, kSum, kMax };
enum class ScoreNorm { kLinear, kSoftmax };

const char* AggregationName(Aggregation a);
Aggregation ParseAggregation(const std::string& name);
const char* ScoreNormName(ScoreNorm s);
ScoreNorm ParseScoreNorm(const std::string& name);

struct GnnConfig {
  int layers = 3;
  int hidden = 128;
  Aggregation aggregation = Aggregation::kMean;
  bool use_bias = false;
  bool pair_norm = false;
  // Added to shifted scores before normalizing.
  double epsilon = 1e-2;
  ScoreNorm score_norm = ScoreNorm::kLinear;
  // Critic reads the actor's node features instead of owning a trunk.
  bool share_critic = false;
  int edge_features = 9;
};

// Throws std::invalid_argument for layers < 1, hidden < 1, epsilon <= 0 or
// edge_features < 1.
void CheckGnnConfig(const GnnConfig& cfg);

// Named parameter tensors in a fixed order.
struct PolicyParams {
  GnnConfig config;
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> tensors;

  int index_of(const std::string& name) const;
  std::size_t num_scalars() const;
  bool all_finite() const;
};

// Glorot-uniform weights, zero biases; deterministic per seed.
PolicyParams InitParams(const GnnConfig& cfg, std::uint64_t seed);

// Same shapes, every entry zero.
PolicyParams ZeroLike(const PolicyParams& params);

// Tape handles for every tensor of a PolicyParams.
struct ParamVars {
  std::vector<ad::Var> vars;
};

ParamVars RecordParams(ad::Tape& tape, const PolicyParams& params);

struct PolicyVars {
  ad::Var scores;  // edges x 1
  ad::Var probs;   // edges x 1, sums to one within each graph
  ad::Var value;   // graphs x 1
};

// Message-passing actor and critic. Each layer updates edges from (edge,
// sum of endpoint nodes, global), then nodes from the aggregate of incident
// edge messages, then the global vector from edge and node means. Update
// functions are two-layer tanh perceptrons. The actor's last layer emits one
// score per edge; the critic mean-pools its node features per graph and maps
// them to a scalar.
PolicyVars Forward(ad::Tape& tape, const PolicyParams& params,
                   const ParamVars& vars, const GraphBatch& batch);

struct PolicyOutput {
  Eigen::VectorXd scores;
  Eigen::VectorXd probs;
  Eigen::VectorXd value;
};

PolicyOutput Evaluate(const PolicyParams& params, const GraphBatch& batch);

// Per-graph normalization of edge scores. Linear: s' = s - min s + eps,
// p = s' / sum s'. Softmax: p = exp(s - max s) / sum.
Eigen::VectorXd NormalizeScores(const Eigen::VectorXd& scores, double epsilon,
                                ScoreNorm norm = ScoreNorm::kLinear);

// Recorded loss -> gradient of the loss for every parameter tensor.
using LossFn = std::function<ad::Var(ad::Tape&, const ParamVars&)>;

struct LossAndGrad {
  double loss = 0;
  std::vector<Eigen::MatrixXd> grads;
};

LossAndGrad ComputeGradients(const PolicyParams& params, const LossFn& loss);

// Checkpoint text format:
//
//   tnco-checkpoint 1
//   gnn <json object>
//   meta <json object>          (optional, free-form)
//   tensor <name> <rows> <cols>
//   <rows*cols hexadecimal floats, row-major>
//
// Values are written as hex floats so a round trip is bit-exact.
void WriteCheckpoint(std::ostream& out, const PolicyParams& params,
                     const std::string& meta_json = "");
PolicyParams ReadCheckpoint(std::istream& in, std::string* meta_json = nullptr);
void SaveCheckpoint(const std::filesystem::path& file,
                    const PolicyParams& params,
                    const std::string& meta_json = "");
PolicyParams LoadCheckpoint(const std::filesystem::path& file,
                            std::string* meta_json = nullptr);

}  // namespace tnco

#endif  // TNCO_GNN_H_
