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

#include "tnco/gnn.h"

#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace tnco {

const char* AggregationName(Aggregation a) {
  switch (a) {
    case Aggregation::kMean: return "mean";
    case Aggregation::kSum: return "sum";
    case Aggregation::kMax: return "max";
  }
  return "mean";
}

Aggregation ParseAggregation(const std::string& name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "sum") return Aggregation::kSum;
  if (name == "max") return Aggregation::kMax;
  throw std::invalid_argument("unknown aggregation '" + name + "'");
}

const char* ScoreNormName(ScoreNorm s) {
  return s == ScoreNorm::kLinear ? "linear" : "softmax";
}

ScoreNorm ParseScoreNorm(const std::string& name) {
  if (name == "linear") return ScoreNorm::kLinear;
  if (name == "softmax") return ScoreNorm::kSoftmax;
  throw std::invalid_argument("unknown score normalization '" + name + "'");
}

void CheckGnnConfig(const GnnConfig& cfg) {
  if (cfg.layers < 1) throw std::invalid_argument("gnn needs layers >= 1");
  if (cfg.hidden < 1) throw std::invalid_argument("gnn needs hidden >= 1");
  if (!(cfg.epsilon > 0)) throw std::invalid_argument("gnn needs epsilon > 0");
  if (cfg.edge_features < 1) {
    throw std::invalid_argument("gnn needs edge_features >= 1");
  }
}

int PolicyParams::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<int>(k);
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

std::size_t PolicyParams::num_scalars() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += static_cast<std::size_t>(t.size());
  return n;
}

bool PolicyParams::all_finite() const {
  for (const auto& t : tensors) {
    if (!t.allFinite()) return false;
  }
  return true;
}

namespace {

// Shapes of one two-layer perceptron.
struct MlpShape {
  std::string name;
  int in = 0;
  int out = 0;
};

struct LayerShape {
  MlpShape edge;
  std::optional<MlpShape> node;
  std::optional<MlpShape> global;
};

struct TrunkShape {
  std::string prefix;
  std::vector<LayerShape> layers;
};

TrunkShape MakeTrunk(const GnnConfig& cfg, const std::string& prefix,
                     bool actor) {
  TrunkShape trunk{prefix, {}};
  const int h = cfg.hidden;
  for (int i = 0; i < cfg.layers; ++i) {
    const bool last = i == cfg.layers - 1;
    const int e_in = i == 0 ? cfg.edge_features : h;
    const int x_in = i == 0 ? 1 : h;
    const int g_in = i == 0 ? 1 : h;
    const std::string base = prefix + ".l" + std::to_string(i);
    LayerShape layer;
    const int e_out = last && actor ? 1 : h;
    layer.edge = {base + ".edge", e_in + x_in + g_in, e_out};
    if (!(last && actor)) layer.node = MlpShape{base + ".node", e_out + x_in + g_in, h};
    if (!last) layer.global = MlpShape{base + ".global", e_out + h + g_in, h};
    trunk.layers.push_back(std::move(layer));
  }
  return trunk;
}

int ValueHeadWidth(const GnnConfig& cfg) {
  if (!cfg.share_critic) return cfg.hidden;
  return cfg.layers == 1 ? 1 : cfg.hidden;
}

template <typename Fn>
void ForEachMlp(const GnnConfig& cfg, Fn&& fn) {
  std::vector<TrunkShape> trunks{MakeTrunk(cfg, "actor", true)};
  if (!cfg.share_critic) trunks.push_back(MakeTrunk(cfg, "critic", false));
  for (const TrunkShape& t : trunks) {
    for (const LayerShape& l : t.layers) {
      fn(l.edge);
      if (l.node) fn(*l.node);
      if (l.global) fn(*l.global);
    }
  }
}

class ParamAdder {
 public:
  ParamAdder(PolicyParams& p, std::mt19937_64& rng) : p_(p), rng_(rng) {}

  void Weight(const std::string& name, int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = u(rng_);
    Add(name, std::move(w));
  }

  void Bias(const std::string& name, int cols) {
    Add(name, Eigen::MatrixXd::Zero(1, cols));
  }

 private:
  void Add(const std::string& name, Eigen::MatrixXd m) {
    p_.names.push_back(name);
    p_.tensors.push_back(std::move(m));
  }

  PolicyParams& p_;
  std::mt19937_64& rng_;
};

}  // namespace

PolicyParams InitParams(const GnnConfig& cfg, std::uint64_t seed) {
  CheckGnnConfig(cfg);
  PolicyParams p;
  p.config = cfg;
  std::mt19937_64 rng(seed);
  ParamAdder add(p, rng);
  ForEachMlp(cfg, [&](const MlpShape& m) {
    add.Weight(m.name + ".w1", m.in, cfg.hidden);
    if (cfg.use_bias) add.Bias(m.name + ".b1", cfg.hidden);
    add.Weight(m.name + ".w2", cfg.hidden, m.out);
    if (cfg.use_bias) add.Bias(m.name + ".b2", m.out);
  });
  add.Weight("value.w", ValueHeadWidth(cfg), 1);
  if (cfg.use_bias) add.Bias("value.b", 1);
  return p;
}

PolicyParams ZeroLike(const PolicyParams& params) {
  PolicyParams z = params;
  for (auto& t : z.tensors) t.setZero();
  return z;
}

ParamVars RecordParams(ad::Tape& tape, const PolicyParams& params) {
  ParamVars v;
  for (const auto& t : params.tensors) v.vars.push_back(tape.Constant(t));
  return v;
}

namespace {

class ForwardPass {
 public:
  ForwardPass(ad::Tape& tape, const PolicyParams& params,
              const ParamVars& vars, const GraphBatch& batch)
      : t_(tape), p_(params), v_(vars), b_(batch), cfg_(params.config) {
    const int m = batch.num_edges();
    incidence_rows_.resize(2 * m);
    incidence_nodes_.resize(2 * m);
    for (int r = 0; r < m; ++r) {
      incidence_rows_[r] = r;
      incidence_rows_[m + r] = r;
      incidence_nodes_[r] = batch.edge_src[r];
      incidence_nodes_[m + r] = batch.edge_dst[r];
    }
  }

  struct State {
    ad::Var x, e, g;
  };

  // Runs the trunk; returns the final state and the node features that
  // entered the last layer.
  std::pair<State, ad::Var> Trunk(const TrunkShape& shape) {
    State s{t_.Constant(b_.x), t_.Constant(b_.e), t_.Constant(b_.g)};
    ad::Var penultimate_x = s.x;
    for (const LayerShape& layer : shape.layers) {
      penultimate_x = s.x;
      s = Layer(layer, s);
    }
    return {s, penultimate_x};
  }

  ad::Var Scores(const State& s) { return s.e; }

  ad::Var Normalize(ad::Var scores) {
    const int graphs = b_.num_graphs;
    if (cfg_.score_norm == ScoreNorm::kSoftmax) {
      ad::Var mx = t_.SegmentReduce(scores, b_.edge_graph, graphs,
                                    ad::Reduce::kMax);
      ad::Var shifted = t_.Sub(scores, t_.GatherRows(mx, b_.edge_graph));
      ad::Var ex = t_.Exp(shifted);
      ad::Var total =
          t_.SegmentReduce(ex, b_.edge_graph, graphs, ad::Reduce::kSum);
      return t_.Div(ex, t_.GatherRows(total, b_.edge_graph));
    }
    ad::Var mn =
        t_.SegmentReduce(scores, b_.edge_graph, graphs, ad::Reduce::kMin);
    ad::Var shifted = t_.AddScalar(
        t_.Sub(scores, t_.GatherRows(mn, b_.edge_graph)), cfg_.epsilon);
    ad::Var total =
        t_.SegmentReduce(shifted, b_.edge_graph, graphs, ad::Reduce::kSum);
    return t_.Div(shifted, t_.GatherRows(total, b_.edge_graph));
  }

  ad::Var Value(ad::Var node_features) {
    ad::Var pooled = t_.SegmentReduce(node_features, b_.node_graph,
                                      b_.num_graphs, ad::Reduce::kMean);
    ad::Var v = t_.MatMul(pooled, Param("value.w"));
    if (cfg_.use_bias) v = t_.AddRow(v, Param("value.b"));
    return v;
  }

 private:
  ad::Var Param(const std::string& name) {
    return v_.vars[p_.index_of(name)];
  }

  ad::Var Mlp(const MlpShape& m, ad::Var in) {
    ad::Var h = t_.MatMul(in, Param(m.name + ".w1"));
    if (cfg_.use_bias) h = t_.AddRow(h, Param(m.name + ".b1"));
    h = t_.Tanh(h);
    ad::Var out = t_.MatMul(h, Param(m.name + ".w2"));
    if (cfg_.use_bias) out = t_.AddRow(out, Param(m.name + ".b2"));
    return out;
  }

  ad::Reduce AggregationOp() const {
    switch (cfg_.aggregation) {
      case Aggregation::kSum: return ad::Reduce::kSum;
      case Aggregation::kMax: return ad::Reduce::kMax;
      case Aggregation::kMean: break;
    }
    return ad::Reduce::kMean;
  }

  ad::Var PairNorm(ad::Var x) {
    const int graphs = b_.num_graphs;
    ad::Var mean =
        t_.SegmentReduce(x, b_.node_graph, graphs, ad::Reduce::kMean);
    ad::Var centered = t_.Sub(x, t_.GatherRows(mean, b_.node_graph));
    ad::Var sq = t_.RowSum(t_.Square(centered));
    ad::Var spread = t_.Sqrt(t_.AddScalar(
        t_.SegmentReduce(sq, b_.node_graph, graphs, ad::Reduce::kMean), 1e-6));
    return t_.DivCol(centered, t_.GatherRows(spread, b_.node_graph));
  }

  State Layer(const LayerShape& layer, const State& s) {
    const int graphs = b_.num_graphs;
    ad::Var endpoints = t_.Add(t_.GatherRows(s.x, b_.edge_src),
                               t_.GatherRows(s.x, b_.edge_dst));
    ad::Var e_in =
        t_.ConcatCols({s.e, endpoints, t_.GatherRows(s.g, b_.edge_graph)});
    State next = s;
    next.e = Mlp(layer.edge, e_in);
    if (!layer.node) return next;

    ad::Var messages = t_.GatherRows(next.e, incidence_rows_);
    ad::Var agg = t_.SegmentReduce(messages, incidence_nodes_,
                                   b_.num_nodes(), AggregationOp());
    ad::Var x_in =
        t_.ConcatCols({agg, s.x, t_.GatherRows(s.g, b_.node_graph)});
    next.x = Mlp(*layer.node, x_in);
    if (cfg_.pair_norm) next.x = PairNorm(next.x);
    if (!layer.global) return next;

    ad::Var e_mean =
        t_.SegmentReduce(next.e, b_.edge_graph, graphs, ad::Reduce::kMean);
    ad::Var x_mean =
        t_.SegmentReduce(next.x, b_.node_graph, graphs, ad::Reduce::kMean);
    next.g = Mlp(*layer.global, t_.ConcatCols({e_mean, x_mean, s.g}));
    return next;
  }

  ad::Tape& t_;
  const PolicyParams& p_;
  const ParamVars& v_;
  const GraphBatch& b_;
  const GnnConfig& cfg_;
  std::vector<int> incidence_rows_;
  std::vector<int> incidence_nodes_;
};

}  // namespace

PolicyVars Forward(ad::Tape& tape, const PolicyParams& params,
                   const ParamVars& vars, const GraphBatch& batch) {
  const GnnConfig& cfg = params.config;
  if (batch.e.cols() != cfg.edge_features) {
    throw Error(ErrorCode::kShapeMismatch,
                "batch has " + std::to_string(batch.e.cols()) +
                    " edge features, policy expects " +
                    std::to_string(cfg.edge_features));
  }
  if (batch.num_edges() == 0) {
    throw Error(ErrorCode::kNoEdges, "policy needs at least one edge");
  }
  ForwardPass pass(tape, params, vars, batch);
  auto [actor, actor_penultimate] = pass.Trunk(MakeTrunk(cfg, "actor", true));
  PolicyVars out;
  out.scores = pass.Scores(actor);
  out.probs = pass.Normalize(out.scores);
  if (cfg.share_critic) {
    out.value = pass.Value(actor_penultimate);
  } else {
    auto [critic, unused] = pass.Trunk(MakeTrunk(cfg, "critic", false));
    out.value = pass.Value(critic.x);
  }
  return out;
}

PolicyOutput Evaluate(const PolicyParams& params, const GraphBatch& batch) {
  ad::Tape tape;
  ParamVars vars = RecordParams(tape, params);
  PolicyVars v = Forward(tape, params, vars, batch);
  return {tape.value(v.scores).col(0), tape.value(v.probs).col(0),
          tape.value(v.value).col(0)};
}

Eigen::VectorXd NormalizeScores(const Eigen::VectorXd& scores, double epsilon,
                                ScoreNorm norm) {
  if (scores.size() == 0) return scores;
  if (norm == ScoreNorm::kSoftmax) {
    Eigen::VectorXd ex = (scores.array() - scores.maxCoeff()).exp();
    return ex / ex.sum();
  }
  Eigen::VectorXd shifted = scores.array() - scores.minCoeff() + epsilon;
  return shifted / shifted.sum();
}

LossAndGrad ComputeGradients(const PolicyParams& params, const LossFn& loss) {
  ad::Tape tape;
  ParamVars vars = RecordParams(tape, params);
  ad::Var l = loss(tape, vars);
  LossAndGrad out;
  out.loss = tape.value(l)(0, 0);
  tape.Backward(l);
  for (ad::Var v : vars.vars) out.grads.push_back(tape.grad(v));
  return out;
}

}  // namespace tnco
