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

#include "tnco/config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tnco {

namespace {

using nlohmann::json;

template <typename V>
void VisitGnn(GnnConfig& c, V&& v) {
  v("layers", c.layers);
  v("hidden", c.hidden);
  v("aggregation", c.aggregation);
  v("use_bias", c.use_bias);
  v("pair_norm", c.pair_norm);
  v("epsilon", c.epsilon);
  v("score_norm", c.score_norm);
  v("share_critic", c.share_critic);
}

template <typename V>
void VisitTrain(TrainConfig& c, V&& v) {
  v("rollout_steps", c.rollout_steps);
  v("batch_size", c.batch_size);
  v("ppo_epochs", c.ppo_epochs);
  v("learning_rate", c.learning_rate);
  v("value_weight", c.value_weight);
  v("entropy_weight", c.entropy_weight);
  v("clip_ratio", c.clip_ratio);
  v("reward_scale", c.reward_scale);
  v("optimistic_buffer_size", c.optimistic_buffer_size);
  v("optimistic_capacity", c.optimistic_capacity);
  v("total_samples", c.total_samples);
  v("time_limit_s", c.time_limit_s);
  v("inference_paths", c.inference_paths);
  v("inference_every", c.inference_every);
  v("num_envs", c.num_envs);
  v("seed", c.seed);
  v("normalize_advantages", c.normalize_advantages);
  v("optimizer", c.optimizer);
  v("max_grad_norm", c.max_grad_norm);
  v("use_gae", c.use_gae);
  v("gae_lambda", c.gae_lambda);
  v("robust_features", c.features.robust);
  v("solver_features", c.features.solver_features);
  v("optimistic_buffer", c.optimistic_buffer);
  v("path_pruning", c.path_pruning);
}

template <typename V>
void VisitGenerator(GeneratorConfig& c, V&& v) {
  v("n", c.n);
  v("mean_degree", c.mean_degree);
  v("extent_low", c.extent_low);
  v("extent_high", c.extent_high);
  v("seed", c.seed);
}

struct Writer {
  json& out;

  void operator()(const char* key, Aggregation a) {
    out[key] = AggregationName(a);
  }
  void operator()(const char* key, ScoreNorm s) { out[key] = ScoreNormName(s); }
  void operator()(const char* key, OptimizerKind k) {
    out[key] = OptimizerName(k);
  }
  template <typename T>
  void operator()(const char* key, const T& value) {
    out[key] = value;
  }
};

class Reader {
 public:
  Reader(const json& in, std::string section)
      : in_(in), section_(std::move(section)) {
    if (!in_.is_object()) Fail("must be an object");
  }

  void operator()(const char* key, Aggregation& a) {
    if (auto* v = Find(key)) a = ParseAggregation(String(key, *v));
  }
  void operator()(const char* key, ScoreNorm& s) {
    if (auto* v = Find(key)) s = ParseScoreNorm(String(key, *v));
  }
  void operator()(const char* key, OptimizerKind& k) {
    if (auto* v = Find(key)) k = ParseOptimizer(String(key, *v));
  }
  void operator()(const char* key, bool& b) {
    if (auto* v = Find(key)) {
      if (!v->is_boolean()) Fail(std::string(key) + " must be a boolean");
      b = v->get<bool>();
    }
  }
  template <typename T>
  void operator()(const char* key, T& value) {
    if (auto* v = Find(key)) {
      if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) {
          Fail(std::string(key) + " must be an integer");
        }
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned()) {
            Fail(std::string(key) + " must be non-negative");
          }
        }
      } else {
        if (!v->is_number()) Fail(std::string(key) + " must be a number");
      }
      value = v->get<T>();
    }
  }

  // Rejects keys that no field claimed.
  void Finish() const {
    for (const auto& [key, unused] : in_.items()) {
      if (!seen_.count(key)) Fail("unknown key '" + key + "'");
    }
  }

 private:
  const json* Find(const char* key) {
    seen_.insert(key);
    auto it = in_.find(key);
    return it == in_.end() ? nullptr : &*it;
  }

  std::string String(const char* key, const json& v) const {
    if (!v.is_string()) Fail(std::string(key) + " must be a string");
    return v.get<std::string>();
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw std::invalid_argument("config section '" + section_ + "': " + what);
  }

  const json& in_;
  std::string section_;
  std::set<std::string> seen_;
};

template <typename T, typename Visit>
void ReadSection(const json& root, const char* name, T& target, Visit visit) {
  auto it = root.find(name);
  if (it == root.end()) return;
  Reader reader(*it, name);
  visit(target, reader);
  reader.Finish();
}

json ToJson(const RunConfig& cfg) {
  RunConfig c = cfg;
  json root = {{"mode", TrainModeName(c.mode)}};
  json gnn = json::object(), train = json::object(),
       generator = json::object();
  VisitGnn(c.gnn, Writer{gnn});
  VisitTrain(c.train, Writer{train});
  VisitGenerator(c.generator, Writer{generator});
  root["gnn"] = gnn;
  root["train"] = train;
  root["generator"] = generator;
  return root;
}

}  // namespace

RunConfig DefaultRunConfig(TrainMode mode) {
  RunConfig cfg;
  cfg.mode = mode;
  if (mode == TrainMode::kSingle) {
    cfg.gnn.layers = 4;
    cfg.gnn.hidden = 256;
    cfg.train = SingleNetworkDefaults();
  }
  cfg.gnn.edge_features = EdgeFeatureWidth(cfg.train.features);
  return cfg;
}

std::string RunConfigToJson(const RunConfig& cfg) {
  return ToJson(cfg).dump(2);
}

RunConfig RunConfigFromJson(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config must be an object");
  for (const auto& [key, unused] : root.items()) {
    if (key != "mode" && key != "gnn" && key != "train" &&
        key != "generator") {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  TrainMode mode = TrainMode::kMulti;
  if (auto it = root.find("mode"); it != root.end()) {
    if (!it->is_string()) throw std::invalid_argument("mode must be a string");
    mode = ParseTrainMode(it->get<std::string>());
  }
  RunConfig cfg = DefaultRunConfig(mode);
  try {
    ReadSection(root, "gnn", cfg.gnn,
                [](GnnConfig& c, Reader& r) { VisitGnn(c, r); });
    ReadSection(root, "train", cfg.train,
                [](TrainConfig& c, Reader& r) { VisitTrain(c, r); });
    ReadSection(root, "generator", cfg.generator,
                [](GeneratorConfig& c, Reader& r) { VisitGenerator(c, r); });
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.gnn.edge_features = EdgeFeatureWidth(cfg.train.features);
  CheckGnnConfig(cfg.gnn);
  CheckTrainConfig(cfg.train);
  CheckGeneratorConfig(cfg.generator);
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return RunConfigFromJson(ss.str());
}

std::string TrainMetaJson(const RunConfig& cfg, double reward_scale) {
  json root = ToJson(cfg);
  root["reward_scale"] = reward_scale;
  return root.dump();
}

FeatureOptions FeaturesFromMeta(const std::string& meta_json) {
  FeatureOptions opts;
  if (meta_json.empty()) return opts;
  json root = json::parse(meta_json, nullptr, false);
  if (root.is_discarded() || !root.contains("train")) return opts;
  const json& train = root["train"];
  opts.robust = train.value("robust_features", opts.robust);
  opts.solver_features = train.value("solver_features", opts.solver_features);
  return opts;
}

}  // namespace tnco
