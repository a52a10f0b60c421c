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

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "tnco/gnn.h"
#include "tnco/network.h"

namespace tnco {

namespace {

constexpr char kMagic[] = "tnco-checkpoint";
constexpr int kVersion = 1;

nlohmann::json ConfigToJson(const GnnConfig& c) {
  return {{"layers", c.layers},
          {"hidden", c.hidden},
          {"aggregation", AggregationName(c.aggregation)},
          {"use_bias", c.use_bias},
          {"pair_norm", c.pair_norm},
          {"epsilon", c.epsilon},
          {"score_norm", ScoreNormName(c.score_norm)},
          {"share_critic", c.share_critic},
          {"edge_features", c.edge_features}};
}

GnnConfig ConfigFromJson(const nlohmann::json& j) {
  GnnConfig c;
  c.layers = j.at("layers").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.aggregation = ParseAggregation(j.at("aggregation").get<std::string>());
  c.use_bias = j.at("use_bias").get<bool>();
  c.pair_norm = j.at("pair_norm").get<bool>();
  c.epsilon = j.at("epsilon").get<double>();
  c.score_norm = ParseScoreNorm(j.at("score_norm").get<std::string>());
  c.share_critic = j.at("share_critic").get<bool>();
  c.edge_features = j.at("edge_features").get<int>();
  CheckGnnConfig(c);
  return c;
}

std::string HexFloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

[[noreturn]] void Fail(const std::string& what) {
  throw Error(ErrorCode::kFormatError, "checkpoint: " + what);
}

std::string RestOfLine(std::istringstream& ls) {
  std::string rest;
  std::getline(ls, rest);
  const auto start = rest.find_first_not_of(' ');
  return start == std::string::npos ? "" : rest.substr(start);
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const PolicyParams& params,
                     const std::string& meta_json) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "gnn " << ConfigToJson(params.config).dump() << '\n';
  if (!meta_json.empty()) {
    out << "meta " << nlohmann::json::parse(meta_json).dump() << '\n';
  }
  for (std::size_t k = 0; k < params.tensors.size(); ++k) {
    const Eigen::MatrixXd& t = params.tensors[k];
    out << "tensor " << params.names[k] << ' ' << t.rows() << ' ' << t.cols()
        << '\n';
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) {
        out << (c ? " " : "") << HexFloat(t(r, c));
      }
      out << '\n';
    }
  }
}

PolicyParams ReadCheckpoint(std::istream& in, std::string* meta_json) {
  std::string line;
  if (!std::getline(in, line)) Fail("empty input");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != kMagic) Fail("bad header");
    if (version != kVersion) {
      Fail("unsupported version " + std::to_string(version));
    }
  }

  std::optional<GnnConfig> config;
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> tensors;
  if (meta_json) meta_json->clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    try {
      if (tag == "gnn") {
        config = ConfigFromJson(nlohmann::json::parse(RestOfLine(ls)));
      } else if (tag == "meta") {
        std::string rest = RestOfLine(ls);
        if (!nlohmann::json::accept(rest)) Fail("bad meta json");
        if (meta_json) *meta_json = rest;
      } else if (tag == "tensor") {
        std::string name;
        long rows = -1, cols = -1;
        if (!(ls >> name >> rows >> cols) || rows < 0 || cols < 0) {
          Fail("bad tensor header '" + line + "'");
        }
        Eigen::MatrixXd t(rows, cols);
        for (Eigen::Index k = 0; k < rows * cols; ++k) {
          std::string tok;
          if (!(in >> tok)) Fail("truncated tensor " + name);
          char* end = nullptr;
          double v = std::strtod(tok.c_str(), &end);
          if (end == tok.c_str() || *end != '\0') {
            Fail("bad value '" + tok + "' in tensor " + name);
          }
          t(k / cols, k % cols) = v;
        }
        names.push_back(name);
        tensors.push_back(std::move(t));
      } else {
        Fail("unknown record '" + tag + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      Fail(std::string("bad json: ") + e.what());
    } catch (const std::invalid_argument& e) {
      Fail(e.what());
    }
  }
  if (!config) Fail("missing gnn record");

  // Compare against the layout this configuration produces.
  PolicyParams expected = InitParams(*config, 0);
  if (expected.names != names) Fail("parameter names do not match config");
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    if (tensors[k].rows() != expected.tensors[k].rows() ||
        tensors[k].cols() != expected.tensors[k].cols()) {
      Fail("tensor " + names[k] + " has the wrong shape");
    }
  }
  expected.tensors = std::move(tensors);
  return expected;
}

void SaveCheckpoint(const std::filesystem::path& file,
                    const PolicyParams& params, const std::string& meta_json) {
  std::ofstream out(file);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  }
  WriteCheckpoint(out, params, meta_json);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + file.string());
}

PolicyParams LoadCheckpoint(const std::filesystem::path& file,
                            std::string* meta_json) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  return ReadCheckpoint(in, meta_json);
}

}  // namespace tnco
