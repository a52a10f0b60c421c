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

#include "tnco/io.h"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace tnco {

namespace {

constexpr const char* kNetworkMagic = "tnco-network";
constexpr const char* kPathMagic = "tnco-path";
constexpr int kFormatVersion = 1;

const std::string& Symbols() {
  static const std::string symbols =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  return symbols;
}

Error ParseFailure(const std::string& what) {
  return Error(ErrorCode::kParseError, what);
}

Error FormatFailure(int line, const std::string& what) {
  return Error(ErrorCode::kFormatError,
               "line " + std::to_string(line) + ": " + what);
}

// Next non-empty, non-comment line, split into tokens.
bool NextRecord(std::istream& in, int& line_no,
                std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    tokens.clear();
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) return true;
  }
  return false;
}

long long ToInt(const std::string& tok, int line_no) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatFailure(line_no, "expected integer, got '" + tok + "'");
  }
}

void ExpectHeader(std::istream& in, int& line_no, const char* magic) {
  std::vector<std::string> tokens;
  if (!NextRecord(in, line_no, tokens) || tokens.size() != 2 ||
      tokens[0] != magic) {
    throw FormatFailure(line_no, std::string("missing '") + magic +
                                     "' header");
  }
  if (ToInt(tokens[1], line_no) != kFormatVersion) {
    throw FormatFailure(line_no, "unsupported version " + tokens[1]);
  }
}

}  // namespace

EinsumSpec ParseEquation(const std::string& equation,
                         const std::map<char, Extent>& extents) {
  std::string eq;
  for (char c : equation) {
    if (!std::isspace(static_cast<unsigned char>(c))) eq.push_back(c);
  }
  auto arrow = eq.find("->");
  if (arrow == std::string::npos) {
    throw ParseFailure("missing '->' in '" + equation + "'");
  }
  EinsumSpec spec;
  spec.output = eq.substr(arrow + 2);
  std::string lhs = eq.substr(0, arrow);
  std::size_t start = 0;
  while (true) {
    auto comma = lhs.find(',', start);
    std::string operand = lhs.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (operand.empty()) {
      throw ParseFailure("empty operand in '" + equation + "'");
    }
    spec.inputs.push_back(operand);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (const std::string& s : spec.inputs) {
    for (char c : s) {
      if (!std::isalpha(static_cast<unsigned char>(c))) {
        throw ParseFailure(std::string("bad symbol '") + c + "'");
      }
    }
  }
  for (char c : spec.output) {
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseFailure(std::string("bad output symbol '") + c + "'");
    }
  }
  spec.extents = extents;
  return spec;
}

TensorNetwork ParseEinsum(const EinsumSpec& spec) {
  if (spec.inputs.empty()) throw ParseFailure("no operands");
  std::map<char, IndexId> ids;
  std::map<char, int> uses;
  std::map<NodeId, IndexSet> nodes;
  std::map<IndexId, Extent> extents;
  for (std::size_t k = 0; k < spec.inputs.size(); ++k) {
    const std::string& operand = spec.inputs[k];
    if (operand.empty()) throw ParseFailure("empty operand");
    std::set<char> seen;
    IndexSet idx;
    for (char c : operand) {
      if (!seen.insert(c).second) {
        throw ParseFailure(std::string("repeated symbol '") + c +
                           "' in operand " + std::to_string(k));
      }
      auto [it, fresh] = ids.emplace(c, static_cast<IndexId>(ids.size()));
      if (fresh) {
        auto ext = spec.extents.find(c);
        if (ext == spec.extents.end()) {
          throw ParseFailure(std::string("no extent for '") + c + "'");
        }
        extents[it->second] = ext->second;
      }
      ++uses[c];
      idx.push_back(it->second);
    }
    nodes.emplace(static_cast<NodeId>(k), std::move(idx));
  }
  std::set<char> out(spec.output.begin(), spec.output.end());
  if (out.size() != spec.output.size()) {
    throw ParseFailure("repeated output symbol");
  }
  for (char c : spec.output) {
    if (!ids.count(c)) {
      throw ParseFailure(std::string("output symbol '") + c +
                         "' not in any input");
    }
  }
  for (const auto& [c, n] : uses) {
    if (n > 2) {
      throw Error(ErrorCode::kIndexOveruse,
                  std::string("symbol '") + c + "' appears in " +
                      std::to_string(n) + " operands");
    }
    if (n == 1 && !out.count(c)) {
      throw ParseFailure(std::string("dangling symbol '") + c + "'");
    }
  }
  return TensorNetwork(std::move(nodes), std::move(extents));
}

EinsumSpec ToEinsum(const TensorNetwork& net) {
  std::map<IndexId, int> appearances = net.index_appearances();
  if (appearances.size() > Symbols().size()) {
    throw Error(ErrorCode::kFormatError,
                std::to_string(appearances.size()) +
                    " indices exceed the einsum symbol alphabet");
  }
  std::map<IndexId, char> symbol;
  EinsumSpec spec;
  for (const auto& [id, idx] : net.nodes()) {
    std::string operand;
    for (IndexId i : idx) {
      auto [it, fresh] = symbol.emplace(i, Symbols()[symbol.size()]);
      if (fresh) spec.extents[it->second] = net.extent(i);
      operand.push_back(it->second);
    }
    spec.inputs.push_back(operand);
  }
  for (const auto& [i, count] : appearances) {
    if (count == 1) spec.output.push_back(symbol.at(i));
  }
  return spec;
}

std::string EquationString(const EinsumSpec& spec) {
  std::string eq;
  for (std::size_t k = 0; k < spec.inputs.size(); ++k) {
    if (k) eq.push_back(',');
    eq += spec.inputs[k];
  }
  return eq + "->" + spec.output;
}

void WriteNetwork(std::ostream& out, const TensorNetwork& net) {
  out << kNetworkMagic << ' ' << kFormatVersion << '\n';
  for (const auto& [i, e] : net.extents()) {
    out << "index " << i << ' ' << e << '\n';
  }
  for (const auto& [id, idx] : net.nodes()) {
    out << "node " << id;
    for (IndexId i : idx) out << ' ' << i;
    out << '\n';
  }
}

TensorNetwork ReadNetwork(std::istream& in) {
  int line_no = 0;
  ExpectHeader(in, line_no, kNetworkMagic);
  std::map<IndexId, Extent> extents;
  std::map<NodeId, IndexSet> nodes;
  std::vector<std::string> tokens;
  while (NextRecord(in, line_no, tokens)) {
    if (tokens[0] == "index") {
      if (tokens.size() != 3) throw FormatFailure(line_no, "index <id> <extent>");
      auto id = static_cast<IndexId>(ToInt(tokens[1], line_no));
      if (!extents.emplace(id, ToInt(tokens[2], line_no)).second) {
        throw FormatFailure(line_no, "duplicate index " + tokens[1]);
      }
    } else if (tokens[0] == "node") {
      if (tokens.size() < 2) throw FormatFailure(line_no, "node <id> <index>...");
      auto id = static_cast<NodeId>(ToInt(tokens[1], line_no));
      IndexSet idx;
      for (std::size_t k = 2; k < tokens.size(); ++k) {
        idx.push_back(static_cast<IndexId>(ToInt(tokens[k], line_no)));
      }
      if (!nodes.emplace(id, std::move(idx)).second) {
        throw FormatFailure(line_no, "duplicate node " + tokens[1]);
      }
    } else {
      throw FormatFailure(line_no, "unknown record '" + tokens[0] + "'");
    }
  }
  TensorNetwork net(std::move(nodes), std::move(extents));
  if (auto err = Validate(net)) {
    throw Error(ErrorCode::kFormatError, err->what());
  }
  return net;
}

void SaveNetwork(const std::filesystem::path& file, const TensorNetwork& net) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  WriteNetwork(out, net);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + file.string());
}

TensorNetwork LoadNetwork(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  return ReadNetwork(in);
}

void WritePath(std::ostream& out, const TensorNetwork& net,
               const ContractionPath& path) {
  out << kPathMagic << ' ' << kFormatVersion << '\n';
  out << "nodes " << net.num_nodes() << '\n';
  out << "cost " << std::setprecision(std::numeric_limits<double>::max_digits10)
      << path.total_cost << '\n';
  for (const ContractionStep& s : path.steps) {
    out << s.u << ' ' << s.v << '\n';
  }
}

PathFile ReadPath(std::istream& in) {
  int line_no = 0;
  ExpectHeader(in, line_no, kPathMagic);
  PathFile file;
  bool have_nodes = false;
  std::vector<std::string> tokens;
  while (NextRecord(in, line_no, tokens)) {
    if (tokens[0] == "nodes" && tokens.size() == 2) {
      file.num_nodes = static_cast<int>(ToInt(tokens[1], line_no));
      have_nodes = true;
    } else if (tokens[0] == "cost" && tokens.size() == 2) {
      try {
        file.cost = std::stod(tokens[1]);
      } catch (const std::exception&) {
        throw FormatFailure(line_no, "bad cost '" + tokens[1] + "'");
      }
    } else if (tokens.size() == 2) {
      file.pairs.emplace_back(static_cast<NodeId>(ToInt(tokens[0], line_no)),
                              static_cast<NodeId>(ToInt(tokens[1], line_no)));
    } else {
      throw FormatFailure(line_no, "expected '<u> <v>'");
    }
  }
  if (!have_nodes) throw FormatFailure(line_no, "missing 'nodes' record");
  return file;
}

void SavePath(const std::filesystem::path& file, const TensorNetwork& net,
              const ContractionPath& path) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  WritePath(out, net, path);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + file.string());
}

PathFile LoadPathFile(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + file.string());
  return ReadPath(in);
}

ContractionPath PathFromFile(const PathFile& file, const TensorNetwork& net) {
  if (file.num_nodes != static_cast<int>(net.num_nodes())) {
    throw Error(ErrorCode::kFormatError,
                "path is for " + std::to_string(file.num_nodes) +
                    " nodes, network has " + std::to_string(net.num_nodes()));
  }
  try {
    return MakePath(net, file.pairs);
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormatError, e.what());
  }
}

ContractionPath LoadPath(const std::filesystem::path& file,
                         const TensorNetwork& net) {
  return PathFromFile(LoadPathFile(file), net);
}

}  // namespace tnco
