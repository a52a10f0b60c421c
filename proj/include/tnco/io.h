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

#ifndef TNCO_IO_H_
#define TNCO_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tnco/network.h"

namespace tnco {

// An einsum-style equation such as "ij,jk,kls->ils" with per-symbol extents.
struct EinsumSpec {
  std::vector<std::string> inputs;
  std::string output;
  std::map<char, Extent> extents;
};

// Splits "ij,jk->ik" into subscripts. Throws kParseError on empty operands,
// missing "->", or non-letter symbols.
EinsumSpec ParseEquation(const std::string& equation,
                         const std::map<char, Extent>& extents);

// One node per input operand (node ids 0..n-1); index ids follow the order
// symbols first appear in the equation. Symbols listed in the output stay
// open. Throws kParseError for dangling symbols (single input, absent from
// output), unknown extents, or output symbols absent from the inputs;
// kIndexOveruse when a symbol occurs in more than two inputs.
TensorNetwork ParseEinsum(const EinsumSpec& spec);

// Inverse of ParseEinsum for networks with at most 52 indices: node ids are
// emitted in ascending order, open indices become the output. Throws
// kFormatError when the network has too many indices.
EinsumSpec ToEinsum(const TensorNetwork& net);
std::string EquationString(const EinsumSpec& spec);

// Network text format:
//
//   tnco-network 1
//   index <id> <extent>
//   node <id> <index id>...
//
// Lines starting with '#' are comments. Loading validates the network and
// reports violations as kFormatError.
void WriteNetwork(std::ostream& out, const TensorNetwork& net);
TensorNetwork ReadNetwork(std::istream& in);
void SaveNetwork(const std::filesystem::path& file, const TensorNetwork& net);
TensorNetwork LoadNetwork(const std::filesystem::path& file);

// SSA path text format:
//
//   tnco-path 1
//   nodes <n>
//   cost <flops>          (optional)
//   <u> <v>
//   ...
//
// Step t produces node id n + t. The cost line is informational.
struct PathFile {
  int num_nodes = 0;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  double cost = 0;
};

void WritePath(std::ostream& out, const TensorNetwork& net,
               const ContractionPath& path);
PathFile ReadPath(std::istream& in);
void SavePath(const std::filesystem::path& file, const TensorNetwork& net,
              const ContractionPath& path);
PathFile LoadPathFile(const std::filesystem::path& file);

// Reads a path file and replays it against the network. Throws kFormatError
// when the file does not fit the network.
ContractionPath LoadPath(const std::filesystem::path& file,
                         const TensorNetwork& net);
ContractionPath PathFromFile(const PathFile& file, const TensorNetwork& net);

}  // namespace tnco

#endif  // TNCO_IO_H_
