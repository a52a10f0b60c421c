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

#ifndef TNCO_NUMERIC_H_
#define TNCO_NUMERIC_H_

#include <cstdint>
#include <map>
#include <vector>

#include "tnco/network.h"

namespace tnco {

// Dense row-major array whose axes follow the sorted order of its index ids.
struct DenseTensor {
  IndexSet indices;
  std::vector<Extent> shape;
  std::vector<double> data;
};

// Zero-filled tensor over the given indices, shaped from the network's
// extent table.
DenseTensor MakeDense(const TensorNetwork& net, const IndexSet& indices);

// Pairwise contraction: sums over the shared indices, keeps the symmetric
// difference. If multiply_adds is non-null it is incremented once per
// scalar multiply-add executed.
DenseTensor ContractDense(const DenseTensor& a, const DenseTensor& b,
                          std::int64_t* multiply_adds = nullptr);

// Contracts the whole network in path order. Intended for correctness checks
// at tiny extents. Throws kShapeMismatch when an array does not match its
// node, kInvalidStep for a bad path.
DenseTensor ExecuteNumeric(const TensorNetwork& net,
                           const std::map<NodeId, DenseTensor>& values,
                           const ContractionPath& path,
                           std::int64_t* multiply_adds = nullptr);

}  // namespace tnco

#endif  // TNCO_NUMERIC_H_
