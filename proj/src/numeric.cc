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

#include "tnco/numeric.h"

#include <algorithm>

namespace tnco {

namespace {

std::int64_t NumElements(const std::vector<Extent>& shape) {
  std::int64_t n = 1;
  for (Extent e : shape) n *= e;
  return n;
}

// Row-major strides of `t` expressed over the axes of `frame`; axes of the
// frame that `t` does not carry get stride 0.
std::vector<std::int64_t> StridesIn(const DenseTensor& t,
                                    const IndexSet& frame) {
  std::vector<std::int64_t> own(t.indices.size(), 1);
  for (std::size_t k = t.indices.size(); k-- > 1;) {
    own[k - 1] = own[k] * t.shape[k];
  }
  std::vector<std::int64_t> out(frame.size(), 0);
  for (std::size_t f = 0; f < frame.size(); ++f) {
    auto it = std::lower_bound(t.indices.begin(), t.indices.end(), frame[f]);
    if (it != t.indices.end() && *it == frame[f]) {
      out[f] = own[it - t.indices.begin()];
    }
  }
  return out;
}

}  // namespace

DenseTensor MakeDense(const TensorNetwork& net, const IndexSet& indices) {
  DenseTensor t;
  t.indices = indices;
  for (IndexId i : indices) t.shape.push_back(net.extent(i));
  t.data.assign(NumElements(t.shape), 0.0);
  return t;
}

DenseTensor ContractDense(const DenseTensor& a, const DenseTensor& b,
                          std::int64_t* multiply_adds) {
  IndexSet frame = Union(a.indices, b.indices);
  std::vector<Extent> frame_shape(frame.size());
  for (std::size_t f = 0; f < frame.size(); ++f) {
    auto pick = [&](const DenseTensor& t) -> Extent {
      auto it = std::lower_bound(t.indices.begin(), t.indices.end(), frame[f]);
      if (it != t.indices.end() && *it == frame[f]) {
        return t.shape[it - t.indices.begin()];
      }
      return 0;
    };
    Extent ea = pick(a), eb = pick(b);
    if (ea != 0 && eb != 0 && ea != eb) {
      throw Error(ErrorCode::kShapeMismatch,
                  "index " + std::to_string(frame[f]) + " has extents " +
                      std::to_string(ea) + " and " + std::to_string(eb));
    }
    frame_shape[f] = ea != 0 ? ea : eb;
  }

  DenseTensor out;
  out.indices = SymmetricDifference(a.indices, b.indices);
  for (IndexId i : out.indices) {
    auto it = std::lower_bound(frame.begin(), frame.end(), i);
    out.shape.push_back(frame_shape[it - frame.begin()]);
  }
  out.data.assign(NumElements(out.shape), 0.0);

  std::vector<std::int64_t> sa = StridesIn(a, frame);
  std::vector<std::int64_t> sb = StridesIn(b, frame);
  std::vector<std::int64_t> so = StridesIn(out, frame);

  std::vector<Extent> counter(frame.size(), 0);
  std::int64_t ia = 0, ib = 0, io = 0;
  const std::int64_t total = NumElements(frame_shape);
  for (std::int64_t step = 0; step < total; ++step) {
    out.data[io] += a.data[ia] * b.data[ib];
    // Odometer increment over the frame axes, last axis fastest.
    for (std::size_t f = frame.size(); f-- > 0;) {
      ++counter[f];
      ia += sa[f];
      ib += sb[f];
      io += so[f];
      if (counter[f] < frame_shape[f]) break;
      ia -= sa[f] * counter[f];
      ib -= sb[f] * counter[f];
      io -= so[f] * counter[f];
      counter[f] = 0;
    }
  }
  if (multiply_adds != nullptr) *multiply_adds += total;
  return out;
}

DenseTensor ExecuteNumeric(const TensorNetwork& net,
                           const std::map<NodeId, DenseTensor>& values,
                           const ContractionPath& path,
                           std::int64_t* multiply_adds) {
  std::map<NodeId, DenseTensor> live;
  for (const auto& [id, idx] : net.nodes()) {
    auto it = values.find(id);
    if (it == values.end()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "no array for node " + std::to_string(id));
    }
    const DenseTensor& t = it->second;
    bool ok = t.indices == idx && t.shape.size() == idx.size() &&
              static_cast<std::int64_t>(t.data.size()) == NumElements(t.shape);
    for (std::size_t k = 0; ok && k < idx.size(); ++k) {
      ok = t.shape[k] == net.extent(idx[k]);
    }
    if (!ok) {
      throw Error(ErrorCode::kShapeMismatch,
                  "array for node " + std::to_string(id) +
                      " does not match its indices");
    }
    live.emplace(id, t);
  }

  TensorNetwork cur = net;
  for (std::size_t t = 0; t < path.steps.size(); ++t) {
    const ContractionStep& s = path.steps[t];
    if (!cur.contains(s.u) || !cur.contains(s.v) || !cur.has_edge(s.u, s.v) ||
        s.result != cur.next_id()) {
      throw Error(ErrorCode::kInvalidStep,
                  "step " + std::to_string(t) + " is not applicable");
    }
    DenseTensor merged =
        ContractDense(live.at(s.u), live.at(s.v), multiply_adds);
    live.erase(s.u);
    live.erase(s.v);
    cur = ContractEdge(cur, s.u, s.v).network;
    live.emplace(s.result, std::move(merged));
  }
  if (live.size() != 1) {
    throw Error(ErrorCode::kInvalidStep,
                "path leaves " + std::to_string(live.size()) + " tensors");
  }
  return std::move(live.begin()->second);
}

}  // namespace tnco
