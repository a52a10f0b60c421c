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

#ifndef TNCO_AUTODIFF_H_
#define TNCO_AUTODIFF_H_

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tnco::ad {

using Matrix = Eigen::MatrixXd;

// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

enum class Reduce { kSum, kMean, kMax, kMin };

// Minimal reverse-mode differentiation over dense matrices. Every op records
// its output value and a backward rule; Backward() walks the record in
// reverse, accumulating gradients into every recorded value.
class Tape {
 public:
  Var Constant(Matrix value);
  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Gradient of the last Backward() target with respect to v. Zero-shaped
  // like v when v did not influence the target.
  const Matrix& grad(Var v);
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(target) = 1 for a 1x1 target, or the given seed matrix.
  void Backward(Var target);
  void Backward(Var target, const Matrix& seed);

  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Div(Var a, Var b);
  Var Minimum(Var a, Var b);
  // a (n x d) plus a 1 x d row added to every row.
  Var AddRow(Var a, Var row);
  // a (n x d) times / divided by an n x 1 column, row-wise.
  Var MulCol(Var a, Var col);
  Var DivCol(Var a, Var col);
  Var Scale(Var a, double s);
  Var AddScalar(Var a, double s);
  Var Tanh(Var a);
  Var Exp(Var a);
  Var Log(Var a);
  Var Sqrt(Var a);
  Var Square(Var a);
  // Gradient passes only where lo < a < hi.
  Var Clamp(Var a, double lo, double hi);

  Var GatherRows(Var a, std::span<const int> rows);
  // Reduces rows of a into num_segments rows; row r goes to segment[r].
  // Empty segments produce zeros. Max/Min route the gradient to the first
  // extremal row of each column.
  Var SegmentReduce(Var a, std::span<const int> segment, int num_segments,
                    Reduce op);
  Var ConcatCols(std::initializer_list<Var> parts);
  Var RowSum(Var a);
  Var Sum(Var a);
  Var Mean(Var a);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Tape&)> backward;
  };

  Var Push(Matrix value, std::function<void(Tape&)> backward = nullptr);
  Matrix& GradRef(int id);

  std::vector<Node> nodes_;
};

}  // namespace tnco::ad

#endif  // TNCO_AUTODIFF_H_
