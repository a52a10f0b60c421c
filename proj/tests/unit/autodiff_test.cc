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

#include "tnco/autodiff.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace tnco::ad {
namespace {

using Op = std::function<Var(Tape&, std::vector<Var>&)>;

Matrix RandomMatrix(int r, int c, std::mt19937_64& rng, double lo = -1,
                    double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

// Scalar objective sum(w .* op(inputs)) with fixed random weights w.
double Objective(const Op& op, const std::vector<Matrix>& inputs,
                 const Matrix& w) {
  Tape t;
  std::vector<Var> vars;
  for (const auto& m : inputs) vars.push_back(t.Constant(m));
  return (t.value(op(t, vars)).array() * w.array()).sum();
}

// Compares tape gradients against central differences.
void CheckGradient(const Op& op, std::vector<Matrix> inputs,
                   std::uint64_t seed = 1, double tol = 1e-6) {
  std::mt19937_64 rng(seed);
  Tape t;
  std::vector<Var> vars;
  for (const auto& m : inputs) vars.push_back(t.Constant(m));
  Var out = op(t, vars);
  const Matrix w = RandomMatrix(t.value(out).rows(), t.value(out).cols(), rng);
  t.Backward(out, w);
  const double h = 1e-6;
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    const Matrix g = t.grad(vars[a]);
    ASSERT_EQ(g.rows(), inputs[a].rows());
    ASSERT_EQ(g.cols(), inputs[a].cols());
    for (Eigen::Index k = 0; k < inputs[a].size(); ++k) {
      std::vector<Matrix> plus = inputs, minus = inputs;
      plus[a].data()[k] += h;
      minus[a].data()[k] -= h;
      const double fd =
          (Objective(op, plus, w) - Objective(op, minus, w)) / (2 * h);
      EXPECT_NEAR(g.data()[k], fd, tol * std::max(1.0, std::abs(fd)))
          << "input " << a << " entry " << k;
    }
  }
}

class AutodiffTest : public ::testing::Test {
 protected:
  std::mt19937_64 rng{7};
  Matrix M(int r, int c) { return RandomMatrix(r, c, rng); }
  Matrix Pos(int r, int c) { return RandomMatrix(r, c, rng, 0.5, 2); }
};

TEST_F(AutodiffTest, Binary) {
  CheckGradient([](Tape& t, auto& v) { return t.MatMul(v[0], v[1]); },
                {M(3, 4), M(4, 2)});
  CheckGradient([](Tape& t, auto& v) { return t.Add(v[0], v[1]); },
                {M(3, 2), M(3, 2)});
  CheckGradient([](Tape& t, auto& v) { return t.Sub(v[0], v[1]); },
                {M(3, 2), M(3, 2)});
  CheckGradient([](Tape& t, auto& v) { return t.Mul(v[0], v[1]); },
                {M(3, 2), M(3, 2)});
  CheckGradient([](Tape& t, auto& v) { return t.Div(v[0], v[1]); },
                {M(3, 2), Pos(3, 2)});
  CheckGradient([](Tape& t, auto& v) { return t.AddRow(v[0], v[1]); },
                {M(4, 3), M(1, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.MulCol(v[0], v[1]); },
                {M(4, 3), M(4, 1)});
  CheckGradient([](Tape& t, auto& v) { return t.DivCol(v[0], v[1]); },
                {M(4, 3), Pos(4, 1)});
}

TEST_F(AutodiffTest, MinimumRoutesToSmaller) {
  Matrix a(1, 3), b(1, 3);
  a << 1, 5, -2;
  b << 2, 3, 0;
  CheckGradient([](Tape& t, auto& v) { return t.Minimum(v[0], v[1]); },
                {a, b});
}

TEST_F(AutodiffTest, Unary) {
  CheckGradient([](Tape& t, auto& v) { return t.Scale(v[0], -2.5); },
                {M(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.AddScalar(v[0], 4); },
                {M(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Tanh(v[0]); }, {M(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Exp(v[0]); }, {M(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Log(v[0]); }, {Pos(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Sqrt(v[0]); }, {Pos(2, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Square(v[0]); }, {M(2, 3)});
}

TEST_F(AutodiffTest, ClampPassesOnlyInside) {
  Matrix a(1, 4);
  a << -3, -0.5, 0.5, 3;
  Tape t;
  Var x = t.Constant(a);
  t.Backward(t.Sum(t.Clamp(x, -1, 1)));
  Matrix expect(1, 4);
  expect << 0, 1, 1, 0;
  EXPECT_EQ(t.grad(x), expect);
  EXPECT_EQ(t.value(t.Clamp(x, -1, 1))(0, 0), -1);
}

TEST_F(AutodiffTest, Reductions) {
  CheckGradient([](Tape& t, auto& v) { return t.RowSum(v[0]); }, {M(4, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Sum(v[0]); }, {M(4, 3)});
  CheckGradient([](Tape& t, auto& v) { return t.Mean(v[0]); }, {M(4, 3)});
  CheckGradient(
      [](Tape& t, auto& v) {
        return t.ConcatCols({v[0], v[1], t.Tanh(v[0])});
      },
      {M(3, 2), M(3, 1)});
}

TEST_F(AutodiffTest, GatherAndSegments) {
  const std::vector<int> rows = {2, 0, 2, 1};
  CheckGradient([&](Tape& t, auto& v) { return t.GatherRows(v[0], rows); },
                {M(3, 2)});
  const std::vector<int> seg = {0, 2, 0, 2, 2};
  for (Reduce op : {Reduce::kSum, Reduce::kMean, Reduce::kMax, Reduce::kMin}) {
    CheckGradient(
        [&](Tape& t, auto& v) { return t.SegmentReduce(v[0], seg, 3, op); },
        {M(5, 2)});
  }
  Tape t;
  Matrix a(2, 1);
  a << 1, 2;
  const std::vector<int> two = {0, 0};
  Var r = t.SegmentReduce(t.Constant(a), two, 2, Reduce::kMax);
  EXPECT_EQ(t.value(r)(0, 0), 2);
  EXPECT_EQ(t.value(r)(1, 0), 0);  // empty segment
}

TEST_F(AutodiffTest, Composite) {
  // Two-layer perceptron followed by per-segment normalization.
  const std::vector<int> seg = {0, 0, 1, 1, 1};
  CheckGradient(
      [&](Tape& t, auto& v) {
        Var h = t.MatMul(t.Tanh(t.MatMul(v[0], v[1])), v[2]);
        Var s = t.Exp(h);
        Var z = t.GatherRows(t.SegmentReduce(s, seg, 2, Reduce::kSum), seg);
        return t.Log(t.Div(s, z));
      },
      {M(5, 3), M(3, 4), M(4, 1)});
}

TEST_F(AutodiffTest, UnusedInputHasZeroGrad) {
  Tape t;
  Var a = t.Constant(M(2, 2));
  Var b = t.Constant(M(3, 1));
  t.Backward(t.Sum(t.Square(a)));
  EXPECT_TRUE(t.grad(b).isZero());
  EXPECT_EQ(t.grad(b).rows(), 3);
}

TEST_F(AutodiffTest, FanOutAccumulates) {
  Tape t;
  Matrix one = Matrix::Constant(1, 1, 3);
  Var x = t.Constant(one);
  t.Backward(t.Add(t.Mul(x, x), x));  // x^2 + x
  EXPECT_DOUBLE_EQ(t.grad(x)(0, 0), 7);
}

}  // namespace
}  // namespace tnco::ad
