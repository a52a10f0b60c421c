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

#include <cmath>
#include <stdexcept>
#include <string>

namespace tnco::ad {

namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

}  // namespace

Var Tape::Push(Matrix value, std::function<void(Tape&)> backward) {
  nodes_.push_back({std::move(value), Matrix(), std::move(backward)});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::GradRef(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && n.value.size() != 0) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

const Matrix& Tape::grad(Var v) { return GradRef(v.id); }

Var Tape::Constant(Matrix value) { return Push(std::move(value)); }

void Tape::Backward(Var target) {
  const Matrix& v = value(target);
  Backward(target, Matrix::Ones(v.rows(), v.cols()));
}

void Tape::Backward(Var target, const Matrix& seed) {
  for (Node& n : nodes_) n.grad.resize(0, 0);
  RequireSameShape(value(target), seed, "Backward");
  GradRef(target.id) = seed;
  for (int id = target.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.backward && n.grad.size() != 0) n.backward(*this);
  }
}

Var Tape::MatMul(Var a, Var b) {
  if (value(a).cols() != value(b).rows()) {
    throw std::invalid_argument("MatMul: inner dimensions differ");
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) * value(b), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g * t.value(b).transpose();
    t.GradRef(b.id) += t.value(a).transpose() * g;
  });
}

Var Tape::Add(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Add");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) + value(b), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g;
    t.GradRef(b.id) += g;
  });
}

Var Tape::Sub(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Sub");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) - value(b), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g;
    t.GradRef(b.id) -= g;
  });
}

Var Tape::Mul(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Mul");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseProduct(value(b)), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g.cwiseProduct(t.value(b));
    t.GradRef(b.id) += g.cwiseProduct(t.value(a));
  });
}

Var Tape::Div(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Div");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseQuotient(value(b)), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    const Matrix& bv = t.value(b);
    t.GradRef(a.id) += g.cwiseQuotient(bv);
    t.GradRef(b.id) -= g.cwiseProduct(t.value(out)).cwiseQuotient(bv);
  });
}

Var Tape::Minimum(Var a, Var b) {
  RequireSameShape(value(a), value(b), "Minimum");
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseMin(value(b)), [a, b, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    const Matrix& av = t.value(a);
    const Matrix& bv = t.value(b);
    Matrix& ga = t.GradRef(a.id);
    Matrix& gb = t.GradRef(b.id);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      if (av(k) <= bv(k)) {
        ga(k) += g(k);
      } else {
        gb(k) += g(k);
      }
    }
  });
}

Var Tape::AddRow(Var a, Var row) {
  if (value(row).rows() != 1 || value(row).cols() != value(a).cols()) {
    throw std::invalid_argument("AddRow: row shape mismatch");
  }
  Var out{static_cast<int>(nodes_.size())};
  Matrix v = value(a).rowwise() + value(row).row(0);
  return Push(std::move(v), [a, row, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g;
    t.GradRef(row.id) += g.colwise().sum();
  });
}

Var Tape::MulCol(Var a, Var col) {
  if (value(col).cols() != 1 || value(col).rows() != value(a).rows()) {
    throw std::invalid_argument("MulCol: column shape mismatch");
  }
  Var out{static_cast<int>(nodes_.size())};
  Matrix v = value(col).col(0).asDiagonal() * value(a);
  return Push(std::move(v), [a, col, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += t.value(col).col(0).asDiagonal() * g;
    t.GradRef(col.id) += g.cwiseProduct(t.value(a)).rowwise().sum();
  });
}

Var Tape::DivCol(Var a, Var col) {
  if (value(col).cols() != 1 || value(col).rows() != value(a).rows()) {
    throw std::invalid_argument("DivCol: column shape mismatch");
  }
  Var out{static_cast<int>(nodes_.size())};
  Eigen::VectorXd inv = value(col).col(0).cwiseInverse();
  Matrix v = inv.asDiagonal() * value(a);
  return Push(std::move(v), [a, col, out, inv](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += inv.asDiagonal() * g;
    Eigen::VectorXd dot = g.cwiseProduct(t.value(out)).rowwise().sum();
    t.GradRef(col.id) -= dot.cwiseProduct(inv);
  });
}

Var Tape::Scale(Var a, double s) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a) * s, [a, s, out](Tape& t) {
    t.GradRef(a.id) += t.nodes_[out.id].grad * s;
  });
}

Var Tape::AddScalar(Var a, double s) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array() + s, [a, out](Tape& t) {
    t.GradRef(a.id) += t.nodes_[out.id].grad;
  });
}

Var Tape::Tanh(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().tanh(), [a, out](Tape& t) {
    const Matrix& y = t.value(out);
    t.GradRef(a.id) +=
        t.nodes_[out.id].grad.cwiseProduct((1.0 - y.array().square()).matrix());
  });
}

Var Tape::Exp(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().exp(), [a, out](Tape& t) {
    t.GradRef(a.id) += t.nodes_[out.id].grad.cwiseProduct(t.value(out));
  });
}

Var Tape::Log(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().log(), [a, out](Tape& t) {
    t.GradRef(a.id) += t.nodes_[out.id].grad.cwiseQuotient(t.value(a));
  });
}

Var Tape::Sqrt(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().sqrt(), [a, out](Tape& t) {
    t.GradRef(a.id) +=
        (t.nodes_[out.id].grad.array() / (2.0 * t.value(out).array()))
            .matrix();
  });
}

Var Tape::Square(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).array().square(), [a, out](Tape& t) {
    t.GradRef(a.id) +=
        (2.0 * t.nodes_[out.id].grad.array() * t.value(a).array()).matrix();
  });
}

Var Tape::Clamp(Var a, double lo, double hi) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).cwiseMax(lo).cwiseMin(hi), [a, lo, hi, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    const Matrix& av = t.value(a);
    Matrix& ga = t.GradRef(a.id);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      if (av(k) > lo && av(k) < hi) ga(k) += g(k);
    }
  });
}

Var Tape::GatherRows(Var a, std::span<const int> rows) {
  std::vector<int> idx(rows.begin(), rows.end());
  const Matrix& av = value(a);
  Matrix v(static_cast<Eigen::Index>(idx.size()), av.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= av.rows()) {
      throw std::out_of_range("GatherRows: row out of range");
    }
    v.row(static_cast<Eigen::Index>(r)) = av.row(idx[r]);
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(v), [a, idx = std::move(idx), out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    Matrix& ga = t.GradRef(a.id);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      ga.row(idx[r]) += g.row(static_cast<Eigen::Index>(r));
    }
  });
}

Var Tape::SegmentReduce(Var a, std::span<const int> segment, int num_segments,
                        Reduce op) {
  const Matrix& av = value(a);
  if (static_cast<Eigen::Index>(segment.size()) != av.rows()) {
    throw std::invalid_argument("SegmentReduce: segment size mismatch");
  }
  std::vector<int> seg(segment.begin(), segment.end());
  const Eigen::Index cols = av.cols();
  Matrix v = Matrix::Zero(num_segments, cols);
  std::vector<int> count(num_segments, 0);
  // For max/min: source row of each (segment, column) entry.
  Eigen::MatrixXi arg = Eigen::MatrixXi::Constant(num_segments, cols, -1);
  for (std::size_t r = 0; r < seg.size(); ++r) {
    const int s = seg[r];
    if (s < 0 || s >= num_segments) {
      throw std::out_of_range("SegmentReduce: segment out of range");
    }
    const auto row = static_cast<Eigen::Index>(r);
    ++count[s];
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double x = av(row, c);
      switch (op) {
        case Reduce::kSum:
        case Reduce::kMean:
          v(s, c) += x;
          break;
        case Reduce::kMax:
          if (arg(s, c) < 0 || x > v(s, c)) {
            v(s, c) = x;
            arg(s, c) = static_cast<int>(r);
          }
          break;
        case Reduce::kMin:
          if (arg(s, c) < 0 || x < v(s, c)) {
            v(s, c) = x;
            arg(s, c) = static_cast<int>(r);
          }
          break;
      }
    }
  }
  if (op == Reduce::kMean) {
    for (int s = 0; s < num_segments; ++s) {
      if (count[s] > 0) v.row(s) /= count[s];
    }
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(v), [a, seg = std::move(seg), count = std::move(count),
                             arg = std::move(arg), op, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    Matrix& ga = t.GradRef(a.id);
    if (op == Reduce::kMax || op == Reduce::kMin) {
      for (Eigen::Index s = 0; s < arg.rows(); ++s) {
        for (Eigen::Index c = 0; c < arg.cols(); ++c) {
          if (arg(s, c) >= 0) ga(arg(s, c), c) += g(s, c);
        }
      }
      return;
    }
    for (std::size_t r = 0; r < seg.size(); ++r) {
      const int s = seg[r];
      const double w = op == Reduce::kMean ? 1.0 / count[s] : 1.0;
      ga.row(static_cast<Eigen::Index>(r)) += w * g.row(s);
    }
  });
}

Var Tape::ConcatCols(std::initializer_list<Var> parts) {
  std::vector<Var> vars(parts);
  if (vars.empty()) throw std::invalid_argument("ConcatCols: no parts");
  const Eigen::Index rows = value(vars.front()).rows();
  Eigen::Index cols = 0;
  for (Var p : vars) {
    if (value(p).rows() != rows) {
      throw std::invalid_argument("ConcatCols: row count mismatch");
    }
    cols += value(p).cols();
  }
  Matrix v(rows, cols);
  Eigen::Index c = 0;
  for (Var p : vars) {
    v.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  Var out{static_cast<int>(nodes_.size())};
  return Push(std::move(v), [vars = std::move(vars), out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    Eigen::Index c = 0;
    for (Var p : vars) {
      const Eigen::Index w = t.value(p).cols();
      t.GradRef(p.id) += g.middleCols(c, w);
      c += w;
    }
  });
}

Var Tape::RowSum(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  return Push(value(a).rowwise().sum(), [a, out](Tape& t) {
    const Matrix g = t.nodes_[out.id].grad;
    t.GradRef(a.id) += g.replicate(1, t.value(a).cols());
  });
}

Var Tape::Sum(Var a) {
  Var out{static_cast<int>(nodes_.size())};
  Matrix v(1, 1);
  v(0, 0) = value(a).sum();
  return Push(std::move(v), [a, out](Tape& t) {
    const double g = t.nodes_[out.id].grad(0, 0);
    t.GradRef(a.id).array() += g;
  });
}

Var Tape::Mean(Var a) {
  const double n = static_cast<double>(value(a).size());
  if (n == 0) throw std::invalid_argument("Mean: empty input");
  Var out{static_cast<int>(nodes_.size())};
  Matrix v(1, 1);
  v(0, 0) = value(a).sum() / n;
  return Push(std::move(v), [a, n, out](Tape& t) {
    const double g = t.nodes_[out.id].grad(0, 0);
    t.GradRef(a.id).array() += g / n;
  });
}

}  // namespace tnco::ad
