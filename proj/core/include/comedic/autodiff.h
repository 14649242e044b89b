// core/include/comedic/autodiff.h
//
// Copyright 2026 The Comedic Authors. All Rights Reserved.
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

#pragma once

// Minimal reverse-mode automatic differentiation over dense double
// matrices. A Tape records every intermediate value together with a closure
// that pushes the output gradient back to its parents. All values are
// 64-bit.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace comedic {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy.
struct Var {
  Tape *tape = nullptr;
  int id = -1;

  const Matrix &value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape != nullptr && id >= 0; }
};

class Tape {
 public:
  using Backward = std::function<void(Tape &, const Matrix &)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var constant(Matrix value);
  Var leaf(Matrix value);

  /// Records an op result. If no parent requires a gradient, the closure is
  /// dropped and the result is treated as a constant.
  Var record(Matrix value, std::initializer_list<Var> parents, Backward fn);
  Var record(Matrix value, std::span<const Var> parents, Backward fn);

  const Matrix &value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  /// Gradient accumulated at `id`; a zero matrix of the value's shape if
  /// nothing reached it.
  Matrix grad(int id) const;

  void accumulate(int id, const Matrix &g);
  template <typename Expr>
  void accumulate_expr(int id, const Expr &g) {
    Node &n = nodes_[id];
    if (!n.requires_grad) return;
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  /// Seeds d(root)/d(root) = 1 and runs every recorded closure in reverse.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

inline const Matrix &Var::value() const { return tape->value(id); }

namespace ad {

Var matmul(Var a, Var b);
/// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// Adds a 1xC row to every row of a (RxC).
Var add_row(Var a, Var row);
/// Multiplies every row of a (RxC) elementwise by a 1xC row.
Var mul_row(Var a, Var row);

Var relu(Var a);
Var tanh(Var a);
Var sigmoid(Var a);

/// Row-wise softmax. `mask` (optional, same shape) holds additive logits,
/// typically 0 or a large negative number.
Var softmax_rows(Var a, const Matrix *mask = nullptr);

/// Per-row normalisation to zero mean and unit variance with variance
/// floor eps; no affine transform.
Var layer_norm_rows(Var a, double eps);

Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count);
Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);

/// out.row(i) = a.row(index[i]); gradients scatter-add back.
Var gather_rows(Var a, std::span<const int> index);

/// Unfolds a (T x C) sequence into (T x kernel*C) windows centred on each
/// row with zero padding. A 1-D "same" convolution is then a matmul.
Var im2col_1d(Var a, int kernel);

/// Unfolds an (H*W x C) feature map (row index h*W + w) into
/// (Ho*Wo x 9*C) patches of a 3x3 kernel with the given stride and padding 1.
Var im2col_2d(Var a, int height, int width, int stride);

/// Reorders an (H*W x C) map into (H x W*C): one row per time step.
Var fold_width(Var a, int height, int width);

Var sum(Var a);
Var mean(Var a);

/// Scalar node whose value and input gradients were computed externally
/// (closed-form losses). grads[i] must match inputs[i]'s shape.
Var external_scalar(std::span<const Var> inputs, double value,
                    std::vector<Matrix> grads);

}  // namespace ad
}  // namespace comedic
