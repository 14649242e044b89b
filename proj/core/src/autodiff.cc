// core/src/autodiff.cc
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

#include "comedic/autodiff.h"

#include <cassert>
#include <cmath>

#include "comedic/error.h"

namespace comedic {

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents,
                 Backward fn) {
  return record(std::move(value),
                std::span<const Var>(parents.begin(), parents.size()),
                std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> parents, Backward fn) {
  Node n;
  n.value = std::move(value);
  for (const Var &p : parents) {
    assert(p.tape == this);
    if (nodes_[p.id].requires_grad) {
      n.requires_grad = true;
      break;
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Matrix Tape::grad(int id) const {
  const Node &n = nodes_[id];
  if (n.has_grad) return n.grad;
  return Matrix::Zero(n.value.rows(), n.value.cols());
}

void Tape::accumulate(int id, const Matrix &g) { accumulate_expr(id, g); }

void Tape::backward(Var root) {
  if (root.tape != this || root.value().size() != 1)
    throw InputError("backward() needs a scalar root on this tape");
  for (Node &n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  accumulate(root.id, Matrix::Ones(1, 1));
  for (int id = root.id; id >= 0; --id) {
    Node &n = nodes_[id];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

namespace ad {
namespace {

void check_same_shape(Var a, Var b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(op) + ": shape mismatch (" +
                      std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
}

}  // namespace

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows())
    throw ConfigError("matmul: inner dimensions differ (" +
                      std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + ")");
  Tape &t = *a.tape;
  int ia = a.id, ib = b.id;
  return t.record(a.value() * b.value(), {a, b},
                  [ia, ib](Tape &t, const Matrix &g) {
                    if (t.requires_grad(ia))
                      t.accumulate_expr(ia, g * t.value(ib).transpose());
                    if (t.requires_grad(ib))
                      t.accumulate_expr(ib, t.value(ia).transpose() * g);
                  });
}

Var matmul_nt(Var a, Var b) {
  if (a.cols() != b.cols())
    throw ConfigError("matmul_nt: column counts differ");
  Tape &t = *a.tape;
  int ia = a.id, ib = b.id;
  return t.record(a.value() * b.value().transpose(), {a, b},
                  [ia, ib](Tape &t, const Matrix &g) {
                    if (t.requires_grad(ia))
                      t.accumulate_expr(ia, g * t.value(ib));
                    if (t.requires_grad(ib))
                      t.accumulate_expr(ib, g.transpose() * t.value(ia));
                  });
}

Var add(Var a, Var b) {
  check_same_shape(a, b, "add");
  int ia = a.id, ib = b.id;
  return a.tape->record(a.value() + b.value(), {a, b},
                        [ia, ib](Tape &t, const Matrix &g) {
                          t.accumulate(ia, g);
                          t.accumulate(ib, g);
                        });
}

Var sub(Var a, Var b) {
  check_same_shape(a, b, "sub");
  int ia = a.id, ib = b.id;
  return a.tape->record(a.value() - b.value(), {a, b},
                        [ia, ib](Tape &t, const Matrix &g) {
                          t.accumulate(ia, g);
                          t.accumulate_expr(ib, -g);
                        });
}

Var mul(Var a, Var b) {
  check_same_shape(a, b, "mul");
  int ia = a.id, ib = b.id;
  return a.tape->record(
      a.value().cwiseProduct(b.value()), {a, b},
      [ia, ib](Tape &t, const Matrix &g) {
        if (t.requires_grad(ia))
          t.accumulate_expr(ia, g.cwiseProduct(t.value(ib)));
        if (t.requires_grad(ib))
          t.accumulate_expr(ib, g.cwiseProduct(t.value(ia)));
      });
}

Var scale(Var a, double s) {
  int ia = a.id;
  return a.tape->record(a.value() * s, {a},
                        [ia, s](Tape &t, const Matrix &g) {
                          t.accumulate_expr(ia, g * s);
                        });
}

Var add_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ConfigError("add_row: row width " + std::to_string(row.cols()) +
                      " does not match " + std::to_string(a.cols()));
  int ia = a.id, ir = row.id;
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.tape->record(std::move(out), {a, row},
                        [ia, ir](Tape &t, const Matrix &g) {
                          t.accumulate(ia, g);
                          if (t.requires_grad(ir))
                            t.accumulate_expr(ir, g.colwise().sum());
                        });
}

Var mul_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ConfigError("mul_row: row width " + std::to_string(row.cols()) +
                      " does not match " + std::to_string(a.cols()));
  int ia = a.id, ir = row.id;
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return a.tape->record(
      std::move(out), {a, row}, [ia, ir](Tape &t, const Matrix &g) {
        if (t.requires_grad(ia)) {
          Matrix ga = g.array().rowwise() * t.value(ir).row(0).array();
          t.accumulate(ia, ga);
        }
        if (t.requires_grad(ir))
          t.accumulate_expr(ir, g.cwiseProduct(t.value(ia)).colwise().sum());
      });
}

Var relu(Var a) {
  int ia = a.id;
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape->record(std::move(out), {a}, [ia](Tape &t, const Matrix &g) {
    Matrix ga = (t.value(ia).array() > 0.0).select(g, 0.0);
    t.accumulate(ia, ga);
  });
}

Var tanh(Var a) {
  Matrix out = a.value().array().tanh().matrix();
  int ia = a.id;
  Matrix saved = out;
  return a.tape->record(std::move(out), {a},
                        [ia, y = std::move(saved)](Tape &t, const Matrix &g) {
                          t.accumulate_expr(
                              ia, (g.array() * (1.0 - y.array().square()))
                                      .matrix());
                        });
}

Var sigmoid(Var a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  int ia = a.id;
  Matrix saved = out;
  return a.tape->record(std::move(out), {a},
                        [ia, saved = std::move(saved)](Tape &t,
                                                       const Matrix &g) {
                          t.accumulate_expr(
                              ia, (g.array() * saved.array() *
                                   (1.0 - saved.array()))
                                      .matrix());
                        });
}

Var softmax_rows(Var a, const Matrix *mask) {
  Matrix logits = a.value();
  if (mask != nullptr) {
    if (mask->rows() != logits.rows() || mask->cols() != logits.cols())
      throw ConfigError("softmax_rows: mask shape mismatch");
    logits += *mask;
  }
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    double m = logits.row(r).maxCoeff();
    RowVector e = (logits.row(r).array() - m).exp().matrix();
    out.row(r) = e / e.sum();
  }
  int ia = a.id;
  Matrix saved = out;
  return a.tape->record(
      std::move(out), {a},
      [ia, y = std::move(saved)](Tape &t, const Matrix &g) {
        Vector dot = g.cwiseProduct(y).rowwise().sum();
        Matrix ga = y.array() * (g.colwise() - dot).array();
        t.accumulate(ia, ga);
      });
}

Var layer_norm_rows(Var a, double eps) {
  const Matrix &x = a.value();
  const Eigen::Index cols = x.cols();
  if (cols == 0) throw ConfigError("layer_norm_rows: zero-width features");
  Vector mu = x.rowwise().mean();
  Matrix centered = x.colwise() - mu;
  Vector var = centered.array().square().rowwise().mean();
  Vector inv_std = (var.array() + eps).rsqrt();
  Matrix y = centered.array().colwise() * inv_std.array();
  int ia = a.id;
  Matrix saved = y;
  return a.tape->record(
      std::move(y), {a},
      [ia, y = std::move(saved), inv_std](Tape &t, const Matrix &g) {
        Vector g_mean = g.rowwise().mean();
        Vector gy_mean = g.cwiseProduct(y).rowwise().mean();
        Matrix ga = (g.colwise() - g_mean) - (y.array().colwise() *
                                              gy_mean.array())
                                                 .matrix();
        ga = ga.array().colwise() * inv_std.array();
        t.accumulate(ia, ga);
      });
}

Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.cols())
    throw ConfigError("slice_cols: range out of bounds");
  int ia = a.id;
  Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape->record(
      a.value().middleCols(begin, count), {a},
      [ia, begin, count, rows, cols](Tape &t, const Matrix &g) {
        Matrix ga = Matrix::Zero(rows, cols);
        ga.middleCols(begin, count) = g;
        t.accumulate(ia, ga);
      });
}

Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.rows())
    throw ConfigError("slice_rows: range out of bounds");
  int ia = a.id;
  Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape->record(
      a.value().middleRows(begin, count), {a},
      [ia, begin, count, rows, cols](Tape &t, const Matrix &g) {
        Matrix ga = Matrix::Zero(rows, cols);
        ga.middleRows(begin, count) = g;
        t.accumulate(ia, ga);
      });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("concat_cols: no inputs");
  Eigen::Index rows = parts[0].rows(), cols = 0;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw ConfigError("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const Var &p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    ids.push_back(p.id);
    offsets.push_back(off);
    off += p.cols();
  }
  return parts[0].tape->record(
      std::move(out), parts,
      [ids, offsets](Tape &t, const Matrix &g) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!t.requires_grad(ids[i])) continue;
          t.accumulate_expr(
              ids[i], g.middleCols(offsets[i], t.value(ids[i]).cols()));
        }
      });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("concat_rows: no inputs");
  Eigen::Index cols = parts[0].cols(), rows = 0;
  for (const Var &p : parts) {
    if (p.cols() != cols) throw ConfigError("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index off = 0;
  for (const Var &p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    ids.push_back(p.id);
    offsets.push_back(off);
    off += p.rows();
  }
  return parts[0].tape->record(
      std::move(out), parts,
      [ids, offsets](Tape &t, const Matrix &g) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!t.requires_grad(ids[i])) continue;
          t.accumulate_expr(
              ids[i], g.middleRows(offsets[i], t.value(ids[i]).rows()));
        }
      });
}

Var gather_rows(Var a, std::span<const int> index) {
  const Matrix &src = a.value();
  Matrix out(static_cast<Eigen::Index>(index.size()), src.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= src.rows())
      throw InputError("gather_rows: index " + std::to_string(index[i]) +
                       " out of range [0, " + std::to_string(src.rows()) +
                       ")");
    out.row(static_cast<Eigen::Index>(i)) = src.row(index[i]);
  }
  int ia = a.id;
  std::vector<int> idx(index.begin(), index.end());
  Eigen::Index rows = src.rows(), cols = src.cols();
  return a.tape->record(
      std::move(out), {a},
      [ia, idx = std::move(idx), rows, cols](Tape &t, const Matrix &g) {
        Matrix ga = Matrix::Zero(rows, cols);
        for (std::size_t i = 0; i < idx.size(); ++i)
          ga.row(idx[i]) += g.row(static_cast<Eigen::Index>(i));
        t.accumulate(ia, ga);
      });
}

Var im2col_1d(Var a, int kernel) {
  if (kernel < 1 || kernel % 2 == 0)
    throw ConfigError("im2col_1d: kernel must be odd and positive");
  const Matrix &x = a.value();
  const Eigen::Index steps = x.rows(), ch = x.cols();
  const int pad = kernel / 2;
  Matrix out = Matrix::Zero(steps, kernel * ch);
  for (Eigen::Index s = 0; s < steps; ++s)
    for (int j = 0; j < kernel; ++j) {
      Eigen::Index src = s + j - pad;
      if (src < 0 || src >= steps) continue;
      out.block(s, j * ch, 1, ch) = x.row(src);
    }
  int ia = a.id;
  return a.tape->record(
      std::move(out), {a},
      [ia, steps, ch, kernel, pad](Tape &t, const Matrix &g) {
        Matrix ga = Matrix::Zero(steps, ch);
        for (Eigen::Index s = 0; s < steps; ++s)
          for (int j = 0; j < kernel; ++j) {
            Eigen::Index src = s + j - pad;
            if (src < 0 || src >= steps) continue;
            ga.row(src) += g.block(s, j * ch, 1, ch);
          }
        t.accumulate(ia, ga);
      });
}

Var im2col_2d(Var a, int height, int width, int stride) {
  const Matrix &x = a.value();
  if (x.rows() != static_cast<Eigen::Index>(height) * width)
    throw ConfigError("im2col_2d: map has " + std::to_string(x.rows()) +
                      " rows, expected " + std::to_string(height * width));
  const Eigen::Index ch = x.cols();
  const int out_h = (height - 1) / stride + 1;
  const int out_w = (width - 1) / stride + 1;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(out_h) * out_w, 9 * ch);
  for (int oh = 0; oh < out_h; ++oh)
    for (int ow = 0; ow < out_w; ++ow) {
      const Eigen::Index row = static_cast<Eigen::Index>(oh) * out_w + ow;
      for (int kh = 0; kh < 3; ++kh) {
        const int ih = oh * stride + kh - 1;
        if (ih < 0 || ih >= height) continue;
        for (int kw = 0; kw < 3; ++kw) {
          const int iw = ow * stride + kw - 1;
          if (iw < 0 || iw >= width) continue;
          out.block(row, (kh * 3 + kw) * ch, 1, ch) =
              x.row(static_cast<Eigen::Index>(ih) * width + iw);
        }
      }
    }
  int ia = a.id;
  return a.tape->record(
      std::move(out), {a},
      [ia, height, width, stride, out_h, out_w, ch](Tape &t,
                                                    const Matrix &g) {
        Matrix ga = Matrix::Zero(static_cast<Eigen::Index>(height) * width, ch);
        for (int oh = 0; oh < out_h; ++oh)
          for (int ow = 0; ow < out_w; ++ow) {
            const Eigen::Index row = static_cast<Eigen::Index>(oh) * out_w + ow;
            for (int kh = 0; kh < 3; ++kh) {
              const int ih = oh * stride + kh - 1;
              if (ih < 0 || ih >= height) continue;
              for (int kw = 0; kw < 3; ++kw) {
                const int iw = ow * stride + kw - 1;
                if (iw < 0 || iw >= width) continue;
                ga.row(static_cast<Eigen::Index>(ih) * width + iw) +=
                    g.block(row, (kh * 3 + kw) * ch, 1, ch);
              }
            }
          }
        t.accumulate(ia, ga);
      });
}

Var fold_width(Var a, int height, int width) {
  const Matrix &x = a.value();
  if (x.rows() != static_cast<Eigen::Index>(height) * width)
    throw ConfigError("fold_width: shape mismatch");
  const Eigen::Index ch = x.cols();
  Matrix out(height, width * ch);
  for (int h = 0; h < height; ++h)
    for (int w = 0; w < width; ++w)
      out.block(h, w * ch, 1, ch) =
          x.row(static_cast<Eigen::Index>(h) * width + w);
  int ia = a.id;
  return a.tape->record(
      std::move(out), {a}, [ia, height, width, ch](Tape &t, const Matrix &g) {
        Matrix ga(static_cast<Eigen::Index>(height) * width, ch);
        for (int h = 0; h < height; ++h)
          for (int w = 0; w < width; ++w)
            ga.row(static_cast<Eigen::Index>(h) * width + w) =
                g.block(h, w * ch, 1, ch);
        t.accumulate(ia, ga);
      });
}

Var sum(Var a) {
  int ia = a.id;
  Eigen::Index rows = a.rows(), cols = a.cols();
  return a.tape->record(Matrix::Constant(1, 1, a.value().sum()), {a},
                        [ia, rows, cols](Tape &t, const Matrix &g) {
                          t.accumulate_expr(
                              ia, Matrix::Constant(rows, cols, g(0, 0)));
                        });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw InputError("mean: empty input");
  return scale(sum(a), 1.0 / n);
}

Var external_scalar(std::span<const Var> inputs, double value,
                    std::vector<Matrix> grads) {
  if (inputs.empty() || grads.size() != inputs.size())
    throw ConfigError("external_scalar: inputs/gradients mismatch");
  std::vector<int> ids;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (grads[i].rows() != inputs[i].rows() ||
        grads[i].cols() != inputs[i].cols())
      throw ConfigError("external_scalar: gradient shape mismatch");
    ids.push_back(inputs[i].id);
  }
  return inputs[0].tape->record(
      Matrix::Constant(1, 1, value), inputs,
      [ids, grads = std::move(grads)](Tape &t, const Matrix &g) {
        for (std::size_t i = 0; i < ids.size(); ++i)
          if (t.requires_grad(ids[i]))
            t.accumulate_expr(ids[i], grads[i] * g(0, 0));
      });
}

}  // namespace ad
}  // namespace comedic
