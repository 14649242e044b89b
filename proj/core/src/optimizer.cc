// core/src/optimizer.cc
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

#include "comedic/optimizer.h"

#include <algorithm>
#include <cmath>

#include "comedic/error.h"

namespace comedic {

double noam_rate(int step, double peak, int warmup) {
  if (step < 1) throw ConfigError("noam_rate: step counts from 1");
  if (warmup < 1) return peak;
  const double s = step, w = warmup;
  return peak * std::min(s / w, std::sqrt(w / s));
}

double clip_gradients(ParameterSet &grads, double max_norm) {
  double sq = 0.0;
  for (const auto &[name, g] : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto &[name, g] : grads) g *= s;
  }
  return norm;
}

void Adam::step(ParameterSet &params, const ParameterSet &grads, double lr) {
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, steps_);
  const double c2 = 1.0 - std::pow(b2, steps_);
  for (auto &[name, value] : params) {
    if (!grads.contains(name)) continue;
    const Matrix &g = grads.at(name);
    if (g.rows() != value.rows() || g.cols() != value.cols())
      throw ConfigError("Adam: gradient shape mismatch for " + name);
    if (!m_.contains(name)) {
      m_.add(name, Matrix::Zero(value.rows(), value.cols()));
      v_.add(name, Matrix::Zero(value.rows(), value.cols()));
    }
    Matrix &m = m_.at(name);
    Matrix &v = v_.at(name);
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + options_.eps);
  }
}

void Adam::restore(ParameterSet m, ParameterSet v, int steps) {
  m_ = std::move(m);
  v_ = std::move(v);
  steps_ = steps;
}

}  // namespace comedic
