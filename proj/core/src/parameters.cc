// core/src/parameters.cc
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

#include "comedic/parameters.h"

#include <cmath>
#include <numbers>

#include "comedic/error.h"

namespace comedic {

double Rng::normal() {
  // Box-Muller; u1 kept away from 0.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void ParameterSet::add(const std::string &name, Matrix value) {
  auto [it, inserted] = values_.emplace(name, std::move(value));
  if (!inserted) throw ConfigError("duplicate parameter name: " + name);
}

bool ParameterSet::contains(const std::string &name) const {
  return values_.count(name) != 0;
}

const Matrix &ParameterSet::at(const std::string &name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second;
}

Matrix &ParameterSet::at(const std::string &name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second;
}

void ParameterSet::erase(const std::string &name) { values_.erase(name); }

std::vector<std::string> ParameterSet::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto &[name, _] : values_) out.push_back(name);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto &[_, m] : values_) n += static_cast<std::size_t>(m.size());
  return n;
}

bool ParameterSet::operator==(const ParameterSet &other) const {
  if (values_.size() != other.values_.size()) return false;
  auto a = values_.begin();
  auto b = other.values_.begin();
  for (; a != values_.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    if (a->second.rows() != b->second.rows() ||
        a->second.cols() != b->second.cols())
      return false;
    if (a->second != b->second) return false;
  }
  return true;
}

Matrix xavier_uniform(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-limit, limit);
  return m;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev,
                     Rng &rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = stddev * rng.normal();
  return m;
}

Graph::Graph(const ParameterSet &params, bool track_gradients)
    : params_(&params), track_(track_gradients) {}

Var Graph::param(const std::string &name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return Var{&tape_, it->second};
  const Matrix &value = params_->at(name);
  Var v = track_ ? tape_.leaf(value) : tape_.constant(value);
  bound_.emplace(name, v.id);
  return v;
}

ParameterSet Graph::gradients() const {
  ParameterSet out;
  for (const auto &[name, value] : *params_) {
    auto it = bound_.find(name);
    if (it == bound_.end())
      out.add(name, Matrix::Zero(value.rows(), value.cols()));
    else
      out.add(name, tape_.grad(it->second));
  }
  return out;
}

}  // namespace comedic
