// core/include/comedic/parameters.h
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

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "comedic/autodiff.h"

namespace comedic {

/// Seeded generator with platform-independent uniform/normal draws
/// (std distributions are implementation-defined, the raw engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

/// Named trainable matrices. Ordered by name so iteration (and therefore
/// serialisation and optimiser updates) is deterministic.
class ParameterSet {
 public:
  void add(const std::string &name, Matrix value);
  bool contains(const std::string &name) const;
  const Matrix &at(const std::string &name) const;
  Matrix &at(const std::string &name);
  void erase(const std::string &name);

  std::vector<std::string> names() const;
  std::size_t size() const { return values_.size(); }
  std::size_t scalar_count() const;

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }

  bool operator==(const ParameterSet &other) const;

 private:
  std::map<std::string, Matrix> values_;
};

Matrix xavier_uniform(Eigen::Index rows, Eigen::Index cols, Rng &rng);
Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev,
                     Rng &rng);

/// One forward (and optionally backward) evaluation. Parameters are bound
/// to tape leaves on first use; with `track_gradients` false they are
/// constants and no closures are kept.
class Graph {
 public:
  Graph(const ParameterSet &params, bool track_gradients);

  Var param(const std::string &name);
  Var constant(Matrix value) { return tape_.constant(std::move(value)); }
  Tape &tape() { return tape_; }
  bool tracking() const { return track_; }
  const ParameterSet &parameters() const { return *params_; }

  void backward(Var loss) { tape_.backward(loss); }

  /// Gradients for every parameter in the set; zeros for parameters the
  /// forward pass never touched.
  ParameterSet gradients() const;

 private:
  const ParameterSet *params_;
  bool track_;
  Tape tape_;
  std::map<std::string, int> bound_;
};

}  // namespace comedic
