// tests/testing.h
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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <unistd.h>

#include "comedic/parameters.h"

namespace comedic::testing {

inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("comedic_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng &rng, double scale = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.uniform(-1.0, 1.0);
  return m;
}

struct GradCheck {
  double max_rel_error = 0.0;
  int checked = 0;
};

// Central differences on `count` sampled entries of params[name]. `loss`
// must be a pure function of the parameter set; `analytic` is its gradient.
inline GradCheck check_parameter_gradient(
    const std::function<double(const ParameterSet &)> &loss, ParameterSet params,
    const std::string &name, const Matrix &analytic, int count, std::uint64_t seed,
    double h = 1e-5) {
  GradCheck out;
  Rng rng(seed);
  const Eigen::Index n = params.at(name).size();
  for (int k = 0; k < count; ++k) {
    const auto i = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    double &x = params.at(name).data()[i];
    const double x0 = x;
    x = x0 + h;
    const double up = loss(params);
    x = x0 - h;
    const double down = loss(params);
    x = x0;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.data()[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(a - numeric) / denom);
    ++out.checked;
  }
  return out;
}

}  // namespace comedic::testing
