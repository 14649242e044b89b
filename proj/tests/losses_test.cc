// tests/losses_test.cc
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

#include "comedic/losses.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "comedic/error.h"
#include "testing.h"

namespace comedic {
namespace {

TEST(DurationLoss, HandCaseAndZero) {
  std::vector<double> p{2.0}, t{4.0};
  EXPECT_DOUBLE_EQ(duration_loss(p, t), 4.0);
  std::vector<double> a{1, 2, 3}, b{1, 2, 3};
  EXPECT_EQ(duration_loss(a, b), 0.0);
  b[1] = 2.5;
  EXPECT_GT(duration_loss(a, b), 0.0);
  std::vector<bool> mask{true, false, true};
  EXPECT_EQ(duration_loss(a, b, &mask), 0.0);
  std::vector<bool> none(3, false);
  EXPECT_THROW(duration_loss(a, b, &none), InputError);
  EXPECT_THROW(duration_loss(a, std::vector<double>{1.0}), InputError);
}

TEST(DurationLoss, GradientMatchesDifferences) {
  Rng rng(3);
  std::vector<double> p(6), t(6), g;
  for (std::size_t i = 0; i < 6; ++i) {
    p[i] = rng.uniform(0, 10);
    t[i] = rng.uniform(0, 10);
  }
  duration_loss(p, t, nullptr, &g);
  for (std::size_t i = 0; i < 6; ++i) {
    auto up = p, down = p;
    up[i] += 1e-6;
    down[i] -= 1e-6;
    EXPECT_NEAR(g[i], (duration_loss(up, t) - duration_loss(down, t)) / 2e-6, 1e-6);
  }
}

TEST(DurationLoss, LinearVersusLogPenaltyRatio) {
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    // Same log ratio, different absolute scale.
    const double d1 = rng.uniform(1, 20), ratio = rng.uniform(1.1, 3.0), s = rng.uniform(1.5, 5);
    const double d2 = s * d1;
    std::vector<double> p1{d1}, t1{d1 * ratio}, p2{d2}, t2{d2 * ratio};
    EXPECT_NEAR(duration_loss(p2, t2) / duration_loss(p1, t1), (d2 / d1) * (d2 / d1), 1e-9);
    EXPECT_NEAR(log_duration_loss(p2, t2), log_duration_loss(p1, t1), 1e-12);
  }
}

TEST(HalfWeighted, HandCaseAndIdentities) {
  std::vector<double> l{1, 1, 3, 5};
  EXPECT_DOUBLE_EQ(half_weighted_loss(l, 2.0), 9.0);
  EXPECT_EQ(half_weighted_loss(l, 0.0), 1.0);
  EXPECT_EQ(half_weighted_loss(l, 1.0), 1.0 + 4.0);
  // Odd length: the first half takes the middle frame.
  std::vector<double> odd{2, 4, 6, 10, 20};
  EXPECT_DOUBLE_EQ(half_weighted_loss(odd, 0.5), 4.0 + 0.5 * 15.0);
  std::vector<double> one{7};
  EXPECT_EQ(half_weighted_loss(one, 3.0), 7.0);
  EXPECT_THROW(half_weighted_loss(l, -0.1), ConfigError);
  EXPECT_THROW(half_weighted_loss(l, std::numeric_limits<double>::quiet_NaN()), ConfigError);
  EXPECT_THROW(half_weighted_loss(std::vector<double>{}, 1.0), InputError);
}

TEST(HalfWeighted, MonotoneInAlpha) {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> l(2 + rng.index(30));
    for (auto &x : l) x = rng.uniform(0.01, 3.0);
    double prev = -1;
    for (double a = 0; a <= 4.0; a += 0.25) {
      const double v = half_weighted_loss(l, a);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(MelL1, PerFrameMean) {
  Matrix a(2, 3), b(2, 3);
  a << 1, 2, 3, 0, 0, 0;
  b << 1, 0, 0, 1, -1, 1;
  auto l = mel_l1_per_frame(a, b);
  EXPECT_DOUBLE_EQ(l[0], 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(l[1], 1.0);
  EXPECT_THROW(mel_l1_per_frame(a, Matrix::Zero(3, 3)), InputError);
}

LossTargets targets(Rng &rng, int frames, int bins, int phones) {
  LossTargets t;
  t.mel = testing::random_matrix(frames, bins, rng);
  for (int i = 0; i < phones; ++i) {
    t.durations.push_back(rng.uniform(1, 6));
    t.pitch.push_back(rng.uniform(-1, 1));
    t.energy.push_back(rng.uniform(-1, 1));
  }
  return t;
}

TEST(TotalLoss, WeightedSumAndGraphGradients) {
  Rng rng(9);
  LossTargets t = targets(rng, 7, 4, 3);
  LossConfig cfg;
  cfg.alpha = 1.5;
  cfg.weights = {1.0, 0.5, 2.0, 0.25};
  ParameterSet params;
  params.add("mel", testing::random_matrix(7, 4, rng));
  params.add("d", testing::random_matrix(3, 1, rng, 4));
  params.add("p", testing::random_matrix(3, 1, rng));
  params.add("e", testing::random_matrix(3, 1, rng));
  auto forward = [](Graph &g) {
    ForwardVars f;
    f.mel = g.param("mel");
    f.duration = g.param("d");
    f.pitch = g.param("p");
    f.energy = g.param("e");
    return f;
  };
  auto loss = [&](const ParameterSet &p) {
    Graph g(p, false);
    return total_loss(g, forward(g), t, cfg).value()(0, 0);
  };
  Graph g(params, true);
  LossBreakdown b;
  g.backward(total_loss(g, forward(g), t, cfg, &b));
  EXPECT_NEAR(b.total, b.mel_loss + 0.5 * b.duration_loss + 2.0 * b.pitch_loss + 0.25 * b.energy_loss, 1e-12);
  ParameterSet grads = g.gradients();
  for (const auto &name : params.names()) {
    auto r = testing::check_parameter_gradient(loss, params, name, grads.at(name), 10, 1, 1e-7);
    EXPECT_LT(r.max_rel_error, 1e-5) << name;
  }
  AcousticOutput out;
  out.mel = params.at("mel");
  for (int i = 0; i < 3; ++i) {
    out.duration_raw.push_back(params.at("d")(i, 0));
    out.pitch.push_back(params.at("p")(i, 0));
    out.energy.push_back(params.at("e")(i, 0));
  }
  EXPECT_DOUBLE_EQ(total_loss(out, t, cfg).total, b.total);
  out.pitch[1] = std::numeric_limits<double>::quiet_NaN();
  try {
    total_loss(out, t, cfg);
    FAIL();
  } catch (const TrainingError &e) {
    EXPECT_NE(std::string(e.what()).find("pitch"), std::string::npos);
  }
}

}  // namespace
}  // namespace comedic
