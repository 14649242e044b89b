// tests/prosody_encoder_test.cc
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

#include "comedic/prosody_encoder.h"

#include <gtest/gtest.h>

#include <cmath>

#include "comedic/error.h"
#include "testing.h"

namespace comedic {
namespace {

// Scalar loops only: no Eigen products, no shared code with the library.
Vector explicit_attention(const Vector &p, const Matrix &tokens, const Matrix &wq,
                          const Matrix &wk, const Matrix &wv, int heads, Matrix &weights) {
  const int n = static_cast<int>(tokens.rows());
  const int d = static_cast<int>(tokens.cols());
  const int dh = d / heads;
  std::vector<double> q(d, 0.0), k(n * d, 0.0), v(n * d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) q[j] += p[i] * wq(i, j);
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        k[t * d + j] += tokens(t, i) * wk(i, j);
        v[t * d + j] += tokens(t, i) * wv(i, j);
      }
  Vector e = Vector::Zero(d);
  weights.resize(heads, n);
  for (int h = 0; h < heads; ++h) {
    std::vector<double> s(n);
    double top = -1e300;
    for (int t = 0; t < n; ++t) {
      double acc = 0;
      for (int j = h * dh; j < (h + 1) * dh; ++j) acc += q[j] * k[t * d + j];
      s[t] = acc / std::sqrt(static_cast<double>(dh));
      top = std::max(top, s[t]);
    }
    double z = 0;
    for (int t = 0; t < n; ++t) z += std::exp(s[t] - top);
    for (int t = 0; t < n; ++t) weights(h, t) = std::exp(s[t] - top) / z;
    for (int j = h * dh; j < (h + 1) * dh; ++j)
      for (int t = 0; t < n; ++t) e[j] += weights(h, t) * v[t * d + j];
  }
  return e;
}

ProsodySpace random_space(int tokens, int d, int heads, Rng &rng) {
  ProsodySpace s;
  s.tokens = testing::random_matrix(tokens, d, rng);
  s.w_query = testing::random_matrix(d, d, rng);
  s.w_key = testing::random_matrix(d, d, rng);
  s.w_value = testing::random_matrix(d, d, rng);
  s.num_heads = heads;
  return s;
}

TEST(AttendProsody, SingleHeadTwoTokensHandCase) {
  ProsodySpace s;
  s.tokens.resize(2, 4);
  s.tokens << 1, 0, 0, 0, 0, 1, 0, 0;
  s.w_query = Matrix::Identity(4, 4);
  s.w_key = Matrix::Identity(4, 4);
  s.w_value = Matrix::Identity(4, 4);
  Vector p(4);
  p << 2, 0, 0, 0;
  auto r = attend_prosody(p, s);
  // Scores 2/sqrt(4)=1 and 0.
  const double w0 = std::exp(1.0) / (std::exp(1.0) + 1.0);
  EXPECT_NEAR(r.attention(0, 0), w0, 1e-15);
  EXPECT_NEAR(r.e[0], w0, 1e-15);
  EXPECT_NEAR(r.e[1], 1 - w0, 1e-15);
  EXPECT_EQ(r.e[2], 0.0);
}

TEST(AttendProsody, MatchesExplicitOracle) {
  Rng rng(17);
  for (int heads : {1, 2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      ProsodySpace s = random_space(2 + trial % 5, 8, heads, rng);
      Vector p = testing::random_matrix(8, 1, rng);
      Matrix w;
      Vector e = explicit_attention(p, s.tokens, s.w_query, s.w_key, s.w_value, heads, w);
      auto r = attend_prosody(p, s);
      EXPECT_LT((r.e - e).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((r.attention - w).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(AttendProsody, TiedProjectionUsesQueryWeights) {
  Rng rng(5);
  ProsodySpace s = random_space(3, 4, 1, rng);
  s.tie_qk_projection = true;
  Vector p = testing::random_matrix(4, 1, rng);
  Matrix w;
  Vector e = explicit_attention(p, s.tokens, s.w_query, s.w_query, s.w_value, 1, w);
  s.w_key.resize(0, 0);
  EXPECT_LT((attend_prosody(p, s).e - e).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AttendProsody, RejectsBadShapes) {
  Rng rng(1);
  ProsodySpace s = random_space(3, 6, 4, rng);
  EXPECT_THROW(attend_prosody(Vector::Zero(6), s), ConfigError);
  s.num_heads = 2;
  EXPECT_THROW(attend_prosody(Vector::Zero(5), s), ConfigError);
  s.w_value = Matrix::Zero(6, 5);
  EXPECT_THROW(attend_prosody(Vector::Zero(6), s), ConfigError);
}

TEST(ReferenceEncoder, ShapesAndMinimumLength) {
  ModelConfig cfg = tiny_model();
  ParameterSet params;
  Rng rng(3);
  init_prosody_parameters(params, cfg, rng);
  EXPECT_EQ(cfg.min_reference_frames(), 64);
  Matrix mel = testing::random_matrix(70, cfg.mel_bins, rng);
  auto q = encode_reference(params, cfg, mel);
  EXPECT_EQ(q.gru_state.size(), cfg.reference.gru_hidden);
  EXPECT_EQ(q.query.size(), cfg.prosody.token_dim);
  EXPECT_LT(q.gru_state.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_THROW(encode_reference(params, cfg, mel.topRows(10)), InputError);
  EXPECT_THROW(encode_reference(params, cfg, Matrix::Zero(70, 5)), InputError);
}

TEST(ReferenceEncoder, GradientsMatchFiniteDifferences) {
  ModelConfig cfg = tiny_model();
  ParameterSet params;
  Rng rng(8);
  init_prosody_parameters(params, cfg, rng);
  Matrix mel = testing::random_matrix(66, cfg.mel_bins, rng);
  Matrix probe = testing::random_matrix(1, cfg.prosody.token_dim, rng);
  auto loss = [&](const ParameterSet &p) {
    Graph g(p, false);
    return (prosody_representation(g, cfg, mel).value().array() * probe.array()).sum();
  };
  Graph g(params, true);
  Var e = prosody_representation(g, cfg, mel);
  g.backward(ad::sum(ad::mul(e, g.constant(probe))));
  ParameterSet grads = g.gradients();
  for (const auto &name : {"prosody.tokens", "prosody.w_query", "prosody.w_key", "prosody.w_value",
                           "prosody.ref.gru.w_input", "prosody.ref.conv0.weight",
                           "prosody.ref.adapter.weight"}) {
    auto r = testing::check_parameter_gradient(loss, params, name, grads.at(name), 12, 2);
    EXPECT_LT(r.max_rel_error, 1e-4) << name;
  }
}

}  // namespace
}  // namespace comedic
