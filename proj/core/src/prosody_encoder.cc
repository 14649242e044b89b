// core/src/prosody_encoder.cc
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

#include <cmath>
#include <string>

#include "comedic/error.h"

namespace comedic {
namespace {

std::string conv_name(std::size_t i, const char *what) {
  return "prosody.ref.conv" + std::to_string(i) + "." + what;
}

Var gru_step(Var x, Var h, Var w_input, Var w_hidden, Var b_input,
             Var b_hidden, int width) {
  Var gi = ad::add_row(ad::matmul(x, w_input), b_input);
  Var gh = ad::add_row(ad::matmul(h, w_hidden), b_hidden);
  Var z = ad::sigmoid(ad::add(ad::slice_cols(gi, 0, width),
                              ad::slice_cols(gh, 0, width)));
  Var r = ad::sigmoid(ad::add(ad::slice_cols(gi, width, width),
                              ad::slice_cols(gh, width, width)));
  Var n = ad::tanh(ad::add(ad::slice_cols(gi, 2 * width, width),
                           ad::mul(r, ad::slice_cols(gh, 2 * width, width))));
  // (1 - z) * n + z * h
  return ad::add(n, ad::mul(z, ad::sub(h, n)));
}

}  // namespace

void ProsodySpace::validate() const {
  const Eigen::Index d = tokens.cols();
  if (tokens.rows() < 1 || d < 1) throw ConfigError("prosody space: empty token matrix");
  if (num_heads < 1 || d % num_heads != 0)
    throw ConfigError("prosody space: d=" + std::to_string(d) +
                      " not divisible by num_heads=" + std::to_string(num_heads));
  auto square = [d](const Matrix &w, const char *name) {
    if (w.rows() != d || w.cols() != d)
      throw ConfigError(std::string("prosody space: ") + name + " must be " +
                        std::to_string(d) + "x" + std::to_string(d));
  };
  square(w_query, "w_query");
  if (!tie_qk_projection) square(w_key, "w_key");
  square(w_value, "w_value");
}

void init_prosody_parameters(ParameterSet &params, const ModelConfig &config,
                             Rng &rng) {
  const auto &ref = config.reference;
  int in_ch = 1;
  for (std::size_t i = 0; i < ref.conv_channels.size(); ++i) {
    const int out_ch = ref.conv_channels[i];
    params.add(conv_name(i, "weight"), xavier_uniform(9 * in_ch, out_ch, rng));
    params.add(conv_name(i, "bias"), Matrix::Zero(1, out_ch));
    in_ch = out_ch;
  }
  int width = config.mel_bins;
  for (std::size_t i = 0; i < ref.conv_channels.size(); ++i) width = (width - 1) / 2 + 1;
  const int gru_in = width * in_ch;
  const int h = ref.gru_hidden;
  params.add("prosody.ref.gru.w_input", xavier_uniform(gru_in, 3 * h, rng));
  params.add("prosody.ref.gru.w_hidden", xavier_uniform(h, 3 * h, rng));
  params.add("prosody.ref.gru.b_input", Matrix::Zero(1, 3 * h));
  params.add("prosody.ref.gru.b_hidden", Matrix::Zero(1, 3 * h));
  const int d = config.prosody.token_dim;
  params.add("prosody.ref.adapter.weight", xavier_uniform(h, d, rng));
  params.add("prosody.ref.adapter.bias", Matrix::Zero(1, d));
  params.add("prosody.tokens", normal_matrix(config.prosody.num_tokens, d, 0.5, rng));
  params.add("prosody.w_query", xavier_uniform(d, d, rng));
  if (!config.prosody.tie_qk_projection)
    params.add("prosody.w_key", xavier_uniform(d, d, rng));
  params.add("prosody.w_value", xavier_uniform(d, d, rng));
}

ProsodySpace prosody_space(const ParameterSet &params, const ModelConfig &config) {
  ProsodySpace s;
  s.tokens = params.at("prosody.tokens");
  s.w_query = params.at("prosody.w_query");
  s.tie_qk_projection = config.prosody.tie_qk_projection;
  if (!s.tie_qk_projection) s.w_key = params.at("prosody.w_key");
  s.w_value = params.at("prosody.w_value");
  s.num_heads = config.prosody.num_heads;
  return s;
}

Var reference_query(Graph &graph, const ModelConfig &config, const Matrix &mel,
                    Var *gru_state) {
  const int min_frames = config.min_reference_frames();
  if (mel.rows() < min_frames)
    throw InputError("reference mel has " + std::to_string(mel.rows()) +
                     " frames; the reference encoder needs at least " +
                     std::to_string(min_frames));
  if (mel.cols() != config.mel_bins)
    throw InputError("reference mel has " + std::to_string(mel.cols()) +
                     " bins, model expects " + std::to_string(config.mel_bins));
  // (frames*bins x 1) single-channel map, row index = frame * bins + bin.
  Matrix map(mel.rows() * mel.cols(), 1);
  for (Eigen::Index t = 0; t < mel.rows(); ++t)
    for (Eigen::Index b = 0; b < mel.cols(); ++b) map(t * mel.cols() + b, 0) = mel(t, b);
  Var x = graph.constant(std::move(map));
  int height = static_cast<int>(mel.rows());
  int width = static_cast<int>(mel.cols());
  const auto &channels = config.reference.conv_channels;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    Var cols = ad::im2col_2d(x, height, width, 2);
    x = ad::relu(ad::add_row(ad::matmul(cols, graph.param(conv_name(i, "weight"))),
                             graph.param(conv_name(i, "bias"))));
    height = (height - 1) / 2 + 1;
    width = (width - 1) / 2 + 1;
  }
  Var steps = ad::fold_width(x, height, width);
  const int h = config.reference.gru_hidden;
  Var w_input = graph.param("prosody.ref.gru.w_input");
  Var w_hidden = graph.param("prosody.ref.gru.w_hidden");
  Var b_input = graph.param("prosody.ref.gru.b_input");
  Var b_hidden = graph.param("prosody.ref.gru.b_hidden");
  Var state = graph.constant(Matrix::Zero(1, h));
  for (int t = 0; t < height; ++t)
    state = gru_step(ad::slice_rows(steps, t, 1), state, w_input, w_hidden,
                     b_input, b_hidden, h);
  if (gru_state != nullptr) *gru_state = state;
  return ad::add_row(ad::matmul(state, graph.param("prosody.ref.adapter.weight")),
                     graph.param("prosody.ref.adapter.bias"));
}

Var attend_prosody(Var query, Var tokens, Var w_query, Var w_key, Var w_value,
                   int num_heads, Matrix *attention) {
  const Eigen::Index d = tokens.cols();
  if (query.rows() != 1 || query.cols() != d)
    throw ConfigError("attend_prosody: query must be 1x" + std::to_string(d));
  if (num_heads < 1 || d % num_heads != 0)
    throw ConfigError("attend_prosody: d not divisible by num_heads");
  const Eigen::Index dh = d / num_heads;
  Var q = ad::matmul(query, w_query);
  Var k = ad::matmul(tokens, w_key);
  Var v = ad::matmul(tokens, w_value);
  std::vector<Var> heads;
  if (attention != nullptr) attention->resize(num_heads, tokens.rows());
  for (int head = 0; head < num_heads; ++head) {
    Var qh = ad::slice_cols(q, head * dh, dh);
    Var kh = ad::slice_cols(k, head * dh, dh);
    Var vh = ad::slice_cols(v, head * dh, dh);
    Var weights = ad::softmax_rows(
        ad::scale(ad::matmul_nt(qh, kh), 1.0 / std::sqrt(static_cast<double>(dh))));
    if (attention != nullptr) attention->row(head) = weights.value().row(0);
    heads.push_back(ad::matmul(weights, vh));
  }
  return heads.size() == 1 ? heads[0] : ad::concat_cols(heads);
}

Var prosody_representation(Graph &graph, const ModelConfig &config,
                           const Matrix &mel, Matrix *attention) {
  Var query = reference_query(graph, config, mel);
  Var w_query = graph.param("prosody.w_query");
  Var w_key = config.prosody.tie_qk_projection ? w_query : graph.param("prosody.w_key");
  return attend_prosody(query, graph.param("prosody.tokens"), w_query, w_key,
                        graph.param("prosody.w_value"), config.prosody.num_heads,
                        attention);
}

ReferenceQuery encode_reference(const ParameterSet &params,
                                const ModelConfig &config, const Matrix &mel) {
  Graph graph(params, false);
  Var state;
  Var query = reference_query(graph, config, mel, &state);
  ReferenceQuery out;
  out.gru_state = state.value().row(0).transpose();
  out.query = query.value().row(0).transpose();
  return out;
}

ProsodyRepresentation attend_prosody(const Vector &query, const ProsodySpace &space) {
  space.validate();
  if (query.size() != space.tokens.cols())
    throw ConfigError("attend_prosody: query has dimension " +
                      std::to_string(query.size()) + ", prosody space has d=" +
                      std::to_string(space.tokens.cols()));
  Tape tape;
  Var q = tape.constant(query.transpose());
  Var tokens = tape.constant(space.tokens);
  Var wq = tape.constant(space.w_query);
  Var wk = space.tie_qk_projection ? wq : tape.constant(space.w_key);
  Var wv = tape.constant(space.w_value);
  ProsodyRepresentation out;
  Var e = attend_prosody(q, tokens, wq, wk, wv, space.num_heads, &out.attention);
  out.e = e.value().row(0).transpose();
  return out;
}

}  // namespace comedic
