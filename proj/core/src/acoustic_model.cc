// core/src/acoustic_model.cc
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

#include "comedic/acoustic_model.h"

#include <cmath>
#include <string>

#include "comedic/conditioning.h"
#include "comedic/error.h"
#include "comedic/prosody_encoder.h"

namespace comedic {
namespace {

constexpr double kMaskedLogit = -1e9;
constexpr double kEmbeddingStd = 0.3;

std::string block_prefix(const char *stack, int i) {
  return std::string(stack) + ".block" + std::to_string(i);
}

void add_linear(ParameterSet &params, const std::string &prefix, int in, int out,
                Rng &rng) {
  params.add(prefix + ".weight", xavier_uniform(in, out, rng));
  params.add(prefix + ".bias", Matrix::Zero(1, out));
}

void add_fft_block(ParameterSet &params, const std::string &prefix,
                   const ModelConfig &cfg, bool conditioned, Rng &rng) {
  const int h = cfg.hidden;
  for (const char *w : {"q", "k", "v", "o"}) {
    params.add(prefix + ".attn.w" + w, xavier_uniform(h, h, rng));
    params.add(prefix + ".attn.b" + w, Matrix::Zero(1, h));
  }
  add_linear(params, prefix + ".ffn.conv1", cfg.ffn_kernel * h, cfg.ffn_filter, rng);
  add_linear(params, prefix + ".ffn.conv2", cfg.ffn_filter, h, rng);
  if (conditioned) {
    add_cln_adapter(params, prefix + ".ln1", cfg.condition_dim(), h, rng);
    add_cln_adapter(params, prefix + ".ln2", cfg.condition_dim(), h, rng);
  }
}

void add_variance_predictor(ParameterSet &params, const std::string &prefix,
                            const ModelConfig &cfg, bool conditioned, Rng &rng) {
  const int f = cfg.predictor_filter;
  add_linear(params, prefix + ".conv0", cfg.predictor_kernel * cfg.hidden, f, rng);
  add_linear(params, prefix + ".conv1", cfg.predictor_kernel * f, f, rng);
  add_linear(params, prefix + ".out", f, 1, rng);
  if (conditioned) {
    add_cln_adapter(params, prefix + ".ln0", cfg.condition_dim(), f, rng);
    add_cln_adapter(params, prefix + ".ln1", cfg.condition_dim(), f, rng);
  }
}

Var mask_rows(Graph &graph, Var x, Eigen::Index valid) {
  if (valid >= x.rows()) return x;
  Matrix mask = Matrix::Zero(x.rows(), x.cols());
  mask.topRows(valid).setOnes();
  return ad::mul(x, graph.constant(std::move(mask)));
}

std::vector<int> expansion_index(std::span<const int> durations) {
  std::vector<int> index;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] < 0)
      throw InputError("length regulator: negative duration " +
                       std::to_string(durations[i]) + " at phoneme " + std::to_string(i));
    index.insert(index.end(), static_cast<std::size_t>(durations[i]), static_cast<int>(i));
  }
  return index;
}

std::vector<int> bucket_ids(std::span<const double> values, double lo, double hi, int bins) {
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(bucketize(v, lo, hi, bins));
  return out;
}

std::vector<double> column(const Var &v) {
  const Matrix &m = v.value();
  return std::vector<double>(m.data(), m.data() + m.rows());
}

}  // namespace

std::vector<int> round_durations(std::span<const double> raw) {
  std::vector<int> out;
  out.reserve(raw.size());
  for (double d : raw) {
    const double clamped = std::isfinite(d) ? std::max(d, 0.0) : 0.0;
    out.push_back(std::max(1, static_cast<int>(std::floor(clamped + 0.5))));
  }
  return out;
}

Matrix length_regulate(const Matrix &hidden, std::span<const int> durations) {
  Tape tape;
  return length_regulate(tape.constant(hidden), durations).value();
}

Var length_regulate(Var hidden, std::span<const int> durations) {
  if (static_cast<Eigen::Index>(durations.size()) != hidden.rows())
    throw InputError("length regulator: " + std::to_string(durations.size()) +
                     " durations for " + std::to_string(hidden.rows()) + " states");
  const auto index = expansion_index(durations);
  return ad::gather_rows(hidden, index);
}

int bucketize(double v, double lo, double hi, int bins) {
  if (!std::isfinite(v)) return 0;
  const double pos = (v - lo) / (hi - lo) * bins;
  const int b = static_cast<int>(std::floor(pos));
  return std::clamp(b, 0, bins - 1);
}

Matrix positional_encoding(Eigen::Index steps, Eigen::Index width) {
  Matrix pe(steps, width);
  for (Eigen::Index t = 0; t < steps; ++t)
    for (Eigen::Index i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -2.0 * static_cast<double>(i / 2) /
                                                static_cast<double>(width));
      pe(t, i) = (i % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
    }
  return pe;
}

// ---------------------------------------------------------------------------

AcousticModel::AcousticModel(ModelConfig config, ParameterSet params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
}

ParameterSet AcousticModel::init_parameters(const ModelConfig &cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.symbol_count <= 0) throw ConfigError("model config: symbol_count must be set");
  if (cfg.use_speaker_embedding && cfg.num_speakers <= 0)
    throw ConfigError("model config: speaker embedding needs num_speakers > 0");
  Rng rng(seed);
  ParameterSet params;
  if (cfg.use_prosody_encoder) init_prosody_parameters(params, cfg, rng);
  params.add("encoder.embedding", normal_matrix(cfg.symbol_count, cfg.hidden, kEmbeddingStd, rng));
  for (int i = 0; i < cfg.encoder_blocks; ++i)
    add_fft_block(params, block_prefix("encoder", i), cfg, cfg.has_cln(ClnSite::kEncoder), rng);
  if (cfg.use_speaker_embedding)
    params.add("speaker_embedding", normal_matrix(cfg.num_speakers, cfg.hidden, kEmbeddingStd, rng));
  add_variance_predictor(params, "variance.duration", cfg,
                         cfg.has_cln(ClnSite::kDurationPredictor), rng);
  add_variance_predictor(params, "variance.pitch", cfg, cfg.has_cln(ClnSite::kPitchPredictor), rng);
  add_variance_predictor(params, "variance.energy", cfg,
                         cfg.has_cln(ClnSite::kEnergyPredictor), rng);
  params.add("variance.pitch_embedding", normal_matrix(cfg.pitch_bins, cfg.hidden, kEmbeddingStd, rng));
  params.add("variance.energy_embedding",
             normal_matrix(cfg.energy_bins, cfg.hidden, kEmbeddingStd, rng));
  for (int i = 0; i < cfg.decoder_blocks; ++i)
    add_fft_block(params, block_prefix("decoder", i), cfg, cfg.has_cln(ClnSite::kDecoder), rng);
  add_linear(params, "mel_linear", cfg.hidden, cfg.mel_bins, rng);

  if (cfg.use_prosody_encoder && !cfg.cln_sites.empty()) {
    // typical E: mean value row
    const Matrix values = params.at("prosody.tokens") * params.at("prosody.w_value");
    RowVector typical = RowVector::Zero(cfg.condition_dim());
    typical.head(values.cols()) = values.colwise().mean();
    calibrate_cln_adapters(params, typical);
  }
  return params;
}

AcousticModel AcousticModel::initialize(const ModelConfig &config, std::uint64_t seed) {
  return AcousticModel(config, init_parameters(config, seed));
}

Var AcousticModel::condition(Graph &graph, const Matrix &reference_mel,
                             int speaker_index) const {
  if (!config_.use_prosody_encoder) return Var{};
  Var e = prosody_representation(graph, config_, reference_mel);
  if (!config_.cln_concat_speaker) return e;
  if (speaker_index < 0 || speaker_index >= config_.num_speakers)
    throw InputError("speaker index " + std::to_string(speaker_index) + " out of range");
  Var spk = ad::slice_rows(graph.param("speaker_embedding"), speaker_index, 1);
  const Var parts[] = {e, spk};
  return ad::concat_cols(parts);
}

Var AcousticModel::conv1d(Graph &graph, const std::string &prefix, Var x, int kernel) const {
  Var cols = kernel == 1 ? x : ad::im2col_1d(x, kernel);
  return ad::add_row(ad::matmul(cols, graph.param(prefix + ".weight")),
                     graph.param(prefix + ".bias"));
}

Var AcousticModel::fft_block(Graph &graph, const std::string &prefix, bool conditioned,
                             Var condition, Var x, const Matrix *key_mask,
                             const Matrix *row_mask) const {
  const int heads = config_.attention_heads;
  const Eigen::Index dh = config_.hidden / heads;
  const Eigen::Index valid = row_mask != nullptr ? static_cast<Eigen::Index>(row_mask->sum()) : x.rows();
  auto proj = [&](const char *w) {
    return ad::add_row(ad::matmul(x, graph.param(prefix + ".attn.w" + w)),
                       graph.param(prefix + ".attn.b" + w));
  };
  Var q = proj("q"), k = proj("k"), v = proj("v");
  std::vector<Var> ctx;
  for (int h = 0; h < heads; ++h) {
    Var scores = ad::scale(ad::matmul_nt(ad::slice_cols(q, h * dh, dh), ad::slice_cols(k, h * dh, dh)),
                           1.0 / std::sqrt(static_cast<double>(dh)));
    Var weights = ad::softmax_rows(scores, key_mask);
    ctx.push_back(ad::matmul(weights, ad::slice_cols(v, h * dh, dh)));
  }
  Var att = ctx.size() == 1 ? ctx[0] : ad::concat_cols(ctx);
  att = ad::add_row(ad::matmul(att, graph.param(prefix + ".attn.wo")),
                    graph.param(prefix + ".attn.bo"));
  const double eps = config_.layer_norm_eps;
  x = normalize_site(graph, prefix + ".ln1", conditioned, condition, ad::add(x, att), eps);
  x = mask_rows(graph, x, valid);
  Var y = ad::relu(conv1d(graph, prefix + ".ffn.conv1", x, config_.ffn_kernel));
  y = mask_rows(graph, y, valid);
  y = conv1d(graph, prefix + ".ffn.conv2", y, 1);
  x = normalize_site(graph, prefix + ".ln2", conditioned, condition, ad::add(x, y), eps);
  return mask_rows(graph, x, valid);
}

Var AcousticModel::encode_phonemes(Graph &graph, std::span<const int> ids, int length,
                                   Var condition) const {
  const int padded = static_cast<int>(ids.size());
  if (padded == 0) throw InputError("encode_phonemes: empty phoneme sequence");
  if (length < 0) length = padded;
  if (length == 0 || length > padded)
    throw InputError("encode_phonemes: valid length " + std::to_string(length) +
                     " outside [1, " + std::to_string(padded) + "]");
  for (int i = 0; i < padded; ++i)
    if (ids[static_cast<std::size_t>(i)] < 0 || ids[static_cast<std::size_t>(i)] >= config_.symbol_count)
      throw InputError("symbol id " + std::to_string(ids[static_cast<std::size_t>(i)]) +
                       " at position " + std::to_string(i) + " outside the symbol table (size " +
                       std::to_string(config_.symbol_count) + ")");
  Var x = ad::gather_rows(graph.param("encoder.embedding"), ids);
  x = ad::add(x, graph.constant(positional_encoding(padded, config_.hidden)));
  Matrix key_mask, row_mask;
  const Matrix *key_mask_ptr = nullptr, *row_mask_ptr = nullptr;
  if (length < padded) {
    key_mask = Matrix::Zero(padded, padded);
    key_mask.rightCols(padded - length).setConstant(kMaskedLogit);
    row_mask = Matrix::Zero(padded, 1);
    row_mask.topRows(length).setOnes();
    key_mask_ptr = &key_mask;
    row_mask_ptr = &row_mask;
    x = mask_rows(graph, x, length);
  }
  const bool conditioned = config_.has_cln(ClnSite::kEncoder);
  for (int i = 0; i < config_.encoder_blocks; ++i)
    x = fft_block(graph, block_prefix("encoder", i), conditioned, condition, x, key_mask_ptr,
                  row_mask_ptr);
  if (length < padded) x = ad::slice_rows(x, 0, length);
  return x;
}

Var AcousticModel::variance_predictor(Graph &graph, const std::string &prefix, bool conditioned,
                                      Var condition, Var x) const {
  const double eps = config_.layer_norm_eps;
  const int k = config_.predictor_kernel;
  Var y = ad::relu(conv1d(graph, prefix + ".conv0", x, k));
  y = normalize_site(graph, prefix + ".ln0", conditioned, condition, y, eps);
  y = ad::relu(conv1d(graph, prefix + ".conv1", y, k));
  y = normalize_site(graph, prefix + ".ln1", conditioned, condition, y, eps);
  return ad::add_row(ad::matmul(y, graph.param(prefix + ".out.weight")),
                     graph.param(prefix + ".out.bias"));
}

Var AcousticModel::predict_duration(Graph &graph, Var hidden, Var condition) const {
  if (hidden.cols() != config_.hidden)
    throw InputError("predict_duration: hidden width mismatch");
  return variance_predictor(graph, "variance.duration",
                            config_.has_cln(ClnSite::kDurationPredictor), condition, hidden);
}

VarianceVars AcousticModel::predict_pitch_energy(Graph &graph, Var hidden, Var condition,
                                                 const std::vector<double> *pitch_target,
                                                 const std::vector<double> *energy_target) const {
  if (hidden.cols() != config_.hidden)
    throw InputError("predict_pitch_energy: hidden width mismatch");
  const auto rows = static_cast<std::size_t>(hidden.rows());
  VarianceVars out;
  out.pitch = variance_predictor(graph, "variance.pitch",
                                 config_.has_cln(ClnSite::kPitchPredictor), condition, hidden);
  std::vector<double> pitch_values = pitch_target ? *pitch_target : column(out.pitch);
  if (pitch_values.size() != rows) throw InputError("pitch target length mismatch");
  Var h = ad::add(hidden, ad::gather_rows(graph.param("variance.pitch_embedding"),
                                          bucket_ids(pitch_values, config_.pitch_min,
                                                     config_.pitch_max, config_.pitch_bins)));
  out.energy = variance_predictor(graph, "variance.energy",
                                  config_.has_cln(ClnSite::kEnergyPredictor), condition, h);
  std::vector<double> energy_values = energy_target ? *energy_target : column(out.energy);
  if (energy_values.size() != rows) throw InputError("energy target length mismatch");
  out.hidden = ad::add(h, ad::gather_rows(graph.param("variance.energy_embedding"),
                                          bucket_ids(energy_values, config_.energy_min,
                                                     config_.energy_max, config_.energy_bins)));
  return out;
}

Var AcousticModel::decode_mel(Graph &graph, Var frames, Var condition) const {
  if (frames.rows() == 0) throw InputError("decode_mel: no frames");
  if (frames.cols() != config_.hidden) throw InputError("decode_mel: frame width mismatch");
  Var x = ad::add(frames, graph.constant(positional_encoding(frames.rows(), config_.hidden)));
  const bool conditioned = config_.has_cln(ClnSite::kDecoder);
  for (int i = 0; i < config_.decoder_blocks; ++i)
    x = fft_block(graph, block_prefix("decoder", i), conditioned, condition, x, nullptr, nullptr);
  return ad::add_row(ad::matmul(x, graph.param("mel_linear.weight")),
                     graph.param("mel_linear.bias"));
}

ForwardVars AcousticModel::forward(Graph &graph, const ModelInput &input, Mode mode) const {
  const int length = input.valid_length();
  if (mode == Mode::kTrain) {
    const auto n = static_cast<std::size_t>(length);
    if (input.target_durations.size() != n || input.target_pitch.size() != n ||
        input.target_energy.size() != n)
      throw InputError("train mode needs duration, pitch and energy targets for all " +
                       std::to_string(length) + " phonemes");
  }
  if (config_.use_speaker_embedding &&
      (input.speaker_index < 0 || input.speaker_index >= config_.num_speakers))
    throw InputError("speaker index " + std::to_string(input.speaker_index) + " out of range");
  ForwardVars out;
  out.condition = condition(graph, input.reference_mel, input.speaker_index);
  Var hidden = encode_phonemes(graph, input.ids, length, out.condition);
  if (config_.use_speaker_embedding)
    hidden = ad::add_row(hidden, ad::slice_rows(graph.param("speaker_embedding"),
                                                input.speaker_index, 1));
  out.duration = predict_duration(graph, hidden, out.condition);
  const bool train = mode == Mode::kTrain;
  VarianceVars var = predict_pitch_energy(graph, hidden, out.condition,
                                          train ? &input.target_pitch : nullptr,
                                          train ? &input.target_energy : nullptr);
  out.pitch = var.pitch;
  out.energy = var.energy;
  out.durations_used = train ? input.target_durations : round_durations(column(out.duration));
  Var frames = length_regulate(var.hidden, out.durations_used);
  out.mel = decode_mel(graph, frames, out.condition);
  return out;
}

AcousticOutput AcousticModel::run(const ModelInput &input, Mode mode) const {
  Graph graph(params_, false);
  ForwardVars v = forward(graph, input, mode);
  AcousticOutput out;
  out.mel = v.mel.value();
  out.duration_raw = column(v.duration);
  out.durations_used = v.durations_used;
  out.pitch = column(v.pitch);
  out.energy = column(v.energy);
  if (v.condition.valid()) out.condition = v.condition.value().row(0);
  return out;
}

std::vector<AcousticOutput> AcousticModel::forward(const std::vector<ModelInput> &batch,
                                                   Mode mode) const {
  std::vector<AcousticOutput> out;
  out.reserve(batch.size());
  for (const ModelInput &item : batch) out.push_back(run(item, mode));
  return out;
}

Var AcousticModel::bind_condition(Graph &graph, const RowVector &condition) const {
  if (condition.size() == 0) return Var{};
  if (condition.size() != config_.condition_dim())
    throw ConfigError("condition has dimension " + std::to_string(condition.size()) +
                      ", model expects " + std::to_string(config_.condition_dim()));
  return graph.constant(Matrix(condition));
}

RowVector AcousticModel::condition_vector(const Matrix &reference_mel, int speaker_index) const {
  Graph graph(params_, false);
  Var c = condition(graph, reference_mel, speaker_index);
  return c.valid() ? RowVector(c.value().row(0)) : RowVector();
}

Matrix AcousticModel::encode_phonemes(std::span<const int> ids, const RowVector &condition) const {
  Graph graph(params_, false);
  return encode_phonemes(graph, ids, -1, bind_condition(graph, condition)).value();
}

std::vector<double> AcousticModel::predict_duration(const Matrix &hidden,
                                                    const RowVector &condition) const {
  Graph graph(params_, false);
  return column(predict_duration(graph, graph.constant(hidden), bind_condition(graph, condition)));
}

Matrix AcousticModel::decode_mel(const Matrix &frames, const RowVector &condition) const {
  Graph graph(params_, false);
  return decode_mel(graph, graph.constant(frames), bind_condition(graph, condition)).value();
}

}  // namespace comedic
