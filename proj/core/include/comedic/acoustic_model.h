// core/include/comedic/acoustic_model.h
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

// Non-autoregressive acoustic model: FFT-block phoneme encoder, variance
// adaptor, length regulator and FFT-block mel decoder. Normalisation sites listed in ModelConfig::cln_sites are
// conditioned on the prosody representation.

#include <cstdint>
#include <span>
#include <vector>

#include "comedic/config.h"
#include "comedic/parameters.h"

namespace comedic {

enum class Mode { kTrain, kInfer };

struct ModelInput {
  std::vector<int> ids;
  /// Valid prefix of `ids`; the rest is padding. Negative means all.
  int length = -1;
  Matrix reference_mel;  // frames x mel_bins
  int speaker_index = 0;
  // Teacher-forcing targets, required in Mode::kTrain.
  std::vector<int> target_durations;
  std::vector<double> target_pitch;
  std::vector<double> target_energy;

  int valid_length() const {
    return length < 0 ? static_cast<int>(ids.size()) : length;
  }
};

struct AcousticOutput {
  Matrix mel;                         // frames x mel_bins
  std::vector<double> duration_raw;   // linear-domain predictions
  std::vector<int> durations_used;    // what the length regulator expanded
  std::vector<double> pitch;
  std::vector<double> energy;
  RowVector condition;                // empty without a prosody encoder
};

/// Graph handles of one forward pass, for loss construction.
struct ForwardVars {
  Var mel;
  Var duration;  // L x 1
  Var pitch;     // L x 1
  Var energy;    // L x 1
  Var condition;
  std::vector<int> durations_used;
};

struct VarianceVars {
  Var pitch;
  Var energy;
  Var hidden;  // input plus the quantised pitch/energy embeddings
};

/// round-half-up(max(d, 0)) with a one-frame minimum per phoneme.
std::vector<int> round_durations(std::span<const double> raw);

/// Repeats row i of `hidden` durations[i] times.
Matrix length_regulate(const Matrix &hidden, std::span<const int> durations);
Var length_regulate(Var hidden, std::span<const int> durations);

/// Uniform bucket index of v over [lo, hi) with clamping.
int bucketize(double v, double lo, double hi, int bins);

Matrix positional_encoding(Eigen::Index steps, Eigen::Index width);

class AcousticModel {
 public:
  AcousticModel(ModelConfig config, ParameterSet params);

  /// Fresh parameters. CLN adapters are calibrated: gamma starts
  /// near 1 for typical prosody representations.
  static AcousticModel initialize(const ModelConfig &config, std::uint64_t seed);
  static ParameterSet init_parameters(const ModelConfig &config, std::uint64_t seed);

  const ModelConfig &config() const { return config_; }
  const ParameterSet &parameters() const { return params_; }
  ParameterSet &parameters() { return params_; }

  // Graph-level stages.
  Var condition(Graph &graph, const Matrix &reference_mel, int speaker_index) const;
  Var encode_phonemes(Graph &graph, std::span<const int> ids, int length,
                      Var condition) const;
  Var predict_duration(Graph &graph, Var hidden, Var condition) const;
  VarianceVars predict_pitch_energy(Graph &graph, Var hidden, Var condition,
                                    const std::vector<double> *pitch_target,
                                    const std::vector<double> *energy_target) const;
  Var decode_mel(Graph &graph, Var frames, Var condition) const;
  ForwardVars forward(Graph &graph, const ModelInput &input, Mode mode) const;

  // Evaluation wrappers (no gradient tracking).
  AcousticOutput run(const ModelInput &input, Mode mode) const;
  std::vector<AcousticOutput> forward(const std::vector<ModelInput> &batch,
                                      Mode mode) const;
  RowVector condition_vector(const Matrix &reference_mel, int speaker_index = 0) const;
  Matrix encode_phonemes(std::span<const int> ids, const RowVector &condition) const;
  std::vector<double> predict_duration(const Matrix &hidden,
                                       const RowVector &condition) const;
  Matrix decode_mel(const Matrix &frames, const RowVector &condition) const;

 private:
  Var fft_block(Graph &graph, const std::string &prefix, bool conditioned,
                Var condition, Var x, const Matrix *key_mask,
                const Matrix *row_mask) const;
  Var conv1d(Graph &graph, const std::string &prefix, Var x, int kernel) const;
  Var variance_predictor(Graph &graph, const std::string &prefix,
                         bool conditioned, Var condition, Var x) const;
  Var bind_condition(Graph &graph, const RowVector &condition) const;

  ModelConfig config_;
  ParameterSet params_;
};

}  // namespace comedic
