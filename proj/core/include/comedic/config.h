// core/include/comedic/config.h
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

// Model, loss and schedule configuration. Run configs are JSON objects:
// a "profile" name selects the defaults ("desk", "full" or "tiny") and any
// other key overrides them.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "comedic/audio.h"

namespace comedic {

enum class ClnSite {
  kEncoder,
  kDecoder,
  kDurationPredictor,
  kPitchPredictor,
  kEnergyPredictor,
};

std::string_view to_string(ClnSite site);
ClnSite cln_site_from_string(std::string_view name);

struct ReferenceEncoderConfig {
  /// One 3x3 stride-2 convolution per entry.
  std::vector<int> conv_channels{32, 32, 64, 64, 128, 128};
  int gru_hidden = 128;
};

struct ProsodyConfig {
  int num_tokens = 8;
  int token_dim = 256;
  int num_heads = 8;
  /// Reuse the query projection for the keys (literal K = P W^Q).
  bool tie_qk_projection = false;
};

struct ModelConfig {
  std::string profile = "desk";
  int symbol_count = 0;  // filled from the symbol table
  int hidden = 64;
  int encoder_blocks = 2;
  int decoder_blocks = 2;
  int attention_heads = 2;
  int ffn_filter = 128;
  int ffn_kernel = 3;
  int predictor_filter = 64;
  int predictor_kernel = 3;
  int mel_bins = 80;
  int pitch_bins = 32;
  int energy_bins = 32;
  double pitch_min = -3.0;
  double pitch_max = 3.0;
  double energy_min = -3.0;
  double energy_max = 3.0;
  std::set<ClnSite> cln_sites{ClnSite::kEncoder, ClnSite::kDurationPredictor,
                              ClnSite::kDecoder};
  bool use_prosody_encoder = true;
  bool use_speaker_embedding = false;
  /// Condition CLN on [E, speaker embedding] instead of E alone.
  bool cln_concat_speaker = false;
  int num_speakers = 0;  // filled from the corpus when speaker ids are used
  double layer_norm_eps = 1e-5;
  ReferenceEncoderConfig reference;
  ProsodyConfig prosody;

  void validate() const;
  bool has_cln(ClnSite site) const { return cln_sites.count(site) != 0; }
  /// Width of the vector every CLN adapter reads.
  int condition_dim() const;
  /// Minimum reference length: each stride-2 stage halves the frames.
  int min_reference_frames() const;
};

ModelConfig desk_model();
ModelConfig full_model();
/// hidden 8, 2+2 blocks, small prosody space; for gradient checks.
ModelConfig tiny_model();
ModelConfig model_for_profile(std::string_view profile);

struct LossWeights {
  double mel = 1.0;
  double duration = 1.0;
  double pitch = 1.0;
  double energy = 1.0;
};

struct LossConfig {
  /// Weight of the second half of the mel frames.
  double alpha = 2.0;
  LossWeights weights;
};

struct TrainSchedule {
  std::string profile = "desk";
  int pretrain_steps = 2000;
  int finetune_steps = 1000;
  int batch_size = 2;
  double learning_rate = 1e-3;  // Noam peak
  int warmup_steps = 200;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-9;
  double grad_clip = 1.0;
  std::uint64_t seed = 1234;
  int validation_interval = 100;
  double finetune_lr_scale = 0.1;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  /// Reference clips kept per speaker for inference.
  int reference_bank_size = 4;
};

struct RunConfig {
  ModelConfig model;
  LossConfig loss;
  TrainSchedule schedule;
  FeatureConfig features;
  bool use_special_tokens = true;
};

RunConfig default_run_config(std::string_view profile);
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string &path);
std::string run_config_to_json(const RunConfig &config);

/// Hash of the architecture-defining fields (excludes symbol_count and
/// num_speakers, which grow during finetuning).
std::uint64_t architecture_fingerprint(const ModelConfig &config);

}  // namespace comedic
