// core/src/config.cc
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

#include "comedic/config.h"

#include <nlohmann/json.hpp>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {

using nlohmann::json;

std::string_view to_string(ClnSite site) {
  switch (site) {
    case ClnSite::kEncoder:
      return "encoder";
    case ClnSite::kDecoder:
      return "decoder";
    case ClnSite::kDurationPredictor:
      return "duration_predictor";
    case ClnSite::kPitchPredictor:
      return "pitch_predictor";
    case ClnSite::kEnergyPredictor:
      return "energy_predictor";
  }
  return "encoder";
}

ClnSite cln_site_from_string(std::string_view name) {
  for (ClnSite s : {ClnSite::kEncoder, ClnSite::kDecoder,
                    ClnSite::kDurationPredictor, ClnSite::kPitchPredictor,
                    ClnSite::kEnergyPredictor})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown CLN site '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char *name) {
    if (v <= 0) throw ConfigError(std::string("model config: ") + name + " must be positive");
  };
  positive(hidden, "hidden");
  positive(encoder_blocks, "encoder_blocks");
  positive(decoder_blocks, "decoder_blocks");
  positive(attention_heads, "attention_heads");
  positive(ffn_filter, "ffn_filter");
  positive(ffn_kernel, "ffn_kernel");
  positive(predictor_filter, "predictor_filter");
  positive(predictor_kernel, "predictor_kernel");
  positive(mel_bins, "mel_bins");
  positive(pitch_bins, "pitch_bins");
  positive(energy_bins, "energy_bins");
  positive(reference.gru_hidden, "reference.gru_hidden");
  positive(prosody.num_tokens, "prosody.num_tokens");
  positive(prosody.token_dim, "prosody.token_dim");
  positive(prosody.num_heads, "prosody.num_heads");
  if (symbol_count < 0) throw ConfigError("model config: negative symbol_count");
  if (hidden % attention_heads != 0)
    throw ConfigError("model config: hidden must be divisible by attention_heads");
  if (prosody.token_dim % prosody.num_heads != 0)
    throw ConfigError("prosody config: token_dim must be divisible by num_heads");
  if (ffn_kernel % 2 == 0 || predictor_kernel % 2 == 0)
    throw ConfigError("model config: convolution kernels must be odd");
  if (reference.conv_channels.empty())
    throw ConfigError("reference encoder: needs at least one convolution");
  for (int c : reference.conv_channels) positive(c, "reference.conv_channels");
  if (!(pitch_max > pitch_min) || !(energy_max > energy_min))
    throw ConfigError("model config: empty pitch/energy quantisation range");
  if (!use_prosody_encoder && !cln_sites.empty())
    throw ConfigError("model config: CLN sites need the prosody encoder");
  if (cln_concat_speaker && !use_speaker_embedding)
    throw ConfigError("model config: cln_concat_speaker needs use_speaker_embedding");
  if (!(layer_norm_eps > 0.0)) throw ConfigError("model config: layer_norm_eps must be positive");
}

int ModelConfig::condition_dim() const {
  return prosody.token_dim + (cln_concat_speaker ? hidden : 0);
}

int ModelConfig::min_reference_frames() const {
  return 1 << reference.conv_channels.size();
}

ModelConfig desk_model() { return ModelConfig{}; }

ModelConfig full_model() {
  ModelConfig m;
  m.profile = "full";
  m.hidden = 256;
  m.encoder_blocks = 4;
  m.decoder_blocks = 4;
  m.attention_heads = 2;
  m.ffn_filter = 1024;
  m.ffn_kernel = 9;
  m.predictor_filter = 256;
  m.predictor_kernel = 3;
  m.pitch_bins = 256;
  m.energy_bins = 256;
  return m;
}

ModelConfig tiny_model() {
  ModelConfig m;
  m.profile = "tiny";
  m.hidden = 8;
  m.encoder_blocks = 2;
  m.decoder_blocks = 2;
  m.attention_heads = 2;
  m.ffn_filter = 8;
  m.ffn_kernel = 3;
  m.predictor_filter = 6;
  m.predictor_kernel = 3;
  m.mel_bins = 6;
  m.pitch_bins = 4;
  m.energy_bins = 4;
  m.reference.conv_channels = {2, 2, 2, 2, 2, 2};
  m.reference.gru_hidden = 4;
  m.prosody.num_tokens = 3;
  m.prosody.token_dim = 4;
  m.prosody.num_heads = 2;
  return m;
}

ModelConfig model_for_profile(std::string_view profile) {
  if (profile == "desk") return desk_model();
  if (profile == "full") return full_model();
  if (profile == "tiny") return tiny_model();
  throw ConfigError("unknown profile '" + std::string(profile) + "'");
}

RunConfig default_run_config(std::string_view profile) {
  RunConfig rc;
  rc.model = model_for_profile(profile);
  rc.schedule.profile = std::string(profile);
  rc.features.mel_bins = rc.model.mel_bins;
  if (profile == "full") {
    rc.schedule.pretrain_steps = 300000;
    rc.schedule.finetune_steps = 100000;
    rc.schedule.batch_size = 16;
    rc.schedule.warmup_steps = 4000;
    rc.schedule.learning_rate = 1e-3;
    rc.schedule.validation_interval = 1000;
  }
  return rc;
}

namespace {

template <typename T>
void take(const json &obj, const char *key, T &dst, std::set<std::string> &seen) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  seen.insert(key);
  try {
    dst = it->get<T>();
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json &obj, const std::set<std::string> &seen,
                    const std::string &where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!seen.count(it.key()))
      throw ConfigError("unknown config key '" + where + it.key() + "'");
}

void read_model(const json &j, ModelConfig &m) {
  if (!j.is_object()) throw ConfigError("config 'model' must be an object");
  std::set<std::string> seen;
  take(j, "hidden", m.hidden, seen);
  take(j, "encoder_blocks", m.encoder_blocks, seen);
  take(j, "decoder_blocks", m.decoder_blocks, seen);
  take(j, "attention_heads", m.attention_heads, seen);
  take(j, "ffn_filter", m.ffn_filter, seen);
  take(j, "ffn_kernel", m.ffn_kernel, seen);
  take(j, "predictor_filter", m.predictor_filter, seen);
  take(j, "predictor_kernel", m.predictor_kernel, seen);
  take(j, "mel_bins", m.mel_bins, seen);
  take(j, "pitch_bins", m.pitch_bins, seen);
  take(j, "energy_bins", m.energy_bins, seen);
  take(j, "pitch_min", m.pitch_min, seen);
  take(j, "pitch_max", m.pitch_max, seen);
  take(j, "energy_min", m.energy_min, seen);
  take(j, "energy_max", m.energy_max, seen);
  take(j, "use_prosody_encoder", m.use_prosody_encoder, seen);
  take(j, "use_speaker_embedding", m.use_speaker_embedding, seen);
  take(j, "cln_concat_speaker", m.cln_concat_speaker, seen);
  take(j, "layer_norm_eps", m.layer_norm_eps, seen);
  // Derived from the data, but present in checkpoint dumps.
  take(j, "symbol_count", m.symbol_count, seen);
  take(j, "num_speakers", m.num_speakers, seen);
  if (auto it = j.find("cln_sites"); it != j.end()) {
    seen.insert("cln_sites");
    m.cln_sites.clear();
    for (const auto &s : *it) m.cln_sites.insert(cln_site_from_string(s.get<std::string>()));
  }
  if (auto it = j.find("reference"); it != j.end()) {
    seen.insert("reference");
    std::set<std::string> rs;
    take(*it, "conv_channels", m.reference.conv_channels, rs);
    take(*it, "gru_hidden", m.reference.gru_hidden, rs);
    reject_unknown(*it, rs, "model.reference.");
  }
  if (auto it = j.find("prosody"); it != j.end()) {
    seen.insert("prosody");
    std::set<std::string> ps;
    take(*it, "num_tokens", m.prosody.num_tokens, ps);
    take(*it, "token_dim", m.prosody.token_dim, ps);
    take(*it, "num_heads", m.prosody.num_heads, ps);
    take(*it, "tie_qk_projection", m.prosody.tie_qk_projection, ps);
    reject_unknown(*it, ps, "model.prosody.");
  }
  reject_unknown(j, seen, "model.");
}

json model_json(const ModelConfig &m, bool with_counts) {
  json sites = json::array();
  for (ClnSite s : m.cln_sites) sites.push_back(std::string(to_string(s)));
  json j{{"hidden", m.hidden},
         {"encoder_blocks", m.encoder_blocks},
         {"decoder_blocks", m.decoder_blocks},
         {"attention_heads", m.attention_heads},
         {"ffn_filter", m.ffn_filter},
         {"ffn_kernel", m.ffn_kernel},
         {"predictor_filter", m.predictor_filter},
         {"predictor_kernel", m.predictor_kernel},
         {"mel_bins", m.mel_bins},
         {"pitch_bins", m.pitch_bins},
         {"energy_bins", m.energy_bins},
         {"pitch_min", m.pitch_min},
         {"pitch_max", m.pitch_max},
         {"energy_min", m.energy_min},
         {"energy_max", m.energy_max},
         {"cln_sites", sites},
         {"use_prosody_encoder", m.use_prosody_encoder},
         {"use_speaker_embedding", m.use_speaker_embedding},
         {"cln_concat_speaker", m.cln_concat_speaker},
         {"layer_norm_eps", m.layer_norm_eps},
         {"reference",
          {{"conv_channels", m.reference.conv_channels},
           {"gru_hidden", m.reference.gru_hidden}}},
         {"prosody",
          {{"num_tokens", m.prosody.num_tokens},
           {"token_dim", m.prosody.token_dim},
           {"num_heads", m.prosody.num_heads},
           {"tie_qk_projection", m.prosody.tie_qk_projection}}}};
  if (with_counts) {
    j["symbol_count"] = m.symbol_count;
    j["num_speakers"] = m.num_speakers;
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  std::string profile = j.value("profile", std::string("desk"));
  RunConfig rc = default_run_config(profile);
  std::set<std::string> seen{"profile"};
  take(j, "use_special_tokens", rc.use_special_tokens, seen);
  if (auto it = j.find("model"); it != j.end()) {
    seen.insert("model");
    read_model(*it, rc.model);
  }
  if (auto it = j.find("loss"); it != j.end()) {
    seen.insert("loss");
    std::set<std::string> ls;
    take(*it, "alpha", rc.loss.alpha, ls);
    take(*it, "mel_weight", rc.loss.weights.mel, ls);
    take(*it, "duration_weight", rc.loss.weights.duration, ls);
    take(*it, "pitch_weight", rc.loss.weights.pitch, ls);
    take(*it, "energy_weight", rc.loss.weights.energy, ls);
    reject_unknown(*it, ls, "loss.");
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    seen.insert("schedule");
    std::set<std::string> ss;
    auto &s = rc.schedule;
    take(*it, "pretrain_steps", s.pretrain_steps, ss);
    take(*it, "finetune_steps", s.finetune_steps, ss);
    take(*it, "batch_size", s.batch_size, ss);
    take(*it, "learning_rate", s.learning_rate, ss);
    take(*it, "warmup_steps", s.warmup_steps, ss);
    take(*it, "beta1", s.beta1, ss);
    take(*it, "beta2", s.beta2, ss);
    take(*it, "adam_eps", s.adam_eps, ss);
    take(*it, "grad_clip", s.grad_clip, ss);
    take(*it, "seed", s.seed, ss);
    take(*it, "validation_interval", s.validation_interval, ss);
    take(*it, "finetune_lr_scale", s.finetune_lr_scale, ss);
    take(*it, "val_fraction", s.val_fraction, ss);
    take(*it, "test_fraction", s.test_fraction, ss);
    take(*it, "reference_bank_size", s.reference_bank_size, ss);
    reject_unknown(*it, ss, "schedule.");
  }
  if (auto it = j.find("features"); it != j.end()) {
    seen.insert("features");
    std::set<std::string> fs;
    auto &f = rc.features;
    take(*it, "sample_rate", f.sample_rate, fs);
    take(*it, "n_fft", f.n_fft, fs);
    take(*it, "win_length", f.win_length, fs);
    take(*it, "hop_length", f.hop_length, fs);
    take(*it, "fmin", f.fmin, fs);
    take(*it, "fmax", f.fmax, fs);
    take(*it, "log_floor", f.log_floor, fs);
    take(*it, "pitch_min_hz", f.pitch_min_hz, fs);
    take(*it, "pitch_max_hz", f.pitch_max_hz, fs);
    take(*it, "voicing_threshold", f.voicing_threshold, fs);
    take(*it, "silence_rms", f.silence_rms, fs);
    reject_unknown(*it, fs, "features.");
  }
  reject_unknown(j, seen, "");
  rc.model.profile = profile;
  rc.features.mel_bins = rc.model.mel_bins;
  rc.model.validate();
  const auto &s = rc.schedule;
  if (s.pretrain_steps < 0 || s.finetune_steps < 0)
    throw ConfigError("schedule: step counts must be non-negative");
  if (s.batch_size <= 0) throw ConfigError("schedule: batch_size must be positive");
  if (!(s.learning_rate > 0.0)) throw ConfigError("schedule: learning_rate must be positive");
  if (s.val_fraction < 0 || s.test_fraction < 0 || s.val_fraction + s.test_fraction >= 1.0)
    throw ConfigError("schedule: split fractions must be non-negative and sum below 1");
  if (rc.loss.alpha < 0.0) throw ConfigError("loss: alpha must be non-negative");
  return rc;
}

RunConfig load_run_config(const std::string &path) {
  return parse_run_config(read_file(path));
}

std::string run_config_to_json(const RunConfig &rc) {
  const auto &s = rc.schedule;
  const auto &f = rc.features;
  json j{{"profile", rc.model.profile},
         {"use_special_tokens", rc.use_special_tokens},
         {"model", model_json(rc.model, true)},
         {"loss",
          {{"alpha", rc.loss.alpha},
           {"mel_weight", rc.loss.weights.mel},
           {"duration_weight", rc.loss.weights.duration},
           {"pitch_weight", rc.loss.weights.pitch},
           {"energy_weight", rc.loss.weights.energy}}},
         {"schedule",
          {{"pretrain_steps", s.pretrain_steps},
           {"finetune_steps", s.finetune_steps},
           {"batch_size", s.batch_size},
           {"learning_rate", s.learning_rate},
           {"warmup_steps", s.warmup_steps},
           {"beta1", s.beta1},
           {"beta2", s.beta2},
           {"adam_eps", s.adam_eps},
           {"grad_clip", s.grad_clip},
           {"seed", s.seed},
           {"validation_interval", s.validation_interval},
           {"finetune_lr_scale", s.finetune_lr_scale},
           {"val_fraction", s.val_fraction},
           {"test_fraction", s.test_fraction},
           {"reference_bank_size", s.reference_bank_size}}},
         {"features",
          {{"sample_rate", f.sample_rate},
           {"n_fft", f.n_fft},
           {"win_length", f.win_length},
           {"hop_length", f.hop_length},
           {"fmin", f.fmin},
           {"fmax", f.fmax},
           {"log_floor", f.log_floor},
           {"pitch_min_hz", f.pitch_min_hz},
           {"pitch_max_hz", f.pitch_max_hz},
           {"voicing_threshold", f.voicing_threshold},
           {"silence_rms", f.silence_rms}}}};
  return j.dump(2);
}

std::uint64_t architecture_fingerprint(const ModelConfig &config) {
  json j = model_json(config, false);
  j["profile"] = config.profile;
  return fnv1a64(j.dump());
}

}  // namespace comedic
