// core/src/trainer.cc
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

#include "comedic/trainer.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>

#include "comedic/error.h"
#include "comedic/optimizer.h"

namespace comedic {
namespace {

constexpr std::uint64_t kFinetuneSalt = 0x5eed'f17e'0000'0001ULL;

std::vector<ReferenceClip> reference_bank(const Dataset &data,
                                          const std::vector<std::size_t> &train, int per_speaker) {
  std::map<std::string, int> taken;
  std::vector<ReferenceClip> bank;
  for (std::size_t i : train) {
    const auto &ex = data.examples[i];
    if (taken[ex.speaker_id] >= per_speaker) continue;
    ++taken[ex.speaker_id];
    bank.push_back({ex.utterance_id, ex.speaker_id, ex.mel});
  }
  return bank;
}

void check_references(const Dataset &data, const ModelConfig &cfg) {
  if (!cfg.use_prosody_encoder) return;
  for (const auto &ex : data.examples)
    if (ex.mel.rows() < cfg.min_reference_frames())
      throw InputError(ex.utterance_id + ": " + std::to_string(ex.mel.rows()) +
                       " frames is shorter than the reference encoder minimum of " +
                       std::to_string(cfg.min_reference_frames()));
}

class Loop {
 public:
  Loop(const Dataset &data, const RunConfig &config, const TrainOptions &options,
       TrainResult &result)
      : data_(data), config_(config), options_(options), result_(result),
        arch_(config.model, ParameterSet{}) {
    if (!options_.log_path.empty()) {
      log_.open(options_.log_path, std::ios::trunc);
      if (!log_) throw IoError("cannot open loss log " + options_.log_path.string());
    }
  }

  void run(const std::string &stage, int steps, double peak_lr, std::uint64_t seed,
           ParameterSet &params, Adam &adam) {
    const auto &s = config_.schedule;
    const auto &train = result_.split.train;
    if (steps > 0 && train.empty()) throw InputError("training split is empty");
    for (int step = 1; step <= steps; ++step) {
      StepRecord rec;
      rec.stage = stage;
      rec.step = step;
      rec.learning_rate = noam_rate(step, peak_lr, s.warmup_steps);
      ParameterSet grads;
      try {
        const auto batch = batch_indices(train, s.batch_size, seed, step);
        Graph graph(params, true);
        Var total;
        for (std::size_t i : batch) {
          const auto &ex = data_.examples[i];
          ForwardVars fv = arch_.forward(graph, model_input(ex), Mode::kTrain);
          LossBreakdown b;
          Var l = total_loss(graph, fv, loss_targets(ex), config_.loss, &b);
          total = total.valid() ? ad::add(total, l) : l;
          rec.loss += b;
        }
        const double inv = 1.0 / static_cast<double>(batch.size());
        rec.loss = rec.loss.scaled(inv);
        graph.backward(ad::scale(total, inv));
        grads = graph.gradients();
        for (const auto &[name, g] : grads)
          if (!g.allFinite()) throw TrainingError("non-finite gradient for " + name);
      } catch (const TrainingError &e) {
        result_.aborted = true;
        result_.abort_reason = stage + " step " + std::to_string(step) + ": " + e.what();
        return;
      }
      rec.grad_norm = clip_gradients(grads, s.grad_clip);
      adam.step(params, grads, rec.learning_rate);
      completed_ = step;
      if (!emit(rec)) return;
      if (s.validation_interval > 0 && step % s.validation_interval == 0 &&
          !result_.split.validation.empty()) {
        StepRecord val;
        val.stage = stage;
        val.step = step;
        val.validation = true;
        val.learning_rate = rec.learning_rate;
        val.loss = evaluate_loss(AcousticModel(config_.model, params), data_,
                                 result_.split.validation, config_.loss);
        if (!emit(val)) return;
      }
    }
  }

  int completed() const { return completed_; }

 private:
  bool emit(const StepRecord &rec) {
    result_.log.push_back(rec);
    if (log_.is_open()) log_ << format_log_record(rec) << '\n' << std::flush;
    return !options_.on_record || options_.on_record(rec);
  }

  const Dataset &data_;
  const RunConfig &config_;
  const TrainOptions &options_;
  TrainResult &result_;
  AcousticModel arch_;
  std::ofstream log_;
  int completed_ = 0;
};

void finish(Checkpoint &ck, const ParameterSet &params, const Adam &adam, int step,
            const std::string &stage) {
  ck.params = params;
  ck.adam_m = adam.first_moment();
  ck.adam_v = adam.second_moment();
  ck.adam_steps = adam.steps();
  ck.step = step;
  ck.stage = stage;
}

}  // namespace

std::string format_log_record(const StepRecord &r) {
  nlohmann::json j{{"stage", r.stage},
                   {"step", r.step},
                   {"kind", r.validation ? "validation" : "train"},
                   {"lr", r.learning_rate},
                   {"grad_norm", r.grad_norm},
                   {"mel", r.loss.mel_loss},
                   {"mel_l1", r.loss.mel_l1},
                   {"duration", r.loss.duration_loss},
                   {"pitch", r.loss.pitch_loss},
                   {"energy", r.loss.energy_loss},
                   {"alpha", r.loss.alpha},
                   {"total", r.loss.total}};
  return j.dump();
}

ModelInput model_input(const TrainingExample &ex) {
  ModelInput in;
  in.ids = ex.ids;
  in.reference_mel = ex.mel;
  in.speaker_index = ex.speaker_index;
  in.target_durations = ex.durations;
  in.target_pitch = ex.pitch;
  in.target_energy = ex.energy;
  return in;
}

LossTargets loss_targets(const TrainingExample &ex) {
  LossTargets t;
  t.mel = ex.mel;
  t.durations.assign(ex.durations.begin(), ex.durations.end());
  t.pitch = ex.pitch;
  t.energy = ex.energy;
  return t;
}

LossBreakdown evaluate_loss(const AcousticModel &model, const Dataset &data,
                            const std::vector<std::size_t> &indices, const LossConfig &loss) {
  if (indices.empty()) throw InputError("evaluate_loss: no examples");
  LossBreakdown sum;
  for (std::size_t i : indices) {
    const auto &ex = data.examples.at(i);
    sum += total_loss(model.run(model_input(ex), Mode::kTrain), loss_targets(ex), loss);
  }
  return sum.scaled(1.0 / static_cast<double>(indices.size()));
}

Checkpoint initial_checkpoint(const Dataset &data, const RunConfig &config) {
  Checkpoint ck;
  ck.config = config;
  ck.config.model.symbol_count = static_cast<int>(data.symbols.size());
  ck.config.model.num_speakers = static_cast<int>(data.speakers.size());
  ck.config.features.mel_bins = ck.config.model.mel_bins;
  ck.symbols = data.symbols;
  ck.registry = data.registry;
  ck.speakers = data.speakers;
  ck.normalizer = data.normalizer;
  ck.params = AcousticModel::init_parameters(ck.config.model, config.schedule.seed);
  double total = 0.0;
  std::size_t count = 0;
  for (const auto &ex : data.examples)
    for (int d : ex.durations) {
      total += d;
      ++count;
    }
  if (count > 0) ck.params.at("variance.duration.out.bias").setConstant(total / count);
  return ck;
}

TrainResult train(const Dataset &data, const RunConfig &config, const TrainOptions &options) {
  if (data.examples.empty()) throw InputError("train: empty dataset");
  if (data.examples.front().mel.cols() != config.model.mel_bins)
    throw ConfigError("train: dataset mel bins differ from the model's");
  check_references(data, config.model);
  TrainResult result;
  const auto &s = config.schedule;
  result.split = split_corpus(data.examples, s.val_fraction, s.test_fraction, s.seed);
  result.checkpoint = initial_checkpoint(data, config);
  result.checkpoint.references = reference_bank(data, result.split.train, s.reference_bank_size);
  ParameterSet params = result.checkpoint.params;
  Adam adam({s.beta1, s.beta2, s.adam_eps});
  Loop loop(data, result.checkpoint.config, options, result);
  loop.run("pretrain", s.pretrain_steps, s.learning_rate, s.seed, params, adam);
  finish(result.checkpoint, params, adam, loop.completed(), "pretrain");
  return result;
}

TrainResult finetune(const Checkpoint &base, const Dataset &data, std::optional<int> steps,
                     const TrainOptions &options) {
  if (data.examples.empty()) throw InputError("finetune: empty dataset");
  if (!data.symbols.is_superset_of(base.symbols))
    throw ConfigError("finetune: symbol table is not a superset of the base checkpoint's");
  RunConfig config = base.config;
  config.use_special_tokens = !data.registry.empty() || base.config.use_special_tokens;
  check_references(data, config.model);
  TrainResult result;
  const auto &s = config.schedule;
  result.split = split_corpus(data.examples, s.val_fraction, s.test_fraction, s.seed);

  Checkpoint &ck = result.checkpoint;
  ck = initial_checkpoint(data, config);
  config = ck.config;
  ck.references = reference_bank(data, result.split.train, s.reference_bank_size);
  const ParameterSet fresh = ck.params;
  for (auto &[name, value] : ck.params) {
    if (!base.params.contains(name)) continue;
    const Matrix &old = base.params.at(name);
    if (name == "encoder.embedding") {
      for (std::size_t id = 0; id < data.symbols.size(); ++id) {
        auto prev = base.symbols.find(data.symbols.at(static_cast<int>(id)).text);
        if (prev) value.row(static_cast<Eigen::Index>(id)) = old.row(*prev);
      }
    } else if (name == "speaker_embedding") {
      for (std::size_t k = 0; k < data.speakers.size(); ++k) {
        auto it = std::find(base.speakers.begin(), base.speakers.end(), data.speakers[k]);
        if (it != base.speakers.end())
          value.row(static_cast<Eigen::Index>(k)) = old.row(it - base.speakers.begin());
      }
    } else {
      if (old.rows() != value.rows() || old.cols() != value.cols())
        throw ConfigError("finetune: parameter " + name + " changed shape");
      value = old;
    }
  }
  for (const auto &[name, value] : base.params)
    if (!fresh.contains(name))
      throw ConfigError("finetune: base parameter " + name + " has no counterpart");

  ParameterSet params = ck.params;
  Adam adam({s.beta1, s.beta2, s.adam_eps});
  Loop loop(data, config, options, result);
  loop.run("finetune", steps.value_or(s.finetune_steps), s.learning_rate * s.finetune_lr_scale,
           s.seed ^ kFinetuneSalt, params, adam);
  finish(ck, params, adam, loop.completed(), "finetune");
  return result;
}

}  // namespace comedic
