// core/include/comedic/trainer.h
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

// Pretrain / finetune loop: seeded batches, teacher-forced forward passes
// with the ground-truth mel as prosody reference, Adam with Noam warmup,
// periodic validation and JSON-lines loss logs.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "comedic/checkpoint.h"
#include "comedic/dataset.h"
#include "comedic/losses.h"

namespace comedic {

struct StepRecord {
  std::string stage;
  int step = 0;
  double learning_rate = 0.0;
  double grad_norm = 0.0;
  LossBreakdown loss;  // batch mean
  bool validation = false;
};

/// One JSON object per line.
std::string format_log_record(const StepRecord &record);

struct TrainOptions {
  /// Appended to as records are produced; empty path disables the file.
  std::filesystem::path log_path;
  /// Called after every record; returning false stops training early.
  std::function<bool(const StepRecord &)> on_record;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<StepRecord> log;
  CorpusSplit split;
  bool aborted = false;
  std::string abort_reason;
};

/// Fresh checkpoint for `data` (no optimisation yet).
Checkpoint initial_checkpoint(const Dataset &data, const RunConfig &config);

/// Training inputs for one example (reference = its own mel).
ModelInput model_input(const TrainingExample &example);
LossTargets loss_targets(const TrainingExample &example);

/// Mean teacher-forced loss over `indices`.
LossBreakdown evaluate_loss(const AcousticModel &model, const Dataset &data,
                            const std::vector<std::size_t> &indices, const LossConfig &loss);

/// Pretraining from scratch for config.schedule.pretrain_steps steps.
TrainResult train(const Dataset &data, const RunConfig &config, const TrainOptions &options = {});

/// Continues `base` on `data` for base.config.schedule.finetune_steps (or
/// `steps` if given). `data.symbols` must contain every base symbol;
/// embeddings of new symbols are initialised fresh, everything else is
/// warm-started. The optimiser restarts with peak rate scaled by
/// finetune_lr_scale.
TrainResult finetune(const Checkpoint &base, const Dataset &data,
                     std::optional<int> steps = std::nullopt,
                     const TrainOptions &options = {});

}  // namespace comedic
