// core/include/comedic/losses.h
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

// Training objective. Mel L1 weights the second half of the utterance by
// alpha; durations use a linear-domain MSE.

#include <span>
#include <vector>

#include "comedic/acoustic_model.h"
#include "comedic/config.h"

namespace comedic {

/// mean over unmasked i of (target_i - predicted_i)^2. `mask[i]` false drops
/// position i. If `grad` is given it receives d/d(predicted).
double duration_loss(std::span<const double> predicted, std::span<const double> target,
                     const std::vector<bool> *mask = nullptr,
                     std::vector<double> *grad = nullptr);

/// The same error measured on log durations (all values must be positive).
double log_duration_loss(std::span<const double> predicted, std::span<const double> target);

/// mean(first ceil(T/2) entries) + alpha * mean(remaining entries).
double half_weighted_loss(std::span<const double> per_frame, double alpha,
                          std::vector<double> *grad = nullptr);

/// Per-frame L1 averaged over mel bins.
std::vector<double> mel_l1_per_frame(const Matrix &predicted, const Matrix &target);

double mean_squared_error(std::span<const double> predicted, std::span<const double> target,
                          std::vector<double> *grad = nullptr);

struct LossBreakdown {
  double mel_loss = 0.0;
  double duration_loss = 0.0;
  double pitch_loss = 0.0;
  double energy_loss = 0.0;
  double total = 0.0;
  double alpha = 2.0;
  /// Unweighted mel L1 over all frames, for monitoring.
  double mel_l1 = 0.0;

  LossBreakdown &operator+=(const LossBreakdown &other);
  LossBreakdown scaled(double s) const;
};

struct LossTargets {
  Matrix mel;
  std::vector<double> durations;
  std::vector<double> pitch;
  std::vector<double> energy;
};

LossBreakdown total_loss(const AcousticOutput &output, const LossTargets &targets,
                         const LossConfig &config);

/// Same objective as a graph node over a forward pass; `breakdown` receives
/// the component values.
Var total_loss(Graph &graph, const ForwardVars &forward, const LossTargets &targets,
               const LossConfig &config, LossBreakdown *breakdown = nullptr);

}  // namespace comedic
