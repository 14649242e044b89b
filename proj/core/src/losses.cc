// core/src/losses.cc
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

#include <cmath>
#include <string>

#include "comedic/error.h"

namespace comedic {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char *what) {
  if (a != b)
    throw InputError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
}

std::vector<double> column(const Var &v) {
  const Matrix &m = v.value();
  return std::vector<double>(m.data(), m.data() + m.size());
}

Matrix as_column(const std::vector<double> &g) {
  return Eigen::Map<const Matrix>(g.data(), static_cast<Eigen::Index>(g.size()), 1);
}

void check_finite(double v, const char *component) {
  if (!std::isfinite(v)) throw TrainingError(std::string("non-finite ") + component + " loss");
}

struct Components {
  LossBreakdown values;
  Matrix mel_grad;
  std::vector<double> duration_grad, pitch_grad, energy_grad;
};

Components evaluate(const Matrix &mel, const std::vector<double> &duration,
                    const std::vector<double> &pitch, const std::vector<double> &energy,
                    const LossTargets &t, const LossConfig &cfg, bool want_grad) {
  if (mel.rows() != t.mel.rows() || mel.cols() != t.mel.cols())
    throw InputError("mel loss: predicted " + std::to_string(mel.rows()) + "x" +
                     std::to_string(mel.cols()) + " vs target " + std::to_string(t.mel.rows()) +
                     "x" + std::to_string(t.mel.cols()));
  Components c;
  auto &v = c.values;
  v.alpha = cfg.alpha;
  const auto per_frame = mel_l1_per_frame(mel, t.mel);
  std::vector<double> frame_grad;
  v.mel_loss = half_weighted_loss(per_frame, cfg.alpha, want_grad ? &frame_grad : nullptr);
  double l1 = 0.0;
  for (double x : per_frame) l1 += x;
  v.mel_l1 = l1 / static_cast<double>(per_frame.size());
  v.duration_loss = duration_loss(duration, t.durations, nullptr,
                                  want_grad ? &c.duration_grad : nullptr);
  v.pitch_loss = mean_squared_error(pitch, t.pitch, want_grad ? &c.pitch_grad : nullptr);
  v.energy_loss = mean_squared_error(energy, t.energy, want_grad ? &c.energy_grad : nullptr);
  check_finite(v.mel_loss, "mel");
  check_finite(v.duration_loss, "duration");
  check_finite(v.pitch_loss, "pitch");
  check_finite(v.energy_loss, "energy");
  const auto &w = cfg.weights;
  v.total = w.mel * v.mel_loss + w.duration * v.duration_loss + w.pitch * v.pitch_loss +
            w.energy * v.energy_loss;
  if (want_grad) {
    const double bins = static_cast<double>(mel.cols());
    Matrix sign = (mel - t.mel).array().sign().matrix();
    c.mel_grad = (sign.array().colwise() * as_column(frame_grad).col(0).array()).matrix() *
                 (w.mel / bins);
    for (double &g : c.duration_grad) g *= w.duration;
    for (double &g : c.pitch_grad) g *= w.pitch;
    for (double &g : c.energy_grad) g *= w.energy;
  }
  return c;
}

}  // namespace

double duration_loss(std::span<const double> predicted, std::span<const double> target,
                     const std::vector<bool> *mask, std::vector<double> *grad) {
  require_same_length(predicted.size(), target.size(), "duration_loss");
  if (mask != nullptr) require_same_length(mask->size(), predicted.size(), "duration_loss mask");
  std::size_t n = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (mask != nullptr && !(*mask)[i]) continue;
    const double d = target[i] - predicted[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw InputError("duration_loss: no unmasked positions");
  if (grad != nullptr) {
    grad->assign(predicted.size(), 0.0);
    for (std::size_t i = 0; i < predicted.size(); ++i)
      if (mask == nullptr || (*mask)[i])
        (*grad)[i] = 2.0 * (predicted[i] - target[i]) / static_cast<double>(n);
  }
  return sum / static_cast<double>(n);
}

double log_duration_loss(std::span<const double> predicted, std::span<const double> target) {
  require_same_length(predicted.size(), target.size(), "log_duration_loss");
  if (predicted.empty()) throw InputError("log_duration_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!(predicted[i] > 0.0) || !(target[i] > 0.0))
      throw InputError("log_duration_loss: durations must be positive");
    const double d = std::log(target[i]) - std::log(predicted[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

double half_weighted_loss(std::span<const double> per_frame, double alpha,
                          std::vector<double> *grad) {
  if (!(alpha >= 0.0)) throw ConfigError("half_weighted_loss: alpha must be >= 0");
  const std::size_t t = per_frame.size();
  if (t == 0) throw InputError("half_weighted_loss: empty loss vector");
  const std::size_t split = (t + 1) / 2;
  const std::size_t rest = t - split;
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < split; ++i) first += per_frame[i];
  for (std::size_t i = split; i < t; ++i) second += per_frame[i];
  first /= static_cast<double>(split);
  if (rest > 0) second /= static_cast<double>(rest);
  if (grad != nullptr) {
    grad->assign(t, 1.0 / static_cast<double>(split));
    for (std::size_t i = split; i < t; ++i) (*grad)[i] = alpha / static_cast<double>(rest);
  }
  return first + alpha * second;
}

std::vector<double> mel_l1_per_frame(const Matrix &predicted, const Matrix &target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw InputError("mel_l1_per_frame: shape mismatch");
  if (predicted.cols() == 0) throw InputError("mel_l1_per_frame: zero mel bins");
  std::vector<double> out(static_cast<std::size_t>(predicted.rows()));
  for (Eigen::Index r = 0; r < predicted.rows(); ++r)
    out[static_cast<std::size_t>(r)] = (predicted.row(r) - target.row(r)).cwiseAbs().mean();
  return out;
}

double mean_squared_error(std::span<const double> predicted, std::span<const double> target,
                          std::vector<double> *grad) {
  require_same_length(predicted.size(), target.size(), "mean_squared_error");
  if (predicted.empty()) throw InputError("mean_squared_error: empty input");
  const double n = static_cast<double>(predicted.size());
  double sum = 0.0;
  if (grad != nullptr) grad->resize(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - target[i];
    sum += d * d;
    if (grad != nullptr) (*grad)[i] = 2.0 * d / n;
  }
  return sum / n;
}

LossBreakdown &LossBreakdown::operator+=(const LossBreakdown &o) {
  mel_loss += o.mel_loss;
  duration_loss += o.duration_loss;
  pitch_loss += o.pitch_loss;
  energy_loss += o.energy_loss;
  total += o.total;
  mel_l1 += o.mel_l1;
  alpha = o.alpha;
  return *this;
}

LossBreakdown LossBreakdown::scaled(double s) const {
  LossBreakdown r = *this;
  r.mel_loss *= s;
  r.duration_loss *= s;
  r.pitch_loss *= s;
  r.energy_loss *= s;
  r.total *= s;
  r.mel_l1 *= s;
  return r;
}

LossBreakdown total_loss(const AcousticOutput &output, const LossTargets &targets,
                         const LossConfig &config) {
  return evaluate(output.mel, output.duration_raw, output.pitch, output.energy, targets,
                  config, false)
      .values;
}

Var total_loss(Graph &graph, const ForwardVars &f, const LossTargets &targets,
               const LossConfig &config, LossBreakdown *breakdown) {
  (void)graph;
  Components c = evaluate(f.mel.value(), column(f.duration), column(f.pitch),
                          column(f.energy), targets, config, true);
  if (breakdown != nullptr) *breakdown = c.values;
  const Var inputs[] = {f.mel, f.duration, f.pitch, f.energy};
  std::vector<Matrix> grads{std::move(c.mel_grad), as_column(c.duration_grad),
                            as_column(c.pitch_grad), as_column(c.energy_grad)};
  return ad::external_scalar(inputs, c.values.total, std::move(grads));
}

}  // namespace comedic
