// core/include/comedic/optimizer.h
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

// Adam with the Noam warmup schedule and global-norm gradient clipping.

#include "comedic/parameters.h"

namespace comedic {

/// peak * min(step / warmup, sqrt(warmup / step)); step counts from 1.
double noam_rate(int step, double peak, int warmup);

/// Scales `grads` in place so their global L2 norm is at most `max_norm`
/// (no-op for max_norm <= 0). Returns the norm before clipping.
double clip_gradients(ParameterSet &grads, double max_norm);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
};

class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamOptions options) : options_(options) {}

  /// One update with learning rate `lr`. Moment buffers are created lazily
  /// (zeros) for parameters seen for the first time.
  void step(ParameterSet &params, const ParameterSet &grads, double lr);

  int steps() const { return steps_; }
  const ParameterSet &first_moment() const { return m_; }
  const ParameterSet &second_moment() const { return v_; }
  const AdamOptions &options() const { return options_; }
  void restore(ParameterSet m, ParameterSet v, int steps);

 private:
  AdamOptions options_;
  ParameterSet m_;
  ParameterSet v_;
  int steps_ = 0;
};

}  // namespace comedic
