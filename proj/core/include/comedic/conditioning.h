// core/include/comedic/conditioning.h
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

// Conditional layer normalisation. Scale and bias come from bias-free
// linear maps of the conditioning vector:
//
//   gamma = E W_gamma,   beta = E W_beta,
//   CLN(x) = gamma * (x - mean(x)) / sqrt(var(x) + eps) + beta   (per row)

#include <string>
#include <utility>

#include "comedic/config.h"
#include "comedic/parameters.h"

namespace comedic {

struct ClnAdapter {
  Matrix w_gamma;  // condition_dim x width
  Matrix w_beta;   // condition_dim x width
  ClnSite site = ClnSite::kEncoder;
};

std::pair<RowVector, RowVector> cln_params(const RowVector &condition,
                                           const ClnAdapter &adapter);

Matrix conditional_layer_norm(const Matrix &x, const RowVector &gamma,
                              const RowVector &beta, double eps = 1e-5);

/// Plain (affine-free) layer normalisation.
Matrix layer_norm(const Matrix &x, double eps = 1e-5);

// Graph forms.
std::pair<Var, Var> cln_params(Var condition, Var w_gamma, Var w_beta);
Var conditional_layer_norm(Var x, Var gamma, Var beta, double eps);

/// Adapter parameter names for a normalisation site prefix.
std::string cln_gamma_name(const std::string &prefix);
std::string cln_beta_name(const std::string &prefix);

void add_cln_adapter(ParameterSet &params, const std::string &prefix,
                     int condition_dim, int width, Rng &rng);

/// Normalisation at `prefix`: CLN driven by `condition` when the site has an
/// adapter, otherwise plain layer norm.
Var normalize_site(Graph &graph, const std::string &prefix, bool conditioned,
                   Var condition, Var x, double eps);

/// Rescales every adapter so gamma ~ 1 and beta ~ 0 for conditions near
/// `typical`: W_gamma gets the rank-one term typical^T 1 / |typical|^2 on
/// top of its small random init.
void calibrate_cln_adapters(ParameterSet &params, const RowVector &typical);

ClnAdapter cln_adapter(const ParameterSet &params, const std::string &prefix,
                       ClnSite site);

}  // namespace comedic
