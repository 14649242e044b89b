// core/src/conditioning.cc
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

#include "comedic/conditioning.h"

#include "comedic/error.h"

namespace comedic {

std::pair<RowVector, RowVector> cln_params(const RowVector &condition,
                                           const ClnAdapter &adapter) {
  if (adapter.w_gamma.rows() != condition.size() ||
      adapter.w_beta.rows() != condition.size())
    throw ConfigError("cln_params: condition has dimension " +
                      std::to_string(condition.size()) + ", adapter expects " +
                      std::to_string(adapter.w_gamma.rows()));
  if (adapter.w_gamma.cols() != adapter.w_beta.cols())
    throw ConfigError("cln_params: gamma/beta widths differ");
  return {condition * adapter.w_gamma, condition * adapter.w_beta};
}

Matrix conditional_layer_norm(const Matrix &x, const RowVector &gamma,
                              const RowVector &beta, double eps) {
  if (x.cols() == 0) throw ConfigError("conditional_layer_norm: zero-width features");
  if (gamma.size() != x.cols() || beta.size() != x.cols())
    throw ConfigError("conditional_layer_norm: gamma/beta width " +
                      std::to_string(gamma.size()) + " does not match " +
                      std::to_string(x.cols()));
  Matrix y = layer_norm(x, eps);
  y = y.array().rowwise() * gamma.array();
  y.rowwise() += beta;
  return y;
}

Matrix layer_norm(const Matrix &x, double eps) {
  Tape tape;
  return ad::layer_norm_rows(tape.constant(x), eps).value();
}

std::pair<Var, Var> cln_params(Var condition, Var w_gamma, Var w_beta) {
  return {ad::matmul(condition, w_gamma), ad::matmul(condition, w_beta)};
}

Var conditional_layer_norm(Var x, Var gamma, Var beta, double eps) {
  return ad::add_row(ad::mul_row(ad::layer_norm_rows(x, eps), gamma), beta);
}

std::string cln_gamma_name(const std::string &prefix) { return prefix + ".cln.w_gamma"; }
std::string cln_beta_name(const std::string &prefix) { return prefix + ".cln.w_beta"; }

void add_cln_adapter(ParameterSet &params, const std::string &prefix,
                     int condition_dim, int width, Rng &rng) {
  params.add(cln_gamma_name(prefix), xavier_uniform(condition_dim, width, rng) * 0.1);
  params.add(cln_beta_name(prefix), xavier_uniform(condition_dim, width, rng) * 0.1);
}

Var normalize_site(Graph &graph, const std::string &prefix, bool conditioned,
                   Var condition, Var x, double eps) {
  if (!conditioned) return ad::layer_norm_rows(x, eps);
  if (!condition.valid())
    throw ConfigError("CLN site " + prefix + " has no conditioning vector");
  auto [gamma, beta] = cln_params(condition, graph.param(cln_gamma_name(prefix)),
                                  graph.param(cln_beta_name(prefix)));
  return conditional_layer_norm(x, gamma, beta, eps);
}

void calibrate_cln_adapters(ParameterSet &params, const RowVector &typical) {
  const double norm2 = typical.squaredNorm();
  if (!(norm2 > 0.0)) throw ConfigError("calibrate_cln_adapters: zero typical condition");
  const std::string suffix = ".cln.w_gamma";
  for (auto &[name, value] : params) {
    if (name.size() < suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    if (value.rows() != typical.size())
      throw ConfigError("calibrate_cln_adapters: " + name + " has " +
                        std::to_string(value.rows()) + " rows, condition has " +
                        std::to_string(typical.size()));
    value += typical.transpose() * RowVector::Ones(value.cols()) / norm2;
  }
}

ClnAdapter cln_adapter(const ParameterSet &params, const std::string &prefix,
                       ClnSite site) {
  return {params.at(cln_gamma_name(prefix)), params.at(cln_beta_name(prefix)), site};
}

}  // namespace comedic
