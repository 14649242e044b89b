// core/include/comedic/prosody_encoder.h
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

// Reference encoder (strided 2-D convolutions + GRU) and the prosody-token
// attention that turns a reference mel-spectrogram into the prosody
// representation E conditioning every CLN site.
//
//   Q = R W_q,  K = P W_k,  V = P W_v,  E = softmax(Q K^T / sqrt(d_head)) V
//
// computed independently per head over column blocks and concatenated.

#include "comedic/config.h"
#include "comedic/parameters.h"

namespace comedic {

/// The GRU summary of the reference and the query it is adapted into.
struct ReferenceQuery {
  Vector gru_state;  // reference.gru_hidden
  Vector query;      // prosody.token_dim
};

struct ProsodySpace {
  Matrix tokens;   // num_tokens x d
  Matrix w_query;  // d x d
  Matrix w_key;    // d x d (ignored when tie_qk_projection)
  Matrix w_value;  // d x d
  int num_heads = 1;
  bool tie_qk_projection = false;

  void validate() const;
};

struct ProsodyRepresentation {
  Vector e;          // d
  Matrix attention;  // num_heads x num_tokens, rows sum to 1
};

void init_prosody_parameters(ParameterSet &params, const ModelConfig &config,
                             Rng &rng);

/// Snapshot of the attention parameters held in `params`.
ProsodySpace prosody_space(const ParameterSet &params, const ModelConfig &config);

// Graph-level building blocks used by the acoustic model.

/// 1 x token_dim query for a (frames x mel_bins) reference mel.
Var reference_query(Graph &graph, const ModelConfig &config, const Matrix &mel,
                    Var *gru_state = nullptr);

/// 1 x d prosody representation. `attention` receives the per-head weights.
Var attend_prosody(Var query, Var tokens, Var w_query, Var w_key, Var w_value,
                   int num_heads, Matrix *attention = nullptr);

/// reference_query followed by attend_prosody with the bound parameters.
Var prosody_representation(Graph &graph, const ModelConfig &config,
                           const Matrix &mel, Matrix *attention = nullptr);

// Evaluation-only wrappers.

ReferenceQuery encode_reference(const ParameterSet &params,
                                const ModelConfig &config, const Matrix &mel);
ProsodyRepresentation attend_prosody(const Vector &query,
                                     const ProsodySpace &space);

}  // namespace comedic
