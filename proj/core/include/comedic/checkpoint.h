// core/include/comedic/checkpoint.h
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

// Versioned binary checkpoints: run config with architecture fingerprint,
// symbol table, filler registry, parameters, optimiser moments and the
// per-speaker reference bank used at inference.

#include <filesystem>
#include <string>
#include <vector>

#include "comedic/acoustic_model.h"
#include "comedic/config.h"
#include "comedic/corpus.h"
#include "comedic/phoneme_frontend.h"

namespace comedic {

struct ReferenceClip {
  std::string utterance_id;
  std::string speaker_id;
  Matrix mel;
};

struct Checkpoint {
  RunConfig config;
  SymbolTable symbols;
  FillerRegistry registry;
  std::vector<std::string> speakers;
  TrackNormalizer normalizer;
  ParameterSet params;
  ParameterSet adam_m;
  ParameterSet adam_v;
  int adam_steps = 0;
  int step = 0;
  std::string stage = "init";
  std::vector<ReferenceClip> references;

  AcousticModel model() const { return AcousticModel(config.model, params); }
  int speaker_index(const std::string &speaker) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
/// Verifies magic, version, content hash, architecture fingerprint and the
/// symbol-table hash; any mismatch is an IoError.
Checkpoint load_checkpoint(const std::filesystem::path &path);

std::string serialize_checkpoint(const Checkpoint &checkpoint);
Checkpoint deserialize_checkpoint(const std::string &bytes, const std::string &source);

}  // namespace comedic
