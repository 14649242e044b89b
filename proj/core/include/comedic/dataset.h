// core/include/comedic/dataset.h
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

// Turns a validated corpus (manifest, alignments, audio) into model-ready
// examples: symbol ids, frame durations, phoneme-level normalised pitch and
// energy, and log-mel targets.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "comedic/audio.h"
#include "comedic/corpus.h"
#include "comedic/phoneme_frontend.h"

namespace comedic {

/// Pinyin initials, tonal finals (tones 1-5) and the pause symbol.
std::vector<std::string> mandarin_inventory();

struct TrainingExample {
  std::string utterance_id;
  std::string speaker_id;
  int speaker_index = 0;
  LabelSequence labels;  // after filler replacement
  std::vector<int> ids;
  std::vector<int> durations;
  std::vector<double> pitch;
  std::vector<double> energy;
  Matrix mel;  // sum(durations) x mel_bins
};

struct CorpusSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Per-speaker seeded shuffle; each speaker keeps at least one training
/// clip.
CorpusSplit split_corpus(const std::vector<TrainingExample> &examples, double val_fraction,
                         double test_fraction, std::uint64_t seed);

struct DatasetOptions {
  FeatureConfig features;
  bool use_special_tokens = true;
  /// Base symbols; defaults to mandarin_inventory().
  std::vector<std::string> inventory;
  /// Largest tolerated |audio frames - alignment frames|.
  int frame_tolerance = 3;
};

struct Dataset {
  std::vector<TrainingExample> examples;
  SymbolTable symbols;
  FillerRegistry registry;
  TrackNormalizer normalizer;
  std::vector<std::string> speakers;  // sorted; index = speaker_index
};

/// Registry entries of speakers absent from `records` are dropped, so a
/// single-speaker corpus only gains that speaker's tokens. Audio is decoded and analysed concurrently; results are consumed in
/// manifest order.
Dataset build_dataset(const std::vector<UtteranceRecord> &records,
                      const std::map<std::string, Alignment> &alignments,
                      const FillerRegistry &registry, const DatasetOptions &options);

/// Alignments plus pitch/energy tracks z-normalised over the whole corpus,
/// for the statistics report.
std::map<std::string, UtteranceAlignment> analyse_corpus(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, Alignment> &alignments, const FeatureConfig &features);

/// Example indices for step `step` (from 1): consecutive slices of
/// per-epoch seeded permutations of `pool`. Stateless, so a resumed run
/// draws the same batches.
std::vector<std::size_t> batch_indices(const std::vector<std::size_t> &pool, int batch_size,
                                       std::uint64_t seed, int step);

}  // namespace comedic
