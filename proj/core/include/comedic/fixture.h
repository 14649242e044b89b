// core/include/comedic/fixture.h
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

// Synthetic corpora for tests and desk runs. Each "speaker" has its own F0
// and timing. Finals are harmonic tones, initials are noise bursts, and the
// alignments are exact by construction.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "comedic/audio.h"
#include "comedic/corpus.h"

namespace comedic {

struct SpeakerStyle {
  std::string id;
  double f0_hz = 150.0;
  int initial_frames = 4;
  int final_frames = 7;
  int pause_frames = 25;
  /// Frames per phone inside this speaker's own filler phrase.
  int filler_frames = 6;
  double amplitude = 0.3;
};

/// Comedians A-D: A/B fast, C slow with long pauses, D in between.
std::vector<SpeakerStyle> comedian_styles();
/// Neutral read-speech speakers for pretraining.
std::vector<SpeakerStyle> generic_styles(int count);

/// B says "n i3 zh ii1 d ao4 b a5" as <spc1>; A says "er2" as <spc2>.
FillerRegistry comedian_registry();

struct FixtureSpec {
  std::vector<SpeakerStyle> speakers;
  int clips_per_speaker = 4;
  /// Target clip length range in seconds.
  double min_seconds = 3.0;
  double max_seconds = 8.0;
  /// Adds one too-short and one too-long clip for the first speaker.
  bool include_out_of_range = false;
  std::uint64_t seed = 7;
  FeatureConfig features;
  FillerRegistry registry;
  /// Chance that a clip ends with the speaker's filler phrase.
  double filler_rate = 0.5;
};

struct FixtureCorpus {
  std::filesystem::path manifest;
  std::vector<UtteranceRecord> records;
  std::map<std::string, Alignment> alignments;
  FillerRegistry registry;
};

/// Writes wavs/, alignments/, manifest.tsv and registry.tsv under `dir`.
FixtureCorpus write_fixture(const FixtureSpec &spec, const std::filesystem::path &dir);

/// Two short clips of speaker B (one with the filler) for overfitting.
FixtureSpec overfit_spec();
FixtureSpec comedy_spec(int clips_per_speaker = 6);
FixtureSpec pretrain_spec(int speakers = 3, int clips_per_speaker = 6);

/// Renders one utterance from its alignment.
Waveform render_utterance(const Alignment &alignment, const SpeakerStyle &style,
                          const FeatureConfig &features, std::uint64_t seed);

}  // namespace comedic
