// core/include/comedic/synthesis.h
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

// Inference front door: label sequence in, mel (optionally a Griffin-Lim
// waveform) and a per-phoneme duration trace out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "comedic/audio.h"
#include "comedic/checkpoint.h"

namespace comedic {

struct DurationSegment {
  std::string label;
  int start = 0;
  int frames = 0;
};

struct DurationTrace {
  std::string name;
  std::vector<DurationSegment> segments;

  static DurationTrace from_durations(std::string name, std::span<const std::string> labels,
                                      std::span<const int> durations);
  int total_frames() const;
  LabelSequence labels() const;
  /// Segments start at 0 and tile [0, total) without gaps.
  bool contiguous() const;

  /// Text form: a `# name` line, then `label<TAB>start<TAB>frames` lines.
  std::string serialize() const;
  static DurationTrace parse(std::string_view text, const std::string &source);
  static DurationTrace load(const std::filesystem::path &path);
};

struct DurationComparison {
  std::vector<int> deltas;  // b - a per segment
  int total_delta = 0;
  /// Spearman correlation of the two duration vectors (average ranks for
  /// ties); 1 when both are constant.
  double rank_correlation = 1.0;
};

DurationComparison compare_durations(const DurationTrace &a, const DurationTrace &b);
std::string comparison_json(const DurationComparison &report);

struct SynthesisRequest {
  /// Labels; special tokens may appear directly, raw filler phrases are
  /// collapsed with the speaker's registry.
  LabelSequence phonemes;
  std::string speaker;
  /// Explicit reference clip id from the checkpoint's bank; otherwise one is
  /// drawn uniformly for the speaker with `seed`.
  std::optional<std::string> reference;
  std::uint64_t seed = 0;
  bool waveform = false;
  int griffin_lim_iterations = 32;
};

struct SynthesisResult {
  LabelSequence labels;  // after filler replacement
  Matrix mel;
  DurationTrace trace;
  std::string reference_id;
  std::optional<Waveform> waveform;
};

/// Holds a frozen checkpoint; synthesize() is const and safe to call from
/// several threads.
class Synthesizer {
 public:
  explicit Synthesizer(Checkpoint checkpoint);

  const Checkpoint &checkpoint() const { return checkpoint_; }
  /// Labels the model will actually see for `request`.
  LabelSequence prepare_labels(const SynthesisRequest &request) const;
  const ReferenceClip &pick_reference(const SynthesisRequest &request) const;
  SynthesisResult synthesize(const SynthesisRequest &request) const;

 private:
  Checkpoint checkpoint_;
  AcousticModel model_;
};

/// Binary mel: "CMDMEL01", uint32 frames, uint32 bins, float32 LE row-major.
void write_mel(const std::filesystem::path &path, const Matrix &mel);
Matrix read_mel(const std::filesystem::path &path);
/// One frame per line, space separated.
std::string mel_to_text(const Matrix &mel);

}  // namespace comedic
