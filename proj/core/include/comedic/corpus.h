// core/include/comedic/corpus.h
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

// Corpus manifests, forced alignments, clip-length screening and the
// per-speaker style statistics (speaking rate, pause length, mean energy,
// mean pitch).

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comedic/phoneme_frontend.h"

namespace comedic {

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string audio_path;  // resolved against the manifest directory
  std::string transcript;
  LabelSequence phonemes;
  double duration_s = 0.0;
};

/// Tab-separated: utt_id, speaker_id, audio_path, duration_s, transcript,
/// space-separated phonemes. '#' lines and blank lines are skipped.
std::vector<UtteranceRecord> parse_manifest(std::istream &in,
                                            const std::string &source,
                                            const std::filesystem::path &base_dir);
std::vector<UtteranceRecord> load_manifest(const std::filesystem::path &path);
std::string format_manifest_line(const UtteranceRecord &record);

struct ClipLengthRange {
  double min_s = 3.0;
  double max_s = 8.0;
};

struct ClipWarning {
  std::string utterance_id;
  double duration_s = 0.0;
  std::string message;
};

/// One warning per clip outside the nominal range; never throws.
std::vector<ClipWarning> validate_clip_lengths(
    const std::vector<UtteranceRecord> &records, ClipLengthRange range = {});

struct AlignmentSegment {
  std::string label;
  int frames = 0;
};
using Alignment = std::vector<AlignmentSegment>;

/// `label frames` per line.
Alignment parse_alignment(std::istream &in, const std::string &source);
Alignment load_alignment(const std::filesystem::path &path);
std::string format_alignment(const Alignment &alignment);
/// Reads `<dir>/<utterance_id>.ali` for every record.
std::map<std::string, Alignment> load_alignments(
    const std::filesystem::path &dir, const std::vector<UtteranceRecord> &records);

/// Frame-level prosody tracks. `pitch` and `energy` are z-normalised with
/// corpus-global statistics; `voiced` marks frames with a pitch estimate.
struct FrameTracks {
  std::vector<double> pitch;
  std::vector<double> energy;
  std::vector<bool> voiced;
};

struct TrackNormalizer {
  double pitch_mean = 0.0;
  double pitch_std = 1.0;
  double energy_mean = 0.0;
  double energy_std = 1.0;

  /// Pitch moments over voiced frames (raw pitch > 0), energy over all.
  static TrackNormalizer fit(const std::vector<std::vector<double>> &raw_pitch,
                             const std::vector<std::vector<double>> &raw_energy);
  FrameTracks apply(const std::vector<double> &raw_pitch,
                    const std::vector<double> &raw_energy) const;
};

struct UtteranceAlignment {
  Alignment segments;
  FrameTracks tracks;
};

struct StatisticsOptions {
  double frame_shift_ms = 256.0 / 22050.0 * 1000.0;
  /// Pause segments shorter than this are ignored.
  double pause_floor_ms = 50.0;
  bool pitch_voiced_only = true;
  bool energy_speech_only = true;
};

struct SpeakerStatistics {
  int clips = 0;
  double total_duration_s = 0.0;
  long words = 0;
  double words_per_second = 0.0;
  double avg_pause_ms = 0.0;
  /// False when no pause segment passed the floor; avg_pause_ms is then 0.
  bool pause_defined = false;
  double avg_energy = 0.0;
  double avg_pitch = 0.0;
};

/// Order-independent partial sums behind SpeakerStatistics, mergeable across
/// disjoint record sets.
struct SpeakerAccumulator {
  int clips = 0;
  double total_duration_s = 0.0;
  long words = 0;
  double pause_ms_sum = 0.0;
  long pause_count = 0;
  double energy_sum = 0.0;
  long energy_frames = 0;
  double pitch_sum = 0.0;
  long pitch_frames = 0;

  void merge(const SpeakerAccumulator &other);
  SpeakerStatistics finalize() const;
};

/// Mandarin "words": code points of the transcript excluding whitespace and
/// punctuation.
long count_words(const std::string &transcript);

std::map<std::string, SpeakerAccumulator> accumulate_statistics(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, UtteranceAlignment> &alignments,
    const StatisticsOptions &options = {});

std::map<std::string, SpeakerStatistics> compute_statistics(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, UtteranceAlignment> &alignments,
    const StatisticsOptions &options = {});

/// Fixed-width table for terminals.
std::string format_statistics_table(
    const std::map<std::string, SpeakerStatistics> &stats,
    const FillerRegistry &registry);
/// JSON report with one object per speaker.
std::string statistics_report_json(
    const std::map<std::string, SpeakerStatistics> &stats,
    const FillerRegistry &registry);

}  // namespace comedic
