// core/src/dataset.cc
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

#include "comedic/dataset.h"

#include <algorithm>
#include <deque>
#include <future>
#include <numeric>
#include <set>
#include <thread>

#include "comedic/error.h"
#include "comedic/parameters.h"

namespace comedic {
namespace {

FrameFeatures analyse(const UtteranceRecord &record, const FeatureConfig &cfg) {
  Waveform wave = read_wav(record.audio_path);
  if (wave.sample_rate != cfg.sample_rate)
    throw InputError(record.utterance_id + ": sample rate " + std::to_string(wave.sample_rate) +
                     " Hz, features expect " + std::to_string(cfg.sample_rate) + " Hz");
  return extract_features(wave, cfg);
}

// Bounded pool of producers; results are collected in record order.
std::vector<FrameFeatures> analyse_all(const std::vector<UtteranceRecord> &records,
                                       const FeatureConfig &cfg) {
  const std::size_t window = std::max(2u, std::thread::hardware_concurrency());
  std::deque<std::future<FrameFeatures>> pending;
  std::vector<FrameFeatures> out;
  out.reserve(records.size());
  for (const auto &r : records) {
    pending.push_back(std::async(std::launch::async, analyse, std::cref(r), std::cref(cfg)));
    if (pending.size() >= window) {
      out.push_back(pending.front().get());
      pending.pop_front();
    }
  }
  for (auto &f : pending) out.push_back(f.get());
  return out;
}

// Pads (repeating the last frame) or truncates to `frames`.
void fit_frames(FrameFeatures &f, int frames) {
  const auto have = static_cast<int>(f.log_mel.rows());
  Matrix mel(frames, f.log_mel.cols());
  for (int t = 0; t < frames; ++t) mel.row(t) = f.log_mel.row(std::min(t, have - 1));
  f.log_mel = std::move(mel);
  const double last_energy = f.energy.empty() ? 0.0 : f.energy.back();
  f.energy.resize(static_cast<std::size_t>(frames), last_energy);
  f.pitch.resize(static_cast<std::size_t>(frames), 0.0);
}

}  // namespace

std::vector<std::string> mandarin_inventory() {
  static const char *kInitials[] = {"b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
                                    "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s", "ng"};
  static const char *kFinals[] = {"a",  "o",  "e",  "i",   "u",   "v",  "ii", "ai",
                                  "ei", "ao", "ou", "ia",  "ie",  "iao", "iou", "ua",
                                  "uo", "uai", "uei", "ve", "er"};
  std::vector<std::string> out(std::begin(kInitials), std::end(kInitials));
  for (const char *f : kFinals)
    for (int tone = 1; tone <= 5; ++tone) out.push_back(std::string(f) + std::to_string(tone));
  out.emplace_back(kPauseSymbol);
  return out;
}

CorpusSplit split_corpus(const std::vector<TrainingExample> &examples, double val_fraction,
                         double test_fraction, std::uint64_t seed) {
  if (val_fraction < 0.0 || test_fraction < 0.0 || val_fraction + test_fraction >= 1.0)
    throw ConfigError("split fractions must be non-negative and sum below 1");
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  for (std::size_t i = 0; i < examples.size(); ++i)
    by_speaker[examples[i].speaker_id].push_back(i);
  CorpusSplit split;
  Rng rng(seed);
  for (auto &[speaker, idx] : by_speaker) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
    const double n = static_cast<double>(idx.size());
    auto n_test = static_cast<std::size_t>(n * test_fraction);
    auto n_val = static_cast<std::size_t>(n * val_fraction);
    while (n_test + n_val >= idx.size() && n_test + n_val > 0) {
      if (n_test >= n_val) --n_test;
      else --n_val;
    }
    std::size_t k = 0;
    for (; k < n_test; ++k) split.test.push_back(idx[k]);
    for (; k < n_test + n_val; ++k) split.validation.push_back(idx[k]);
    for (; k < idx.size(); ++k) split.train.push_back(idx[k]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Dataset build_dataset(const std::vector<UtteranceRecord> &records,
                      const std::map<std::string, Alignment> &alignments,
                      const FillerRegistry &registry, const DatasetOptions &options) {
  if (records.empty()) throw InputError("build_dataset: empty corpus");
  if (options.features.mel_bins < 1) throw ConfigError("build_dataset: mel_bins must be >= 1");
  Dataset data;
  std::set<std::string> present;
  for (const auto &r : records) present.insert(r.speaker_id);
  if (options.use_special_tokens) {
    std::vector<FillerEntry> kept;
    for (const auto &e : registry.entries())
      if (present.count(e.speaker)) kept.push_back(e);
    data.registry = FillerRegistry(std::move(kept));
  }
  const auto inventory = options.inventory.empty() ? mandarin_inventory() : options.inventory;
  data.symbols = build_symbol_table(inventory, data.registry);

  for (const auto &r : records) {
    auto it = alignments.find(r.utterance_id);
    if (it == alignments.end())
      throw InputError("no alignment for utterance " + r.utterance_id);
    const Alignment &ali = it->second;
    if (ali.size() != r.phonemes.size())
      throw InputError(r.utterance_id + ": alignment has " + std::to_string(ali.size()) +
                       " segments for " + std::to_string(r.phonemes.size()) + " phonemes");
    for (std::size_t i = 0; i < ali.size(); ++i)
      if (ali[i].label != r.phonemes[i])
        throw InputError(r.utterance_id + ": alignment label '" + ali[i].label +
                         "' at position " + std::to_string(i) + " does not match phoneme '" +
                         r.phonemes[i] + "'");
  }
  data.speakers.assign(present.begin(), present.end());

  std::vector<FrameFeatures> features = analyse_all(records, options.features);

  for (std::size_t u = 0; u < records.size(); ++u) {
    const auto &ali = alignments.at(records[u].utterance_id);
    int total = 0;
    for (const auto &seg : ali) {
      if (seg.frames < 1)
        throw InputError(records[u].utterance_id + ": segment '" + seg.label +
                         "' has no frames");
      total += seg.frames;
    }
    const auto have = static_cast<int>(features[u].log_mel.rows());
    if (std::abs(have - total) > options.frame_tolerance || have == 0)
      throw InputError(records[u].utterance_id + ": audio has " + std::to_string(have) +
                       " frames but the alignment covers " + std::to_string(total));
    fit_frames(features[u], total);
  }

  std::vector<std::vector<double>> raw_pitch, raw_energy;
  for (const auto &f : features) {
    raw_pitch.push_back(f.pitch);
    raw_energy.push_back(f.energy);
  }
  data.normalizer = TrackNormalizer::fit(raw_pitch, raw_energy);

  for (std::size_t u = 0; u < records.size(); ++u) {
    const auto &r = records[u];
    const auto &ali = alignments.at(r.utterance_id);
    const FrameTracks tracks = data.normalizer.apply(features[u].pitch, features[u].energy);
    FillerReplacement rep =
        replace_fillers_with_spans(r.phonemes, r.speaker_id, data.registry, &data.symbols);
    std::vector<int> seg_start(ali.size() + 1, 0);
    for (std::size_t i = 0; i < ali.size(); ++i) seg_start[i + 1] = seg_start[i] + ali[i].frames;

    TrainingExample ex;
    ex.utterance_id = r.utterance_id;
    ex.speaker_id = r.speaker_id;
    ex.speaker_index = static_cast<int>(
        std::lower_bound(data.speakers.begin(), data.speakers.end(), r.speaker_id) -
        data.speakers.begin());
    ex.ids = data.symbols.encode(rep.labels);
    for (std::size_t i = 0; i < rep.labels.size(); ++i) {
      const auto [begin, length] = rep.spans[i];
      const int f0 = seg_start[begin], f1 = seg_start[begin + length];
      double p = 0.0, e = 0.0;
      int voiced = 0;
      for (int t = f0; t < f1; ++t) {
        e += tracks.energy[static_cast<std::size_t>(t)];
        if (tracks.voiced[static_cast<std::size_t>(t)]) {
          p += tracks.pitch[static_cast<std::size_t>(t)];
          ++voiced;
        }
      }
      ex.durations.push_back(f1 - f0);
      ex.pitch.push_back(voiced > 0 ? p / voiced : 0.0);
      ex.energy.push_back(e / (f1 - f0));
    }
    ex.labels = std::move(rep.labels);
    ex.mel = std::move(features[u].log_mel);
    data.examples.push_back(std::move(ex));
  }
  return data;
}

std::map<std::string, UtteranceAlignment> analyse_corpus(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, Alignment> &alignments, const FeatureConfig &features) {
  for (const auto &r : records)
    if (!alignments.count(r.utterance_id))
      throw InputError("no alignment for utterance " + r.utterance_id);
  std::vector<FrameFeatures> all = analyse_all(records, features);
  std::vector<std::vector<double>> raw_pitch, raw_energy;
  for (const auto &f : all) {
    raw_pitch.push_back(f.pitch);
    raw_energy.push_back(f.energy);
  }
  const TrackNormalizer norm = TrackNormalizer::fit(raw_pitch, raw_energy);
  std::map<std::string, UtteranceAlignment> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    UtteranceAlignment ua;
    ua.segments = alignments.at(records[i].utterance_id);
    ua.tracks = norm.apply(all[i].pitch, all[i].energy);
    out[records[i].utterance_id] = std::move(ua);
  }
  return out;
}

std::vector<std::size_t> batch_indices(const std::vector<std::size_t> &pool, int batch_size,
                                       std::uint64_t seed, int step) {
  if (pool.empty()) throw InputError("batch_indices: empty training pool");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (step < 1) throw ConfigError("batch_indices: steps count from 1");
  const std::size_t n = pool.size();
  std::vector<std::size_t> out;
  std::uint64_t cached_epoch = ~0ULL;
  std::vector<std::size_t> perm;
  for (int j = 0; j < batch_size; ++j) {
    const std::uint64_t pos =
        static_cast<std::uint64_t>(step - 1) * static_cast<std::uint64_t>(batch_size) +
        static_cast<std::uint64_t>(j);
    const std::uint64_t epoch = pos / n;
    if (epoch != cached_epoch) {
      perm.resize(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng(seed * 0x9E3779B97F4A7C15ULL + epoch);
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
      cached_epoch = epoch;
    }
    out.push_back(pool[perm[pos % n]]);
  }
  return out;
}

}  // namespace comedic
