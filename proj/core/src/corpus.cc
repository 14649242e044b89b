// core/src/corpus.cc
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

#include "comedic/corpus.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {

std::vector<UtteranceRecord> parse_manifest(std::istream &in,
                                            const std::string &source,
                                            const std::filesystem::path &base_dir) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto f = split(body, '\t');
    if (f.size() != 6)
      throw IoError(where + ": expected 6 tab-separated fields "
                            "(utt_id speaker audio duration transcript phonemes), got " +
                    std::to_string(f.size()));
    UtteranceRecord r;
    r.utterance_id = std::string(trim(f[0]));
    r.speaker_id = std::string(trim(f[1]));
    std::filesystem::path audio(std::string(trim(f[2])));
    r.audio_path = (audio.is_absolute() ? audio : base_dir / audio).string();
    const std::string dur(trim(f[3]));
    try {
      std::size_t used = 0;
      r.duration_s = std::stod(dur, &used);
      if (used != dur.size()) throw std::invalid_argument(dur);
    } catch (const std::exception &) {
      throw IoError(where + ": bad duration field '" + dur + "'");
    }
    r.transcript = std::string(trim(f[4]));
    r.phonemes = split_labels(f[5]);
    if (r.utterance_id.empty() || r.speaker_id.empty())
      throw IoError(where + ": empty utterance or speaker id");
    if (!(r.duration_s > 0.0) || !std::isfinite(r.duration_s))
      throw IoError(where + ": duration must be positive");
    if (r.phonemes.empty()) throw IoError(where + ": empty phoneme sequence");
    if (!ids.insert(r.utterance_id).second)
      throw IoError(where + ": duplicate utterance id '" + r.utterance_id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<UtteranceRecord> load_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return parse_manifest(in, path.string(), path.parent_path());
}

std::string format_manifest_line(const UtteranceRecord &r) {
  char dur[32];
  std::snprintf(dur, sizeof(dur), "%.4f", r.duration_s);
  return r.utterance_id + "\t" + r.speaker_id + "\t" + r.audio_path + "\t" +
         dur + "\t" + r.transcript + "\t" + join_labels(r.phonemes);
}

std::vector<ClipWarning> validate_clip_lengths(
    const std::vector<UtteranceRecord> &records, ClipLengthRange range) {
  std::vector<ClipWarning> warnings;
  for (const UtteranceRecord &r : records) {
    if (r.duration_s >= range.min_s && r.duration_s <= range.max_s) continue;
    char msg[160];
    std::snprintf(msg, sizeof(msg), "clip %s lasts %.2f s, outside [%.1f, %.1f] s",
                  r.utterance_id.c_str(), r.duration_s, range.min_s, range.max_s);
    warnings.push_back({r.utterance_id, r.duration_s, msg});
  }
  return warnings;
}

Alignment parse_alignment(std::istream &in, const std::string &source) {
  Alignment out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_labels(body);
    if (fields.size() != 2)
      throw IoError(source + ":" + std::to_string(line_no) +
                    ": expected 'label frames'");
    AlignmentSegment seg;
    seg.label = fields[0];
    try {
      std::size_t used = 0;
      seg.frames = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument(fields[1]);
    } catch (const std::exception &) {
      throw IoError(source + ":" + std::to_string(line_no) +
                    ": bad frame count '" + fields[1] + "'");
    }
    if (seg.frames <= 0)
      throw IoError(source + ":" + std::to_string(line_no) +
                    ": frame counts must be positive");
    out.push_back(std::move(seg));
  }
  if (out.empty()) throw IoError(source + ": empty alignment");
  return out;
}

Alignment load_alignment(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alignment " + path.string());
  return parse_alignment(in, path.string());
}

std::string format_alignment(const Alignment &alignment) {
  std::string out;
  for (const AlignmentSegment &s : alignment)
    out += s.label + " " + std::to_string(s.frames) + "\n";
  return out;
}

std::map<std::string, Alignment> load_alignments(
    const std::filesystem::path &dir, const std::vector<UtteranceRecord> &records) {
  std::map<std::string, Alignment> out;
  for (const UtteranceRecord &r : records) {
    const auto path = dir / (r.utterance_id + ".ali");
    if (!std::filesystem::exists(path))
      throw IoError("missing alignment for utterance " + r.utterance_id +
                    " (" + path.string() + ")");
    out.emplace(r.utterance_id, load_alignment(path));
  }
  return out;
}

// ---------------------------------------------------------------------------

TrackNormalizer TrackNormalizer::fit(
    const std::vector<std::vector<double>> &raw_pitch,
    const std::vector<std::vector<double>> &raw_energy) {
  auto moments = [](const std::vector<std::vector<double>> &tracks,
                    bool positive_only, double *mean, double *stddev) {
    double sum = 0.0, sq = 0.0;
    long n = 0;
    for (const auto &t : tracks)
      for (double v : t) {
        if (positive_only && v <= 0.0) continue;
        sum += v;
        sq += v * v;
        ++n;
      }
    if (n == 0) {
      *mean = 0.0;
      *stddev = 1.0;
      return;
    }
    *mean = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - *mean * *mean;
    *stddev = var > 1e-12 ? std::sqrt(var) : 1.0;
  };
  TrackNormalizer norm;
  moments(raw_pitch, true, &norm.pitch_mean, &norm.pitch_std);
  moments(raw_energy, false, &norm.energy_mean, &norm.energy_std);
  return norm;
}

FrameTracks TrackNormalizer::apply(const std::vector<double> &raw_pitch,
                                   const std::vector<double> &raw_energy) const {
  FrameTracks out;
  out.pitch.resize(raw_pitch.size());
  out.voiced.resize(raw_pitch.size());
  for (std::size_t i = 0; i < raw_pitch.size(); ++i) {
    out.voiced[i] = raw_pitch[i] > 0.0;
    out.pitch[i] = out.voiced[i] ? (raw_pitch[i] - pitch_mean) / pitch_std : 0.0;
  }
  out.energy.resize(raw_energy.size());
  for (std::size_t i = 0; i < raw_energy.size(); ++i)
    out.energy[i] = (raw_energy[i] - energy_mean) / energy_std;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool is_punctuation_or_space(char32_t c) {
  if (c < 0x80) {
    return c <= 0x20 || c == 0x7F ||
           (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
  }
  return (c >= 0x2000 && c <= 0x206F) ||  // general punctuation
         (c >= 0x3000 && c <= 0x303F) ||  // CJK symbols and punctuation
         (c >= 0xFE30 && c <= 0xFE4F) ||  // CJK compatibility forms
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
         (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65) ||
         c == 0x00A0 || c == 0x00B7 || c == 0xFFFD;
}

}  // namespace

long count_words(const std::string &transcript) {
  long n = 0;
  for (char32_t c : utf8_decode(transcript))
    if (!is_punctuation_or_space(c)) ++n;
  return n;
}

void SpeakerAccumulator::merge(const SpeakerAccumulator &o) {
  clips += o.clips;
  total_duration_s += o.total_duration_s;
  words += o.words;
  pause_ms_sum += o.pause_ms_sum;
  pause_count += o.pause_count;
  energy_sum += o.energy_sum;
  energy_frames += o.energy_frames;
  pitch_sum += o.pitch_sum;
  pitch_frames += o.pitch_frames;
}

SpeakerStatistics SpeakerAccumulator::finalize() const {
  SpeakerStatistics s;
  s.clips = clips;
  s.total_duration_s = total_duration_s;
  s.words = words;
  s.words_per_second =
      total_duration_s > 0.0 ? static_cast<double>(words) / total_duration_s : 0.0;
  s.pause_defined = pause_count > 0;
  s.avg_pause_ms = s.pause_defined ? pause_ms_sum / static_cast<double>(pause_count) : 0.0;
  s.avg_energy = energy_frames > 0 ? energy_sum / static_cast<double>(energy_frames) : 0.0;
  s.avg_pitch = pitch_frames > 0 ? pitch_sum / static_cast<double>(pitch_frames) : 0.0;
  return s;
}

std::map<std::string, SpeakerAccumulator> accumulate_statistics(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, UtteranceAlignment> &alignments,
    const StatisticsOptions &options) {
  std::map<std::string, SpeakerAccumulator> acc;
  for (const UtteranceRecord &r : records) {
    auto it = alignments.find(r.utterance_id);
    if (it == alignments.end())
      throw InputError("no alignment for utterance " + r.utterance_id);
    const UtteranceAlignment &ali = it->second;
    SpeakerAccumulator &a = acc[r.speaker_id];
    a.clips += 1;
    a.total_duration_s += r.duration_s;
    a.words += count_words(r.transcript);

    const FrameTracks &tr = ali.tracks;
    std::size_t frame = 0;
    for (const AlignmentSegment &seg : ali.segments) {
      const bool pause = seg.label == kPauseSymbol;
      const double ms = seg.frames * options.frame_shift_ms;
      if (pause && ms >= options.pause_floor_ms) {
        a.pause_ms_sum += ms;
        a.pause_count += 1;
      }
      for (int k = 0; k < seg.frames; ++k, ++frame) {
        const bool speech = !pause;
        if (frame < tr.energy.size() && (speech || !options.energy_speech_only)) {
          a.energy_sum += tr.energy[frame];
          a.energy_frames += 1;
        }
        if (frame < tr.pitch.size()) {
          const bool voiced = frame < tr.voiced.size() && tr.voiced[frame];
          if (!options.pitch_voiced_only || voiced) {
            a.pitch_sum += tr.pitch[frame];
            a.pitch_frames += 1;
          }
        }
      }
    }
  }
  return acc;
}

std::map<std::string, SpeakerStatistics> compute_statistics(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, UtteranceAlignment> &alignments,
    const StatisticsOptions &options) {
  std::map<std::string, SpeakerStatistics> out;
  for (const auto &[speaker, acc] : accumulate_statistics(records, alignments, options))
    out.emplace(speaker, acc.finalize());
  return out;
}

namespace {

std::string filler_column(const FillerRegistry &registry, const std::string &speaker) {
  std::string out;
  for (const FillerEntry *e : registry.for_speaker(speaker)) {
    if (!out.empty()) out += "; ";
    out += join_labels(e->phonemes);
  }
  return out.empty() ? "None" : out;
}

}  // namespace

std::string format_statistics_table(
    const std::map<std::string, SpeakerStatistics> &stats,
    const FillerRegistry &registry) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s %6s %10s %7s %8s %10s %8s %8s  %s\n",
                "speaker", "clips", "dur(s)", "words", "words/s", "pause(ms)",
                "energy", "pitch", "filler");
  os << buf;
  for (const auto &[speaker, s] : stats) {
    std::snprintf(buf, sizeof(buf), "%-10s %6d %10.1f %7ld %8.2f %10.1f %8.2f %8.2f  %s\n",
                  speaker.c_str(), s.clips, s.total_duration_s, s.words,
                  s.words_per_second, s.avg_pause_ms, s.avg_energy, s.avg_pitch,
                  filler_column(registry, speaker).c_str());
    os << buf;
  }
  return os.str();
}

std::string statistics_report_json(
    const std::map<std::string, SpeakerStatistics> &stats,
    const FillerRegistry &registry) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto &[speaker, s] : stats) {
    nlohmann::json fillers = nlohmann::json::array();
    for (const FillerEntry *e : registry.for_speaker(speaker))
      fillers.push_back({{"token", e->token}, {"phonemes", join_labels(e->phonemes)}});
    rows.push_back({{"speaker", speaker},
                    {"clips", s.clips},
                    {"total_duration_s", s.total_duration_s},
                    {"words", s.words},
                    {"words_per_second", s.words_per_second},
                    {"avg_pause_ms", s.avg_pause_ms},
                    {"pause_defined", s.pause_defined},
                    {"avg_energy", s.avg_energy},
                    {"avg_pitch", s.avg_pitch},
                    {"personal_fillers", fillers}});
  }
  return nlohmann::json{{"speakers", rows}}.dump(2) + "\n";
}

}  // namespace comedic
