// core/src/fixture.cc
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

#include "comedic/fixture.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "comedic/error.h"
#include "comedic/parameters.h"
#include "comedic/util.h"

namespace comedic {
namespace {

const char *const kInitials[] = {"b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
                                 "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s"};
const char *const kFinals[] = {"a", "o", "e", "i", "u", "ii", "ai", "ei", "ao", "ou",
                               "ia", "ie", "iao", "iou", "uo", "ve"};
// One character per syllable; the transcript only feeds the word counts.
const char32_t kHanzi[] = {U'我', U'真', U'正', U'开', U'始', U'有', U'一', U'点', U'自', U'信',
                           U'以', U'后', U'是', U'说', U'脱', U'口', U'秀', U'觉', U'得', U'长',
                           U'挺', U'好', U'的', U'今', U'天', U'来', U'讲', U'个', U'故', U'事'};

std::string utf8(char32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

bool is_final(const std::string &label) {
  return !label.empty() && label.back() >= '1' && label.back() <= '5';
}

// Relative F0 at position u in [0, 1] for a tone digit.
double tone_contour(char tone, double u) {
  switch (tone) {
    case '1': return 1.12;
    case '2': return 0.92 + 0.24 * u;
    case '3': return 0.95 - 0.15 * std::sin(std::numbers::pi * u);
    case '4': return 1.2 - 0.35 * u;
    default: return 1.0;
  }
}

int jitter(Rng &rng, int base) {
  return std::max(1, base + static_cast<int>(rng.index(3)) - 1);
}

std::string filler_text(const FillerEntry &e) {
  // Rough syllable count for the transcript: one character per final.
  std::string s;
  for (const auto &p : e.phonemes)
    if (is_final(p)) s += utf8(U'嗯');
  return s;
}

}  // namespace

std::vector<SpeakerStyle> comedian_styles() {
  return {
      {"A", 190.0, 3, 5, 24, 6, 0.30},
      {"B", 230.0, 3, 5, 22, 2, 0.35},
      {"C", 110.0, 6, 11, 50, 6, 0.25},
      {"D", 140.0, 4, 7, 26, 6, 0.28},
  };
}

std::vector<SpeakerStyle> generic_styles(int count) {
  std::vector<SpeakerStyle> out;
  for (int i = 0; i < count; ++i) {
    SpeakerStyle s;
    s.id = "G" + std::to_string(i + 1);
    s.f0_hz = 120.0 + 35.0 * i;
    s.initial_frames = 4;
    s.final_frames = 7 + (i % 2);
    s.pause_frames = 28;
    out.push_back(s);
  }
  return out;
}

FillerRegistry comedian_registry() {
  return FillerRegistry({
      {"B", {"n", "i3", "zh", "ii1", "d", "ao4", "b", "a5"}, "<spc1>"},
      {"A", {"er2"}, "<spc2>"},
  });
}

FixtureSpec overfit_spec() {
  FixtureSpec spec;
  spec.speakers = {comedian_styles()[1]};
  spec.clips_per_speaker = 2;
  spec.min_seconds = 1.0;
  spec.max_seconds = 1.2;
  spec.registry = comedian_registry();
  spec.filler_rate = 1.0;
  spec.seed = 11;
  return spec;
}

FixtureSpec comedy_spec(int clips_per_speaker) {
  FixtureSpec spec;
  spec.speakers = comedian_styles();
  spec.clips_per_speaker = clips_per_speaker;
  spec.registry = comedian_registry();
  spec.include_out_of_range = true;
  return spec;
}

FixtureSpec pretrain_spec(int speakers, int clips_per_speaker) {
  FixtureSpec spec;
  spec.speakers = generic_styles(speakers);
  spec.clips_per_speaker = clips_per_speaker;
  spec.filler_rate = 0.0;
  spec.seed = 3;
  return spec;
}

Waveform render_utterance(const Alignment &alignment, const SpeakerStyle &style,
                          const FeatureConfig &features, std::uint64_t seed) {
  Rng rng(seed);
  Waveform wave;
  wave.sample_rate = features.sample_rate;
  const double sr = features.sample_rate;
  const int ramp = static_cast<int>(0.005 * sr);
  double phase = 0.0;
  for (const auto &seg : alignment) {
    const int n = seg.frames * features.hop_length;
    const std::size_t begin = wave.samples.size();
    wave.samples.resize(begin + static_cast<std::size_t>(n), 0.0);
    double *out = wave.samples.data() + begin;
    if (seg.label == kPauseSymbol) {
      for (int i = 0; i < n; ++i) out[i] = 1e-4 * (rng.uniform() - 0.5);
      continue;
    }
    if (!is_final(seg.label)) {
      // Fricative-ish burst: first-order filtered noise.
      const double colour = 0.3 + 0.6 * static_cast<double>(fnv1a64(seg.label) % 100) / 100.0;
      double prev = 0.0;
      for (int i = 0; i < n; ++i) {
        prev = colour * prev + (1.0 - colour) * (2.0 * rng.uniform() - 1.0);
        out[i] = 0.5 * style.amplitude * prev;
      }
    } else {
      const std::uint64_t h = fnv1a64(seg.label.substr(0, seg.label.size() - 1));
      double weights[4];
      for (int k = 0; k < 4; ++k)
        weights[k] = 0.25 + 0.75 * static_cast<double>((h >> (8 * k)) & 0xff) / 255.0 / (k + 1);
      const char tone = seg.label.back();
      for (int i = 0; i < n; ++i) {
        const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        const double f0 = style.f0_hz * tone_contour(tone, u);
        phase += 2.0 * std::numbers::pi * f0 / sr;
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += weights[k] * std::sin((k + 1) * phase);
        out[i] = style.amplitude * v / 2.0;
      }
    }
    for (int i = 0; i < std::min(ramp, n / 2); ++i) {
      const double g = static_cast<double>(i) / ramp;
      out[i] *= g;
      out[n - 1 - i] *= g;
    }
  }
  return wave;
}

FixtureCorpus write_fixture(const FixtureSpec &spec, const std::filesystem::path &dir) {
  if (spec.speakers.empty() || spec.clips_per_speaker < 1)
    throw ConfigError("fixture: need at least one speaker and one clip");
  if (!(spec.min_seconds > 0.0) || spec.max_seconds < spec.min_seconds)
    throw ConfigError("fixture: bad clip length range");
  std::filesystem::create_directories(dir / "wavs");
  std::filesystem::create_directories(dir / "alignments");
  FixtureCorpus corpus;
  corpus.registry = spec.registry;
  Rng rng(spec.seed);
  const double frames_per_second =
      static_cast<double>(spec.features.sample_rate) / spec.features.hop_length;
  std::string manifest = "# utt\tspeaker\taudio\tduration_s\ttranscript\tphonemes\n";

  for (const auto &style : spec.speakers) {
    auto fillers = spec.registry.for_speaker(style.id);
    int clips = spec.clips_per_speaker;
    const bool extra = spec.include_out_of_range && &style == &spec.speakers.front();
    if (extra) clips += 2;
    for (int c = 0; c < clips; ++c) {
      double seconds = rng.uniform(spec.min_seconds, spec.max_seconds);
      if (extra && c == clips - 2) seconds = spec.min_seconds * 0.6;
      if (extra && c == clips - 1) seconds = spec.max_seconds * 1.15;
      const int target = static_cast<int>(seconds * frames_per_second);
      const bool with_filler = !fillers.empty() && rng.uniform() < spec.filler_rate;
      int reserve = 0;
      if (with_filler)
        reserve = static_cast<int>(fillers.front()->phonemes.size()) * style.filler_frames;

      Alignment ali;
      std::string transcript;
      int frames = 0, since_pause = 0, next_pause = 3 + static_cast<int>(rng.index(4));
      while (frames + reserve < target) {
        if (since_pause == next_pause) {
          ali.push_back({std::string(kPauseSymbol), jitter(rng, style.pause_frames)});
          transcript += "，";
          since_pause = 0;
          next_pause = 3 + static_cast<int>(rng.index(4));
        } else {
          if (rng.uniform() < 0.8)
            ali.push_back({kInitials[rng.index(std::size(kInitials))],
                           jitter(rng, style.initial_frames)});
          ali.push_back({std::string(kFinals[rng.index(std::size(kFinals))]) +
                             std::to_string(1 + rng.index(5)),
                         jitter(rng, style.final_frames)});
          transcript += utf8(kHanzi[rng.index(std::size(kHanzi))]);
          ++since_pause;
        }
        frames = 0;
        for (const auto &s : ali) frames += s.frames;
      }
      if (with_filler) {
        for (const auto &p : fillers.front()->phonemes) ali.push_back({p, style.filler_frames});
        transcript += filler_text(*fillers.front());
      }
      transcript += "。";

      UtteranceRecord rec;
      rec.utterance_id = style.id + "_" + (c < 9 ? "00" : c < 99 ? "0" : "") + std::to_string(c + 1);
      rec.speaker_id = style.id;
      const std::string rel = "wavs/" + rec.utterance_id + ".wav";
      rec.audio_path = (dir / rel).string();
      rec.transcript = transcript;
      for (const auto &s : ali) rec.phonemes.push_back(s.label);
      Waveform wave = render_utterance(ali, style, spec.features, rng.next());
      rec.duration_s = static_cast<double>(wave.samples.size()) / wave.sample_rate;
      write_wav(rec.audio_path, wave);
      write_file((dir / "alignments" / (rec.utterance_id + ".ali")).string(),
                 format_alignment(ali));
      UtteranceRecord line = rec;
      line.audio_path = rel;
      manifest += format_manifest_line(line) + "\n";
      corpus.alignments[rec.utterance_id] = std::move(ali);
      corpus.records.push_back(std::move(rec));
    }
  }
  corpus.manifest = dir / "manifest.tsv";
  write_file(corpus.manifest.string(), manifest);
  write_file((dir / "registry.tsv").string(), spec.registry.serialize());
  return corpus;
}

}  // namespace comedic
