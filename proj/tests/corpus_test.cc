// tests/corpus_test.cc
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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "comedic/error.h"
#include "comedic/parameters.h"

namespace comedic {
namespace {

std::vector<UtteranceRecord> parse(const std::string &text) {
  std::istringstream in(text);
  return parse_manifest(in, "m.tsv", "/data");
}

std::string line(const std::string &id, const std::string &spk, const std::string &dur) {
  return id + "\t" + spk + "\twavs/" + id + ".wav\t" + dur + "\t你好。\tn i3 h ao3\n";
}

TEST(Manifest, ParsesRecordsInOrder) {
  std::string text = "# header\n";
  for (int i = 0; i < 6; ++i) text += line("u" + std::to_string(i), i % 2 ? "A" : "B", "4.5");
  auto records = parse(text);
  ASSERT_EQ(records.size(), 6u);
  EXPECT_EQ(records[3].utterance_id, "u3");
  EXPECT_EQ(records[0].audio_path, "/data/wavs/u0.wav");
  EXPECT_EQ(records[0].phonemes, split_labels("n i3 h ao3"));
  EXPECT_DOUBLE_EQ(records[0].duration_s, 4.5);
  auto again = parse("# header\n" + [&] {
    std::string t;
    for (const auto &r : records) {
      UtteranceRecord copy = r;
      copy.audio_path = "wavs/" + r.utterance_id + ".wav";
      t += format_manifest_line(copy) + "\n";
    }
    return t;
  }());
  EXPECT_EQ(again.size(), records.size());
}

TEST(Manifest, MissingFieldNamesLine) {
  try {
    parse(line("a", "A", "3.0") + "b\tA\twavs/b.wav\t你好。\tn i3\n");
    FAIL();
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find("m.tsv:2"), std::string::npos) << e.what();
  }
}

TEST(Manifest, RejectsDuplicatesAndBadValues) {
  EXPECT_THROW(parse(line("a", "A", "3.0") + line("a", "B", "4.0")), IoError);
  EXPECT_THROW(parse(line("a", "A", "0")), IoError);
  EXPECT_THROW(parse(line("a", "A", "-1")), IoError);
  EXPECT_THROW(parse(line("a", "A", "x")), IoError);
  EXPECT_THROW(parse("a\tA\tw.wav\t3.0\t你\t \n"), IoError);
}

TEST(ClipLengths, WarningsOnlyOutsideRange) {
  std::vector<UtteranceRecord> records(1);
  records[0].utterance_id = "x";
  records[0].duration_s = 5.0;
  EXPECT_TRUE(validate_clip_lengths(records).empty());
  records[0].duration_s = 2.1;
  EXPECT_EQ(validate_clip_lengths(records).size(), 1u);

  Rng rng(3);
  std::vector<UtteranceRecord> many(120);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < many.size(); ++i) {
    many[i].utterance_id = "u" + std::to_string(i);
    many[i].duration_s = rng.uniform(3.0, 8.0);
  }
  for (std::size_t i : {7u, 50u, 111u}) many[i].duration_s = i % 2 ? 8.4 : 1.9;
  for (const auto &r : many) expected += (r.duration_s < 3.0 || r.duration_s > 8.0);
  EXPECT_EQ(expected, 3u);
  EXPECT_EQ(validate_clip_lengths(many).size(), expected);
}

TEST(Alignment, ParseFormatRoundTrip) {
  std::istringstream in("# c\nsp 12\nn 3\ni3 7\n");
  Alignment a = parse_alignment(in, "x.ali");
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[2].label, "i3");
  EXPECT_EQ(a[2].frames, 7);
  std::istringstream again(format_alignment(a));
  EXPECT_EQ(parse_alignment(again, "y").size(), 3u);
  std::istringstream bad("sp 0\n");
  EXPECT_THROW(parse_alignment(bad, "z"), IoError);
  std::istringstream bad2("sp\n");
  EXPECT_THROW(parse_alignment(bad2, "z"), IoError);
}

TEST(CountWords, CharactersWithoutPunctuation) {
  EXPECT_EQ(count_words("我真正开始有一点自信以后，是我开始说脱口秀以后。"), 22);
  EXPECT_EQ(count_words("你知道吧！？ …"), 4);
  EXPECT_EQ(count_words(""), 0);
  EXPECT_EQ(count_words("ab, c."), 3);
}

UtteranceRecord record(const std::string &id, const std::string &spk, double dur,
                       const std::string &text) {
  UtteranceRecord r;
  r.utterance_id = id;
  r.speaker_id = spk;
  r.duration_s = dur;
  r.transcript = text;
  r.phonemes = {"a1"};
  return r;
}

TEST(Statistics, SingleClipWithoutPauses) {
  std::vector<UtteranceRecord> records{record("u", "S", 2.0, "一二三四五六七八九十")};
  std::map<std::string, UtteranceAlignment> ali;
  ali["u"].segments = {{"a1", 10}};
  auto stats = compute_statistics(records, ali);
  EXPECT_DOUBLE_EQ(stats["S"].words_per_second, 5.0);
  EXPECT_EQ(stats["S"].avg_pause_ms, 0.0);
  EXPECT_FALSE(stats["S"].pause_defined);
  EXPECT_EQ(stats["S"].clips, 1);
}

TEST(Statistics, HandPlacedPauses) {
  StatisticsOptions opts;
  opts.frame_shift_ms = 10.0;
  std::vector<UtteranceRecord> records{record("u", "S", 2.0, "一二")};
  std::map<std::string, UtteranceAlignment> ali;
  // 100 ms and 300 ms pauses; a 30 ms pause falls under the 50 ms floor.
  ali["u"].segments = {{"a1", 20}, {"sp", 10}, {"a1", 20}, {"sp", 30}, {"a1", 5}, {"sp", 3}};
  auto stats = compute_statistics(records, ali, opts);
  EXPECT_DOUBLE_EQ(stats["S"].avg_pause_ms, 200.0);
  EXPECT_TRUE(stats["S"].pause_defined);
}

TEST(Statistics, VoicedPitchAndSpeechEnergy) {
  std::vector<UtteranceRecord> records{record("u", "S", 1.0, "一")};
  std::map<std::string, UtteranceAlignment> ali;
  auto &u = ali["u"];
  u.segments = {{"a1", 2}, {"sp", 2}};
  u.tracks.pitch = {1.0, 0.0, 5.0, 0.0};
  u.tracks.voiced = {true, false, true, false};
  u.tracks.energy = {2.0, 4.0, 100.0, 100.0};
  auto s = compute_statistics(records, ali)["S"];
  EXPECT_DOUBLE_EQ(s.avg_pitch, 3.0);
  EXPECT_DOUBLE_EQ(s.avg_energy, 3.0);
  StatisticsOptions all;
  all.pitch_voiced_only = false;
  all.energy_speech_only = false;
  auto t = compute_statistics(records, ali, all)["S"];
  EXPECT_DOUBLE_EQ(t.avg_pitch, 1.5);
  EXPECT_DOUBLE_EQ(t.avg_energy, 51.5);
}

TEST(Statistics, MissingAlignmentNamesUtterance) {
  std::vector<UtteranceRecord> records{record("lost", "S", 1.0, "一")};
  try {
    compute_statistics(records, {});
    FAIL();
  } catch (const InputError &e) {
    EXPECT_NE(std::string(e.what()).find("lost"), std::string::npos);
  }
}

TEST(Statistics, PermutationInvariantAndMergeable) {
  Rng rng(17);
  std::vector<UtteranceRecord> records;
  std::map<std::string, UtteranceAlignment> ali;
  for (int i = 0; i < 40; ++i) {
    const std::string id = "u" + std::to_string(i);
    std::string text;
    for (std::size_t k = 0, n = 1 + rng.index(30); k < n; ++k) text += "字";
    records.push_back(record(id, i % 3 ? "A" : "B", rng.uniform(3.0, 8.0), text));
    auto &a = ali[id];
    a.segments = {{"a1", 5 + static_cast<int>(rng.index(10))},
                  {"sp", 3 + static_cast<int>(rng.index(40))}};
    for (int f = 0; f < a.segments[0].frames + a.segments[1].frames; ++f) {
      a.tracks.pitch.push_back(rng.uniform(-2, 2));
      a.tracks.energy.push_back(rng.uniform(-2, 2));
      a.tracks.voiced.push_back(rng.uniform() < 0.7);
    }
  }
  auto base = compute_statistics(records, ali);
  auto shuffled = records;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[3], shuffled[20]);
  auto perm = compute_statistics(shuffled, ali);
  for (const auto &[spk, s] : base) {
    EXPECT_EQ(s.words, perm[spk].words);
    EXPECT_NEAR(s.total_duration_s, perm[spk].total_duration_s, 1e-9);
    EXPECT_NEAR(s.avg_pause_ms, perm[spk].avg_pause_ms, 1e-9);
    EXPECT_NEAR(s.avg_pitch, perm[spk].avg_pitch, 1e-9);
  }
  std::vector<UtteranceRecord> first(records.begin(), records.begin() + 15);
  std::vector<UtteranceRecord> second(records.begin() + 15, records.end());
  auto a1 = accumulate_statistics(first, ali);
  auto a2 = accumulate_statistics(second, ali);
  for (auto &[spk, acc] : a1) {
    SpeakerAccumulator merged = acc;
    merged.merge(a2[spk]);
    const auto m = merged.finalize();
    EXPECT_EQ(m.words, base[spk].words);
    EXPECT_NEAR(m.total_duration_s, base[spk].total_duration_s, 1e-9);
    EXPECT_NEAR(m.words_per_second, base[spk].words_per_second, 1e-12);
    EXPECT_NEAR(m.words_per_second, static_cast<double>(m.words) / m.total_duration_s, 1e-12);
  }
}

TEST(TrackNormalizer, VoicedPitchMoments) {
  auto n = TrackNormalizer::fit({{100.0, 0.0, 200.0}}, {{1.0, 3.0}});
  EXPECT_DOUBLE_EQ(n.pitch_mean, 150.0);
  EXPECT_DOUBLE_EQ(n.pitch_std, 50.0);
  EXPECT_DOUBLE_EQ(n.energy_mean, 2.0);
  auto t = n.apply({100.0, 0.0, 200.0}, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(t.pitch[0], -1.0);
  EXPECT_DOUBLE_EQ(t.pitch[1], 0.0);
  EXPECT_FALSE(t.voiced[1]);
  EXPECT_DOUBLE_EQ(t.energy[1], 1.0);
}

TEST(StatisticsReport, TableAndJsonMentionFillers) {
  std::map<std::string, SpeakerStatistics> stats;
  stats["A"].clips = 1;
  stats["B"].clips = 1;
  FillerRegistry registry({{"B", {"n", "i3"}, "<spc1>"}});
  const std::string table = format_statistics_table(stats, registry);
  EXPECT_NE(table.find("n i3"), std::string::npos);
  EXPECT_NE(table.find("None"), std::string::npos);
  EXPECT_NE(statistics_report_json(stats, registry).find("\"B\""), std::string::npos);
}

}  // namespace
}  // namespace comedic
