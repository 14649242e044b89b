// core/src/synthesis.cc
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

#include "comedic/synthesis.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {
namespace {

constexpr char kMelMagic[8] = {'C', 'M', 'D', 'M', 'E', 'L', '0', '1'};

std::vector<double> average_ranks(const std::vector<int> &v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

template <typename T>
void put_le(std::string &out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  out.append(reinterpret_cast<const char *>(&v), sizeof(T));
}

}  // namespace

DurationTrace DurationTrace::from_durations(std::string name, std::span<const std::string> labels,
                                            std::span<const int> durations) {
  if (labels.size() != durations.size())
    throw InputError("duration trace: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(durations.size()) + " durations");
  DurationTrace t;
  t.name = std::move(name);
  int start = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (durations[i] < 0) throw InputError("duration trace: negative duration");
    t.segments.push_back({labels[i], start, durations[i]});
    start += durations[i];
  }
  return t;
}

int DurationTrace::total_frames() const {
  int n = 0;
  for (const auto &s : segments) n += s.frames;
  return n;
}

LabelSequence DurationTrace::labels() const {
  LabelSequence out;
  for (const auto &s : segments) out.push_back(s.label);
  return out;
}

bool DurationTrace::contiguous() const {
  int expect = 0;
  for (const auto &s : segments) {
    if (s.start != expect || s.frames < 0) return false;
    expect += s.frames;
  }
  return true;
}

std::string DurationTrace::serialize() const {
  std::string out = "# " + name + "\n";
  for (const auto &s : segments)
    out += s.label + "\t" + std::to_string(s.start) + "\t" + std::to_string(s.frames) + "\n";
  return out;
}

DurationTrace DurationTrace::parse(std::string_view text, const std::string &source) {
  DurationTrace t;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (t.name.empty()) t.name = std::string(trim(line.substr(1)));
      continue;
    }
    auto f = split(line, '\t');
    if (f.size() != 3)
      throw IoError(source + ":" + std::to_string(line_no) + ": expected label, start, frames");
    DurationSegment seg;
    seg.label = std::string(trim(f[0]));
    try {
      seg.start = std::stoi(std::string(f[1]));
      seg.frames = std::stoi(std::string(f[2]));
    } catch (const std::exception &) {
      throw IoError(source + ":" + std::to_string(line_no) + ": bad integer");
    }
    t.segments.push_back(std::move(seg));
  }
  if (t.segments.empty()) throw InputError(source + ": empty duration trace");
  if (!t.contiguous()) throw IoError(source + ": trace segments are not contiguous from 0");
  return t;
}

DurationTrace DurationTrace::load(const std::filesystem::path &path) {
  return parse(read_file(path.string()), path.string());
}

DurationComparison compare_durations(const DurationTrace &a, const DurationTrace &b) {
  if (a.labels() != b.labels())
    throw InputError("compare_durations: traces '" + a.name + "' and '" + b.name +
                     "' have different label sequences");
  if (a.segments.empty()) throw InputError("compare_durations: empty traces");
  DurationComparison r;
  std::vector<int> da, db;
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    da.push_back(a.segments[i].frames);
    db.push_back(b.segments[i].frames);
    r.deltas.push_back(db.back() - da.back());
  }
  r.total_delta = b.total_frames() - a.total_frames();
  const auto ra = average_ranks(da), rb = average_ranks(db);
  const double n = static_cast<double>(ra.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 && sbb == 0.0) r.rank_correlation = 1.0;
  else if (saa == 0.0 || sbb == 0.0) r.rank_correlation = 0.0;
  else r.rank_correlation = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return r;
}

std::string comparison_json(const DurationComparison &report) {
  nlohmann::json j{{"deltas", report.deltas},
                   {"total_delta", report.total_delta},
                   {"rank_correlation", report.rank_correlation}};
  return j.dump();
}

Synthesizer::Synthesizer(Checkpoint checkpoint)
    : checkpoint_(std::move(checkpoint)), model_(checkpoint_.model()) {}

LabelSequence Synthesizer::prepare_labels(const SynthesisRequest &request) const {
  if (request.phonemes.empty()) throw InputError("synthesize: empty phoneme sequence");
  const auto &symbols = checkpoint_.symbols;
  LabelSequence out, run;
  auto flush = [&] {
    if (run.empty()) return;
    auto replaced = replace_fillers(run, request.speaker, checkpoint_.registry, &symbols);
    out.insert(out.end(), replaced.begin(), replaced.end());
    run.clear();
  };
  for (const auto &label : request.phonemes) {
    if (is_special_token_label(label)) {
      flush();
      if (!symbols.find(label))
        throw InputError("unknown phoneme label '" + label +
                         "': special token is not registered in this checkpoint");
      out.push_back(label);
    } else {
      run.push_back(label);
    }
  }
  flush();
  return out;
}

const ReferenceClip &Synthesizer::pick_reference(const SynthesisRequest &request) const {
  const auto &bank = checkpoint_.references;
  if (request.reference) {
    for (const auto &clip : bank)
      if (clip.utterance_id == *request.reference) return clip;
    throw InputError("reference clip '" + *request.reference + "' is not in the checkpoint");
  }
  std::vector<const ReferenceClip *> mine;
  for (const auto &clip : bank)
    if (clip.speaker_id == request.speaker) mine.push_back(&clip);
  if (mine.empty())
    throw InputError("no reference clips for speaker '" + request.speaker + "'");
  Rng rng(request.seed);
  return *mine[rng.index(mine.size())];
}

SynthesisResult Synthesizer::synthesize(const SynthesisRequest &request) const {
  SynthesisResult result;
  const int speaker = checkpoint_.speaker_index(request.speaker);
  result.labels = prepare_labels(request);
  ModelInput in;
  in.ids = checkpoint_.symbols.encode(result.labels);
  in.speaker_index = speaker;
  if (checkpoint_.config.model.use_prosody_encoder) {
    const ReferenceClip &ref = pick_reference(request);
    in.reference_mel = ref.mel;
    result.reference_id = ref.utterance_id;
  }
  AcousticOutput out = model_.run(in, Mode::kInfer);
  result.mel = std::move(out.mel);
  result.trace = DurationTrace::from_durations(request.speaker, result.labels, out.durations_used);
  if (request.waveform)
    result.waveform = griffin_lim(result.mel, checkpoint_.config.features,
                                  request.griffin_lim_iterations, request.seed);
  return result;
}

void write_mel(const std::filesystem::path &path, const Matrix &mel) {
  std::string out(kMelMagic, sizeof(kMelMagic));
  put_le(out, static_cast<std::uint32_t>(mel.rows()));
  put_le(out, static_cast<std::uint32_t>(mel.cols()));
  for (Eigen::Index r = 0; r < mel.rows(); ++r)
    for (Eigen::Index c = 0; c < mel.cols(); ++c) put_le(out, static_cast<float>(mel(r, c)));
  write_file(path.string(), out);
}

Matrix read_mel(const std::filesystem::path &path) {
  const std::string data = read_file(path.string());
  const std::size_t head = sizeof(kMelMagic) + 8;
  if (data.size() < head || std::memcmp(data.data(), kMelMagic, sizeof(kMelMagic)) != 0)
    throw IoError(path.string() + ": not a mel file");
  std::uint32_t rows = 0, cols = 0;
  std::memcpy(&rows, data.data() + 8, 4);
  std::memcpy(&cols, data.data() + 12, 4);
  if (data.size() != head + std::size_t{rows} * cols * 4)
    throw IoError(path.string() + ": mel payload size mismatch");
  Matrix mel(rows, cols);
  const char *p = data.data() + head;
  for (Eigen::Index r = 0; r < mel.rows(); ++r)
    for (Eigen::Index c = 0; c < mel.cols(); ++c) {
      float v;
      std::memcpy(&v, p, 4);
      p += 4;
      mel(r, c) = v;
    }
  return mel;
}

std::string mel_to_text(const Matrix &mel) {
  std::ostringstream os;
  os.precision(7);
  for (Eigen::Index r = 0; r < mel.rows(); ++r) {
    for (Eigen::Index c = 0; c < mel.cols(); ++c) os << (c ? " " : "") << mel(r, c);
    os << '\n';
  }
  return os.str();
}

}  // namespace comedic
