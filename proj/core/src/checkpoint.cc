// core/src/checkpoint.cc
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

#include "comedic/checkpoint.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'C', 'M', 'D', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  template <typename T>
  void pod(const T &v) {
    const auto *p = reinterpret_cast<const char *>(&v);
    out_.append(p, sizeof(T));
  }
  void bytes(const std::string &s) {
    pod(static_cast<std::uint64_t>(s.size()));
    out_ += s;
  }
  void matrix(const Matrix &m) {
    pod(static_cast<std::uint64_t>(m.rows()));
    pod(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) pod(m(r, c));
  }
  void params(const ParameterSet &p) {
    pod(static_cast<std::uint64_t>(p.size()));
    for (const auto &[name, value] : p) {
      bytes(name);
      matrix(value);
    }
  }
  std::string &str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string &data, std::size_t end, std::string source)
      : data_(data), end_(end), source_(std::move(source)) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Matrix matrix() {
    const auto rows = pod<std::uint64_t>();
    const auto cols = pod<std::uint64_t>();
    if (rows > (1ULL << 32) || cols > (1ULL << 32)) fail("implausible matrix shape");
    need(rows * cols * sizeof(double));
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = pod<double>();
    return m;
  }
  ParameterSet params() {
    ParameterSet p;
    const auto n = pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string name = bytes();
      p.add(name, matrix());
    }
    return p;
  }
  std::size_t position() const { return pos_; }
  [[noreturn]] void fail(const std::string &what) const {
    throw IoError(source_ + ": " + what);
  }

 private:
  void need(std::uint64_t n) const {
    if (n > end_ - pos_) fail("truncated checkpoint");
  }
  const std::string &data_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string source_;
};

}  // namespace

int Checkpoint::speaker_index(const std::string &speaker) const {
  auto it = std::find(speakers.begin(), speakers.end(), speaker);
  if (it == speakers.end()) throw InputError("unknown speaker '" + speaker + "'");
  return static_cast<int>(it - speakers.begin());
}

std::string serialize_checkpoint(const Checkpoint &ck) {
  json header{{"config", json::parse(run_config_to_json(ck.config))},
              {"fingerprint", hex64(architecture_fingerprint(ck.config.model))},
              {"symbol_hash", hex64(ck.symbols.hash())},
              {"step", ck.step},
              {"stage", ck.stage},
              {"adam_steps", ck.adam_steps},
              {"speakers", ck.speakers},
              {"normalizer",
               {ck.normalizer.pitch_mean, ck.normalizer.pitch_std, ck.normalizer.energy_mean,
                ck.normalizer.energy_std}}};
  Writer w;
  w.str().append(kMagic, sizeof(kMagic));
  w.pod(kCheckpointVersion);
  w.bytes(header.dump());
  w.bytes(ck.symbols.serialize());
  w.bytes(ck.registry.serialize());
  w.params(ck.params);
  w.params(ck.adam_m);
  w.params(ck.adam_v);
  w.pod(static_cast<std::uint64_t>(ck.references.size()));
  for (const auto &ref : ck.references) {
    w.bytes(ref.utterance_id);
    w.bytes(ref.speaker_id);
    w.matrix(ref.mel);
  }
  const std::uint64_t digest = fnv1a64(w.str());
  w.pod(digest);
  return std::move(w.str());
}

Checkpoint deserialize_checkpoint(const std::string &bytes, const std::string &source) {
  constexpr std::size_t kTrailer = sizeof(std::uint64_t);
  if (bytes.size() < sizeof(kMagic) + sizeof(std::uint32_t) + kTrailer ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError(source + ": not a comedic checkpoint");
  const std::size_t body = bytes.size() - kTrailer;
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, kTrailer);
  if (fnv1a64(std::string_view(bytes.data(), body)) != stored)
    throw IoError(source + ": checkpoint content hash mismatch (corrupt file)");

  Reader r(bytes, body, source);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.pod<char>();
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion)
    r.fail("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  json header;
  try {
    header = json::parse(r.bytes());
    ck.config = parse_run_config(header.at("config").dump());
    ck.step = header.at("step").get<int>();
    ck.stage = header.at("stage").get<std::string>();
    ck.adam_steps = header.at("adam_steps").get<int>();
    ck.speakers = header.at("speakers").get<std::vector<std::string>>();
    const auto norm = header.at("normalizer").get<std::vector<double>>();
    if (norm.size() != 4) r.fail("bad normaliser record");
    ck.normalizer = {norm[0], norm[1], norm[2], norm[3]};
  } catch (const json::exception &e) {
    r.fail(std::string("bad checkpoint header: ") + e.what());
  } catch (const ConfigError &e) {
    r.fail(std::string("bad checkpoint config: ") + e.what());
  }
  if (header.at("fingerprint").get<std::string>() !=
      hex64(architecture_fingerprint(ck.config.model)))
    r.fail("architecture fingerprint mismatch");
  ck.symbols = SymbolTable::deserialize(r.bytes());
  if (header.at("symbol_hash").get<std::string>() != hex64(ck.symbols.hash()))
    r.fail("symbol table hash mismatch");
  ck.registry = FillerRegistry::parse(r.bytes());
  ck.params = r.params();
  ck.adam_m = r.params();
  ck.adam_v = r.params();
  const auto refs = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < refs; ++i) {
    ReferenceClip clip;
    clip.utterance_id = r.bytes();
    clip.speaker_id = r.bytes();
    clip.mel = r.matrix();
    ck.references.push_back(std::move(clip));
  }
  if (r.position() != body) r.fail("trailing bytes after checkpoint body");
  if (ck.config.model.symbol_count != static_cast<int>(ck.symbols.size()))
    r.fail("symbol count in config does not match the symbol table");
  return ck;
}

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path) {
  write_file(path.string(), serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  return deserialize_checkpoint(read_file(path.string()), path.string());
}

}  // namespace comedic
