// core/src/phoneme_frontend.cc
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

#include "comedic/phoneme_frontend.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "comedic/error.h"
#include "comedic/util.h"

namespace comedic {

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::kBase:
      return "base";
    case SymbolKind::kPause:
      return "pause";
    case SymbolKind::kSpecialToken:
      return "special_token";
  }
  return "base";
}

namespace {

SymbolKind kind_from_string(std::string_view s) {
  if (s == "base") return SymbolKind::kBase;
  if (s == "pause") return SymbolKind::kPause;
  if (s == "special_token") return SymbolKind::kSpecialToken;
  throw IoError("unknown symbol kind '" + std::string(s) + "'");
}

bool is_base_label(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label)
    if (c == '<' || c == '>' || c == ' ' || c == '\t' || c == '\n')
      return false;
  return true;
}

bool starts_with_at(std::span<const std::string> seq, std::size_t pos,
                    const LabelSequence &pattern) {
  if (pos + pattern.size() > seq.size()) return false;
  for (std::size_t k = 0; k < pattern.size(); ++k)
    if (seq[pos + k] != pattern[k]) return false;
  return true;
}

bool is_prefix(const LabelSequence &a, const LabelSequence &b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

bool is_special_token_label(std::string_view label) {
  constexpr std::string_view kOpen = "<spc";
  if (label.size() < kOpen.size() + 2) return false;
  if (label.substr(0, kOpen.size()) != kOpen || label.back() != '>')
    return false;
  std::string_view digits =
      label.substr(kOpen.size(), label.size() - kOpen.size() - 1);
  if (digits.empty() || digits.front() == '0') return false;
  return std::all_of(digits.begin(), digits.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

// ---------------------------------------------------------------------------
// FillerRegistry

FillerRegistry::FillerRegistry(std::vector<FillerEntry> entries)
    : entries_(std::move(entries)) {
  std::set<std::string> tokens;
  for (const FillerEntry &e : entries_) {
    if (e.speaker.empty())
      throw ConfigError("filler registry: empty speaker id");
    if (!is_special_token_label(e.token))
      throw ConfigError("filler registry: token '" + e.token +
                        "' is not of the form <spcN>");
    if (e.phonemes.empty())
      throw ConfigError("filler registry: token " + e.token +
                        " has an empty filler");
    for (const std::string &p : e.phonemes)
      if (!is_base_label(p))
        throw ConfigError("filler registry: token " + e.token +
                          " has invalid filler phoneme '" + p + "'");
    if (!tokens.insert(e.token).second)
      throw ConfigError("filler registry: token " + e.token +
                        " is used more than once");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (i == j || entries_[i].speaker != entries_[j].speaker) continue;
      if (is_prefix(entries_[i].phonemes, entries_[j].phonemes))
        throw ConfigError("filler registry: filler of " + entries_[i].token +
                          " is a prefix of the filler of " +
                          entries_[j].token + " for speaker " +
                          entries_[i].speaker);
    }
}

FillerRegistry FillerRegistry::parse(std::istream &in,
                                     const std::string &source) {
  std::vector<FillerEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body, '\t');
    if (fields.size() != 3)
      throw IoError(source + ":" + std::to_string(line_no) +
                    ": expected speaker<TAB>token<TAB>phonemes");
    FillerEntry e;
    e.speaker = std::string(trim(fields[0]));
    e.token = std::string(trim(fields[1]));
    e.phonemes = split_labels(fields[2]);
    entries.push_back(std::move(e));
  }
  return FillerRegistry(std::move(entries));
}

FillerRegistry FillerRegistry::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in, "<registry>");
}

FillerRegistry FillerRegistry::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filler registry " + path.string());
  return parse(in, path.string());
}

std::string FillerRegistry::serialize() const {
  std::string out;
  for (const FillerEntry &e : entries_)
    out += e.speaker + "\t" + e.token + "\t" + join_labels(e.phonemes) + "\n";
  return out;
}

std::vector<const FillerEntry *> FillerRegistry::for_speaker(
    std::string_view speaker) const {
  std::vector<const FillerEntry *> out;
  for (const FillerEntry &e : entries_)
    if (e.speaker == speaker) out.push_back(&e);
  return out;
}

const FillerEntry *FillerRegistry::find_token(std::string_view token) const {
  for (const FillerEntry &e : entries_)
    if (e.token == token) return &e;
  return nullptr;
}

FillerRegistry FillerRegistry::restricted_to(std::string_view speaker) const {
  std::vector<FillerEntry> kept;
  for (const FillerEntry &e : entries_)
    if (e.speaker == speaker) kept.push_back(e);
  return FillerRegistry(std::move(kept));
}

// ---------------------------------------------------------------------------
// SymbolTable

SymbolTable::SymbolTable(std::vector<PhonemeSymbol> symbols)
    : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const PhonemeSymbol &s = symbols_[i];
    if (s.id != static_cast<int>(i))
      throw ConfigError("symbol table: ids must be contiguous from 0");
    if (s.kind == SymbolKind::kSpecialToken) {
      if (!is_special_token_label(s.text))
        throw ConfigError("symbol table: bad special token '" + s.text + "'");
    } else if (!is_base_label(s.text)) {
      throw ConfigError("symbol table: bad label '" + s.text + "'");
    }
    if (!lookup_.emplace(s.text, s.id).second)
      throw ConfigError("symbol table: duplicate label '" + s.text + "'");
  }
}

std::optional<int> SymbolTable::find(std::string_view label) const {
  auto it = lookup_.find(std::string(label));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

const PhonemeSymbol &SymbolTable::at(int id) const {
  if (id < 0 || id >= static_cast<int>(symbols_.size()))
    throw InputError("symbol id " + std::to_string(id) + " out of range");
  return symbols_[static_cast<std::size_t>(id)];
}

std::vector<int> SymbolTable::encode(std::span<const std::string> labels) const {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto id = find(labels[i]);
    if (!id)
      throw InputError("unknown phoneme label '" + labels[i] +
                       "' at position " + std::to_string(i));
    ids.push_back(*id);
  }
  return ids;
}

LabelSequence SymbolTable::decode(std::span<const int> ids) const {
  LabelSequence out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(at(id).text);
  return out;
}

std::vector<std::string> SymbolTable::special_tokens() const {
  std::vector<std::string> out;
  for (const PhonemeSymbol &s : symbols_)
    if (s.kind == SymbolKind::kSpecialToken) out.push_back(s.text);
  return out;
}

std::string SymbolTable::serialize() const {
  std::string out = "comedic-symbols 1\n";
  for (const PhonemeSymbol &s : symbols_)
    out += std::to_string(s.id) + "\t" + std::string(to_string(s.kind)) +
           "\t" + s.text + "\n";
  return out;
}

SymbolTable SymbolTable::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != "comedic-symbols 1")
    throw IoError("symbol table: missing header");
  std::vector<PhonemeSymbol> symbols;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 3) throw IoError("symbol table: malformed line '" + line + "'");
    PhonemeSymbol s;
    try {
      s.id = std::stoi(f[0]);
    } catch (const std::exception &) {
      throw IoError("symbol table: bad id '" + f[0] + "'");
    }
    s.kind = kind_from_string(f[1]);
    s.text = f[2];
    symbols.push_back(std::move(s));
  }
  return SymbolTable(std::move(symbols));
}

std::uint64_t SymbolTable::hash() const { return fnv1a64(serialize()); }

bool SymbolTable::is_superset_of(const SymbolTable &other) const {
  for (const PhonemeSymbol &s : other.symbols_)
    if (!find(s.text)) return false;
  return true;
}

SymbolTable build_symbol_table(std::span<const std::string> base_inventory,
                               const FillerRegistry &registry) {
  if (base_inventory.empty())
    throw ConfigError("symbol table: base inventory is empty");
  std::vector<PhonemeSymbol> symbols;
  std::set<std::string> seen;
  bool has_pause = false;
  for (const std::string &label : base_inventory) {
    if (!is_base_label(label))
      throw ConfigError("symbol table: invalid base label '" + label + "'");
    if (!seen.insert(label).second)
      throw ConfigError("symbol table: duplicate base label '" + label + "'");
    SymbolKind kind = SymbolKind::kBase;
    if (label == kPauseSymbol) {
      kind = SymbolKind::kPause;
      has_pause = true;
    }
    symbols.push_back({label, static_cast<int>(symbols.size()), kind});
  }
  if (!has_pause) {
    seen.insert(std::string(kPauseSymbol));
    symbols.push_back({std::string(kPauseSymbol),
                       static_cast<int>(symbols.size()), SymbolKind::kPause});
  }
  std::vector<std::string> tokens;
  for (const FillerEntry &e : registry.entries()) tokens.push_back(e.token);
  std::sort(tokens.begin(), tokens.end());
  for (const std::string &t : tokens) {
    if (!seen.insert(t).second)
      throw ConfigError("symbol table: duplicate label '" + t + "'");
    symbols.push_back(
        {t, static_cast<int>(symbols.size()), SymbolKind::kSpecialToken});
  }
  return SymbolTable(std::move(symbols));
}

// ---------------------------------------------------------------------------
// Replacement

FillerReplacement replace_fillers_with_spans(
    std::span<const std::string> phonemes, std::string_view speaker,
    const FillerRegistry &registry, const SymbolTable *known) {
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    const std::string &p = phonemes[i];
    bool ok = is_base_label(p);
    if (ok && known != nullptr) {
      auto id = known->find(p);
      ok = id.has_value() &&
           known->at(*id).kind != SymbolKind::kSpecialToken;
    }
    if (!ok)
      throw InputError("unknown phoneme label '" + p + "' at position " +
                       std::to_string(i));
  }
  const auto candidates = registry.for_speaker(speaker);
  FillerReplacement out;
  std::size_t i = 0;
  while (i < phonemes.size()) {
    const FillerEntry *best = nullptr;
    for (const FillerEntry *e : candidates)
      if (starts_with_at(phonemes, i, e->phonemes) &&
          (best == nullptr || e->phonemes.size() > best->phonemes.size()))
        best = e;
    if (best != nullptr) {
      out.labels.push_back(best->token);
      out.spans.emplace_back(i, best->phonemes.size());
      i += best->phonemes.size();
    } else {
      out.labels.push_back(phonemes[i]);
      out.spans.emplace_back(i, 1);
      ++i;
    }
  }
  return out;
}

LabelSequence replace_fillers(std::span<const std::string> phonemes,
                              std::string_view speaker,
                              const FillerRegistry &registry,
                              const SymbolTable *known) {
  return replace_fillers_with_spans(phonemes, speaker, registry, known).labels;
}

LabelSequence expand_special_tokens(std::span<const std::string> phonemes,
                                    const FillerRegistry &registry) {
  LabelSequence out;
  out.reserve(phonemes.size());
  for (std::size_t i = 0; i < phonemes.size(); ++i) {
    const std::string &p = phonemes[i];
    if (p.find('<') == std::string::npos) {
      out.push_back(p);
      continue;
    }
    const FillerEntry *e = registry.find_token(p);
    if (e == nullptr)
      throw InputError("unregistered special token '" + p + "' at position " +
                       std::to_string(i));
    out.insert(out.end(), e->phonemes.begin(), e->phonemes.end());
  }
  return out;
}

LabelSequence split_labels(std::string_view text) {
  LabelSequence out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' ||
            text[i] == '\n'))
      ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\r' && text[i] != '\n')
      ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string join_labels(std::span<const std::string> labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ' ';
    out += labels[i];
  }
  return out;
}

}  // namespace comedic
