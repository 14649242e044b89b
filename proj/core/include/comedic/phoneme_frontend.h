// core/include/comedic/phoneme_frontend.h
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

// Symbol inventory and personal-filler handling. Transcripts arrive already
// phonemised (pinyin initials/finals with tone digits). A speaker's habitual
// filler phrase is collapsed into one special token.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace comedic {

inline constexpr std::string_view kPauseSymbol = "sp";

enum class SymbolKind { kBase, kPause, kSpecialToken };

std::string_view to_string(SymbolKind kind);

struct PhonemeSymbol {
  std::string text;
  int id = 0;
  SymbolKind kind = SymbolKind::kBase;
};

/// True for labels of the form <spcN> with N a positive integer.
bool is_special_token_label(std::string_view label);

using LabelSequence = std::vector<std::string>;

struct FillerEntry {
  std::string speaker;
  LabelSequence phonemes;
  std::string token;
};

/// Per-speaker filler phrases and their special tokens. Immutable once
/// constructed; construction enforces token uniqueness across the whole
/// registry and prefix-freeness within each speaker.
class FillerRegistry {
 public:
  FillerRegistry() = default;
  explicit FillerRegistry(std::vector<FillerEntry> entries);

  /// `speaker<TAB>token<TAB>filler phonemes`, '#' comments, blank lines ok.
  static FillerRegistry parse(std::istream &in, const std::string &source);
  static FillerRegistry parse(std::string_view text);
  static FillerRegistry load(const std::filesystem::path &path);
  std::string serialize() const;

  const std::vector<FillerEntry> &entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::vector<const FillerEntry *> for_speaker(std::string_view speaker) const;
  const FillerEntry *find_token(std::string_view token) const;
  /// Entries of a single speaker only (used for per-speaker checkpoints).
  FillerRegistry restricted_to(std::string_view speaker) const;

 private:
  std::vector<FillerEntry> entries_;
};

class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<PhonemeSymbol> symbols);

  const std::vector<PhonemeSymbol> &symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  std::optional<int> find(std::string_view label) const;
  const PhonemeSymbol &at(int id) const;

  /// Label sequence to ids; unknown labels raise InputError naming the
  /// label and its position.
  std::vector<int> encode(std::span<const std::string> labels) const;
  LabelSequence decode(std::span<const int> ids) const;

  std::vector<std::string> special_tokens() const;

  std::string serialize() const;
  static SymbolTable deserialize(std::string_view text);
  std::uint64_t hash() const;

  /// Every label of `other` is present here.
  bool is_superset_of(const SymbolTable &other) const;

 private:
  std::vector<PhonemeSymbol> symbols_;
  std::unordered_map<std::string, int> lookup_;
};

/// base order, then the pause symbol (unless already in the base list),
/// then registry tokens sorted by label.
SymbolTable build_symbol_table(std::span<const std::string> base_inventory,
                               const FillerRegistry &registry);

struct FillerReplacement {
  LabelSequence labels;
  /// For every output label, the [begin, begin + length) range of input
  /// labels it stands for.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
};

/// Leftmost, longest-match-first replacement of this speaker's filler
/// phrases by their tokens. When `known` is given, every input label must
/// be one of its non-token symbols.
LabelSequence replace_fillers(std::span<const std::string> phonemes,
                              std::string_view speaker,
                              const FillerRegistry &registry,
                              const SymbolTable *known = nullptr);

FillerReplacement replace_fillers_with_spans(
    std::span<const std::string> phonemes, std::string_view speaker,
    const FillerRegistry &registry, const SymbolTable *known = nullptr);

/// Inverse view: each token expands back to its filler phonemes.
LabelSequence expand_special_tokens(std::span<const std::string> phonemes,
                                    const FillerRegistry &registry);

/// Splits on ASCII whitespace.
LabelSequence split_labels(std::string_view text);
std::string join_labels(std::span<const std::string> labels);

}  // namespace comedic
