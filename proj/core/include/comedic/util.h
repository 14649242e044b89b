// core/include/comedic/util.h
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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace comedic {

/// 64-bit FNV-1a; used for symbol-table and config fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view text);

std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view data);

}  // namespace comedic
