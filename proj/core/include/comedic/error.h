// core/include/comedic/error.h
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

#include <stdexcept>
#include <string>

namespace comedic {

/// Base of every exception thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string &kind() const { return kind_; }

 private:
  std::string kind_;
};

/// Caller handed us data that violates an operation's precondition.
class InputError : public Error {
 public:
  explicit InputError(const std::string &what) : Error("input_error", what) {}
};

/// Inconsistent configuration, registry or parameter shapes.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what) : Error("config_error", what) {}
};

/// Malformed files and failed reads/writes.
class IoError : public Error {
 public:
  explicit IoError(const std::string &what) : Error("io_error", what) {}
};

/// Numerical failure during optimisation (non-finite losses).
class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string &what)
      : Error("training_error", what) {}
};

}  // namespace comedic
