// Copyright 2026 The cifscd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cifscd {

enum class ErrorCode {
  kZeroWeightMass,
  kNonFiniteWeight,
  kEmptyInput,
  kShapeMismatch,
  kInvalidLabel,
  kConfigError,
  kEmptySpan,
  kEmptySegmentation,
  kEmptyCurve,
  kParseError,
  kUncoveredToken,
  kInvalidArgument,
  kIoError,
  kNonFiniteLoss,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroWeightMass: return "ZeroWeightMass";
    case ErrorCode::kNonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kEmptySpan: return "EmptySpan";
    case ErrorCode::kEmptySegmentation: return "EmptySegmentation";
    case ErrorCode::kEmptyCurve: return "EmptyCurve";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUncoveredToken: return "UncoveredToken";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers (notably the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures additionally remember the 1-based line they came from.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void Require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace cifscd
