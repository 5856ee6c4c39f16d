// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsim {

enum class ErrorCode {
  kUnknownToken,
  kEmptyContext,
  kNonFiniteLogits,
  kShapeMismatch,
  kNonFiniteGradient,
  kStepOutOfRange,
  kInvalidSpec,
  kWrongTask,
  kGroupTooSmall,
  kStaleRollout,
  kVocabMismatch,
  kEmptyEvalSet,
  kCorruptCheckpoint,
  kParseError,
  kConfigError,
  kNumericError,
  kIoError,
};

// Stable category name printed by the CLI, e.g. "VocabMismatch".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ParseError carrying the 1-based offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rsim
