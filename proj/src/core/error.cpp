// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/core/error.hpp"

namespace rsim {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kEmptyContext: return "EmptyContext";
    case ErrorCode::kNonFiniteLogits: return "NonFiniteLogits";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kStepOutOfRange: return "StepOutOfRange";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kWrongTask: return "WrongTask";
    case ErrorCode::kGroupTooSmall: return "GroupTooSmall";
    case ErrorCode::kStaleRollout: return "StaleRollout";
    case ErrorCode::kVocabMismatch: return "VocabMismatch";
    case ErrorCode::kEmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kNumericError: return "NumericError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rsim
