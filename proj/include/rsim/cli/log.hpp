// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace rsim::cli {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// From RSIM_LOG_LEVEL (error | info | debug); info when unset. An
// unrecognised value throws ConfigError.
LogLevel log_level_from_env();
void set_log_level(LogLevel level);
LogLevel log_level();

// Writes "[level] message" to stderr when `level` is enabled.
void log(LogLevel level, std::string_view message);

}  // namespace rsim::cli
