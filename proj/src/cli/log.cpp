// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/cli/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

#include "rsim/core/error.hpp"

namespace rsim::cli {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::kInfo)};
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("RSIM_LOG_LEVEL");
  if (v == nullptr || *v == '\0') return LogLevel::kInfo;
  const std::string s(v);
  if (s == "error") return LogLevel::kError;
  if (s == "info") return LogLevel::kInfo;
  if (s == "debug") return LogLevel::kDebug;
  throw Error(ErrorCode::kConfigError, "RSIM_LOG_LEVEL must be error, info or debug");
}

void set_log_level(LogLevel level) { g_level = static_cast<int>(level); }
LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

void log(LogLevel level, std::string_view message) {
  if (static_cast<int>(level) > g_level.load()) return;
  static constexpr const char* kNames[] = {"error", "info", "debug"};
  std::cerr << '[' << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace rsim::cli
