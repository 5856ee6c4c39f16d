// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsim {

// The nine plan actions of the planner. Ids are dense in 0..8 and index the
// planner's action head. Marker token "Mk" belongs to strategy id k, so
// Termination (the only marker-less action) sits at 0.
enum class Strategy : std::uint8_t {
  kTermination = 0,
  kSelfReflection = 1,
  kDecomposition = 2,
  kDeliberativeThinking = 3,
  kValidation = 4,
  kSummarization = 5,
  kPrioritization = 6,
  kContinuation = 7,
  kSubPlanning = 8,
};

inline constexpr int kNumStrategies = 9;

constexpr int to_index(Strategy s) { return static_cast<int>(s); }
Strategy strategy_from_index(int id);  // throws InvalidSpec outside 0..8

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct StrategyInfo {
  Strategy id;
  std::string name;
  std::optional<std::string> marker;  // marker token string, none for Termination
  std::string label;                  // human label used by the keyword counter
  std::vector<std::string> keywords;  // empty for uncounted strategies
};

// Strategy table with keyword lists, loaded from the bundled JSON data file.
class StrategyTable {
 public:
  // The table compiled in from data/strategies.json.
  static const StrategyTable& builtin();
  static StrategyTable from_json(std::string_view text);

  const StrategyInfo& at(Strategy s) const { return entries_[to_index(s)]; }
  const std::array<StrategyInfo, kNumStrategies>& entries() const {
    return entries_;
  }

  // Strategies with a non-empty keyword list, in id order.
  std::vector<Strategy> countable() const;

  std::string canonical_json() const;
  std::uint64_t hash() const;

 private:
  std::array<StrategyInfo, kNumStrategies> entries_;
};

}  // namespace rsim
