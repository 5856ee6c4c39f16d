// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/core/strategy.hpp"

#include <json.hpp>

#include <set>

#include "rsim/core/error.hpp"
#include "rsim/core/hash.hpp"

namespace rsim {

// Generated from data/strategies.json at configure time.
extern const char* const kBundledStrategyTable;

namespace {

constexpr std::array<std::string_view, kNumStrategies> kNames = {
    "Termination",   "SelfReflection", "Decomposition",
    "DeliberativeThinking", "Validation", "Summarization",
    "Prioritization", "Continuation", "SubPlanning"};

}  // namespace

Strategy strategy_from_index(int id) {
  if (id < 0 || id >= kNumStrategies) {
    throw Error(ErrorCode::kInvalidSpec,
                "strategy id out of range: " + std::to_string(id));
  }
  return static_cast<Strategy>(id);
}

std::string_view strategy_name(Strategy s) { return kNames[to_index(s)]; }

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (int i = 0; i < kNumStrategies; ++i) {
    if (kNames[i] == name) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

const StrategyTable& StrategyTable::builtin() {
  static const StrategyTable table = from_json(kBundledStrategyTable);
  return table;
}

StrategyTable StrategyTable::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("strategy table: ") + e.what());
  }
  const auto& list = doc.at("strategies");
  if (!list.is_array() || list.size() != kNumStrategies) {
    throw Error(ErrorCode::kConfigError,
                "strategy table must list exactly nine strategies");
  }
  StrategyTable table;
  std::array<bool, kNumStrategies> seen{};
  std::set<std::string> markers;
  for (const auto& item : list) {
    const int id = item.at("id").get<int>();
    const Strategy s = strategy_from_index(id);
    if (seen[id]) {
      throw Error(ErrorCode::kConfigError,
                  "duplicate strategy id " + std::to_string(id));
    }
    seen[id] = true;
    StrategyInfo info;
    info.id = s;
    info.name = item.at("name").get<std::string>();
    if (info.name != strategy_name(s)) {
      throw Error(ErrorCode::kConfigError,
                  "strategy " + std::to_string(id) + " must be named " +
                      std::string(strategy_name(s)));
    }
    if (!item.at("marker").is_null()) {
      info.marker = item.at("marker").get<std::string>();
      if (!markers.insert(*info.marker).second) {
        throw Error(ErrorCode::kConfigError,
                    "duplicate marker " + *info.marker);
      }
    }
    if ((s == Strategy::kTermination) == info.marker.has_value()) {
      throw Error(ErrorCode::kConfigError,
                  "only Termination may lack a marker token");
    }
    info.label = item.at("label").get<std::string>();
    info.keywords = item.at("keywords").get<std::vector<std::string>>();
    table.entries_[id] = std::move(info);
  }
  return table;
}

std::vector<Strategy> StrategyTable::countable() const {
  std::vector<Strategy> out;
  for (const auto& e : entries_) {
    if (!e.keywords.empty()) out.push_back(e.id);
  }
  return out;
}

std::string StrategyTable::canonical_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json item;
    item["id"] = to_index(e.id);
    item["name"] = e.name;
    item["marker"] = e.marker ? nlohmann::json(*e.marker) : nlohmann::json();
    item["label"] = e.label;
    item["keywords"] = e.keywords;
    list.push_back(std::move(item));
  }
  return nlohmann::json{{"strategies", list}}.dump();
}

std::uint64_t StrategyTable::hash() const { return fnv1a64(canonical_json()); }

}  // namespace rsim
