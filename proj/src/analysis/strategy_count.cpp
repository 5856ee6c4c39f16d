// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/analysis/strategy_count.hpp"

#include <vector>

namespace rsim::analysis {

namespace {

bool word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '-' || c == '\'' || c >= 0x80;
}

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (word_char(c)) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool contains_phrase(const std::vector<std::string>& words,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > words.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= words.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < phrase.size() && hit; ++k) {
      hit = words[i + k] == phrase[k];
    }
    if (hit) return true;
  }
  return false;
}

}  // namespace

StrategyCounts count_strategies_text(std::string_view text, const StrategyTable& table) {
  StrategyCounts counts{};
  std::vector<std::vector<std::vector<std::string>>> keywords(kNumStrategies);
  for (const auto& info : table.entries()) {
    for (const auto& kw : info.keywords) keywords[to_index(info.id)].push_back(words_of(kw));
  }

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find("\n\n", start);
    if (end == std::string_view::npos) end = text.size();
    const auto words = words_of(text.substr(start, end - start));
    if (!words.empty()) {
      for (int s = 0; s < kNumStrategies; ++s) {
        for (const auto& phrase : keywords[s]) {
          if (contains_phrase(words, phrase)) {
            ++counts[s];
            break;
          }
        }
      }
    }
    if (end == text.size()) break;
    start = end + 2;
  }
  return counts;
}

int count_strategies_rollout(const Rollout& rollout) {
  int n = 0;
  for (const auto& s : rollout.steps) {
    if (s.strategy != Strategy::kContinuation && s.strategy != Strategy::kTermination) ++n;
  }
  return n;
}

std::string format_counts(const StrategyCounts& counts, const StrategyTable& table) {
  std::string out;
  for (auto s : table.countable()) {
    out += table.at(s).label;
    out += ',';
    out += std::to_string(counts[to_index(s)]);
    out += '\n';
  }
  return out;
}

}  // namespace rsim::analysis
