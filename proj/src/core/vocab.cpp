// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/core/vocab.hpp"

#include <sstream>

#include "rsim/core/error.hpp"
#include "rsim/core/hash.hpp"

namespace rsim {

Vocab Vocab::standard() {
  std::vector<std::string> tokens = {"<pad>", "<bos>", "<sep>", "<ans>"};
  for (int d = 0; d < 10; ++d) tokens.push_back(std::to_string(d));
  for (const char* op : {"+", "-", "*"}) tokens.emplace_back(op);
  tokens.emplace_back("LOCK");
  tokens.emplace_back("OK");
  for (int k = 1; k <= 8; ++k) tokens.push_back("M" + std::to_string(k));
  return Vocab(std::move(tokens));
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.size() > kMaxSize) {
    throw Error(ErrorCode::kConfigError,
                "vocabulary size must be in 1.." + std::to_string(kMaxSize));
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.empty() || t.find_first_of(" \t\n\r") != std::string::npos) {
      throw Error(ErrorCode::kConfigError, "invalid token '" + t + "'");
    }
    if (!index_.emplace(t, static_cast<TokenId>(i)).second) {
      throw Error(ErrorCode::kConfigError, "duplicate token '" + t + "'");
    }
  }
  auto require = [&](std::string_view s) {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) {
      throw Error(ErrorCode::kConfigError,
                  "vocabulary lacks required token '" + std::string(s) + "'");
    }
    return it->second;
  };
  pad_ = require("<pad>");
  bos_ = require("<bos>");
  sep_ = require("<sep>");
  ans_ = require("<ans>");
  lock_ = require("LOCK");
  ok_ = require("OK");
  for (int d = 0; d < 10; ++d) digits_.push_back(require(std::to_string(d)));
  for (const char* op : {"+", "-", "*"}) require(op);

  const auto& table = StrategyTable::builtin();
  markers_.assign(kNumStrategies, std::nullopt);
  marker_of_.assign(tokens_.size(), std::nullopt);
  for (const auto& info : table.entries()) {
    if (!info.marker) continue;
    const TokenId id = require(*info.marker);
    markers_[to_index(info.id)] = id;
    marker_of_[id] = info.id;
  }
}

std::optional<TokenId> Vocab::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id(std::string_view symbol) const {
  auto found = find(symbol);
  if (!found) {
    throw Error(ErrorCode::kUnknownToken,
                "unknown token '" + std::string(symbol) + "'");
  }
  return *found;
}

const std::string& Vocab::symbol(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw Error(ErrorCode::kUnknownToken,
                "token id out of range: " + std::to_string(id));
  }
  return tokens_[id];
}

TokenSeq Vocab::encode(std::string_view text) const {
  TokenSeq out;
  std::istringstream in{std::string(text)};
  std::string sym;
  while (in >> sym) out.push_back(id(sym));
  return out;
}

std::string Vocab::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += symbol(ids[i]);
  }
  return out;
}

std::optional<int> Vocab::digit_value(TokenId id) const {
  for (int d = 0; d < 10; ++d) {
    if (digits_[d] == id) return d;
  }
  return std::nullopt;
}

std::optional<TokenId> Vocab::marker(Strategy s) const {
  return markers_[to_index(s)];
}

std::optional<Strategy> Vocab::marker_strategy(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= marker_of_.size()) {
    return std::nullopt;
  }
  return marker_of_[id];
}

std::uint64_t Vocab::hash() const {
  std::string joined;
  for (const auto& t : tokens_) {
    joined += t;
    joined += '\n';
  }
  return fnv1a64(joined);
}

}  // namespace rsim
