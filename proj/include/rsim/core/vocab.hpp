// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rsim/core/strategy.hpp"

namespace rsim {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Whitespace-delimited symbolic vocabulary. Required symbols: "<pad>",
// "<bos>", "<sep>" (step separator), "<ans>" (answer marker), digits 0-9,
// operators "+ - *", "LOCK", "OK" and the strategy markers M1..M8.
class Vocab {
 public:
  static constexpr std::size_t kMaxSize = 64;

  // The 27-token vocabulary used by every task in this project.
  static Vocab standard();

  // Validates the token list; throws ConfigError if a required symbol is
  // missing, a token repeats, or the list exceeds kMaxSize.
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenId id(std::string_view symbol) const;  // throws UnknownToken
  std::optional<TokenId> find(std::string_view symbol) const;
  const std::string& symbol(TokenId id) const;

  TokenSeq encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> ids) const;

  TokenId pad() const { return pad_; }
  TokenId bos() const { return bos_; }
  TokenId sep() const { return sep_; }
  TokenId ans() const { return ans_; }
  TokenId lock() const { return lock_; }
  TokenId ok() const { return ok_; }
  TokenId digit(int d) const { return digits_.at(d); }
  std::optional<int> digit_value(TokenId id) const;

  std::optional<TokenId> marker(Strategy s) const;
  std::optional<Strategy> marker_strategy(TokenId id) const;
  bool is_marker(TokenId id) const { return marker_strategy(id).has_value(); }

  std::uint64_t hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId pad_ = 0, bos_ = 0, sep_ = 0, ans_ = 0, lock_ = 0, ok_ = 0;
  std::vector<TokenId> digits_;
  std::vector<std::optional<TokenId>> markers_;     // by strategy id
  std::vector<std::optional<Strategy>> marker_of_;  // by token id
};

}  // namespace rsim
