// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsim/core/vocab.hpp"
#include "rsim/model/policy.hpp"

namespace rsim::cli {

// Layout (all integers little-endian):
//   "RSIMCKPT" | u32 version | u64 metadata length | metadata (UTF-8 JSON)
//   | u32 tensor count | per tensor: u32 name length, name, u32 rank,
//   u64 dims..., f64 values (row-major)
inline constexpr char kCheckpointMagic[8] = {'R', 'S', 'I', 'M', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string role;  // "planner" | "reasoner"
  model::PolicySpec spec;
  std::vector<std::string> vocab;
  std::uint64_t strategy_hash = 0;
  std::int64_t updates = 0;
  int stage = 1;
  nlohmann::json config = nlohmann::json::object();
};

struct Checkpoint {
  CheckpointMeta meta;
  model::PolicyParams params;
};

CheckpointMeta make_meta(const std::string& role, const model::PolicyParams& params,
                         const Vocab& vocab, std::int64_t updates, int stage,
                         nlohmann::json config = nlohmann::json::object());

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
std::string checkpoint_bytes(const Checkpoint& ckpt);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws CorruptCheckpoint for malformed input. Verifies the strategy-table
// hash against the bundled table and, when `expected` is given, the stored
// vocabulary (VocabMismatch).
Checkpoint read_checkpoint(std::istream& in, const Vocab* expected = nullptr);
Checkpoint load_checkpoint(const std::string& path, const Vocab* expected = nullptr);

// Additionally checks the stored role.
Checkpoint load_role(const std::string& path, const std::string& role, const Vocab& vocab);

}  // namespace rsim::cli
