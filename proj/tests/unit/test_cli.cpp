// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "rsim/cli/checkpoint.hpp"
#include "rsim/cli/config.hpp"
#include "rsim/core/error.hpp"

using namespace rsim;
using namespace rsim::cli;
using rsim::test::vocab;

namespace {

Checkpoint sample_checkpoint(const std::string& role) {
  const auto spec = role == "planner" ? model::planner_spec(vocab()) : model::reasoner_spec(vocab());
  auto params = model::PolicyParams::init_uniform(spec, role.size(), 0.3);
  return {make_meta(role, params, vocab(), 42, 2, nlohmann::json{{"seed", 7}}), params};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kConfigError;
}

}  // namespace

TEST_CASE("checkpoint round trip is byte identical") {
  for (const char* role : {"planner", "reasoner"}) {
    const auto ckpt = sample_checkpoint(role);
    const auto bytes = checkpoint_bytes(ckpt);
    CHECK(bytes.compare(0, 8, std::string(kCheckpointMagic, 8)) == 0);
    std::istringstream in(bytes);
    const auto back = read_checkpoint(in, &vocab());
    CHECK(back.params == ckpt.params);
    CHECK(back.meta.role == role);
    CHECK(back.meta.updates == 42);
    CHECK(back.meta.stage == 2);
    CHECK(back.meta.spec == ckpt.params.spec());
    CHECK(checkpoint_bytes(back) == bytes);
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto bytes = checkpoint_bytes(sample_checkpoint("planner"));
  auto read = [](std::string b) {
    return [b] {
      std::istringstream in(b);
      read_checkpoint(in);
    };
  };
  CHECK(code_of(read(bytes.substr(0, bytes.size() - 3))) == ErrorCode::kCorruptCheckpoint);
  CHECK(code_of(read(bytes.substr(0, 5))) == ErrorCode::kCorruptCheckpoint);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK(code_of(read(magic)) == ErrorCode::kCorruptCheckpoint);
  std::string version = bytes;
  version[8] = 9;
  CHECK(code_of(read(version)) == ErrorCode::kCorruptCheckpoint);
  CHECK(code_of(read(bytes + "junk")) == ErrorCode::kCorruptCheckpoint);
}

TEST_CASE("checkpoint vocabulary must match") {
  const auto bytes = checkpoint_bytes(sample_checkpoint("reasoner"));
  auto tokens = vocab().tokens();
  std::swap(tokens[4], tokens[5]);
  const Vocab other(tokens);
  CHECK(code_of([&] {
          std::istringstream in(bytes);
          read_checkpoint(in, &other);
        }) == ErrorCode::kVocabMismatch);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(nlohmann::json::parse(
      R"({"task": "StrategyLock:3", "G": 8, "mixed_lengths": true, "seed": 5,
          "model": {"hidden_dims": [32, 16]}})"));
  CHECK(c.train.task.kind == TaskKind::kStrategyLock);
  CHECK(c.train.task.mixed_lengths);
  CHECK(c.train.run.group_size == 8);
  CHECK(c.train.run.seed == 5);
  CHECK(c.model.hidden_dims == std::vector<int>{32, 16});
  CHECK(c.train.run.beta_kl == 0.04);
  CHECK_FALSE(c.train.run.shared_accuracy);

  CHECK(code_of([] { parse_config(nlohmann::json{{"Gee", 8}}); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(nlohmann::json{{"G", "eight"}}); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(nlohmann::json{{"model", {{"depth", 2}}}}); }) ==
        ErrorCode::kConfigError);
  CHECK(code_of([] { parse_config(nlohmann::json::array()); }) == ErrorCode::kConfigError);
}

TEST_CASE("resolved config round trips") {
  auto c = parse_config(nlohmann::json::parse(
      R"({"task": "StrategyLock-B:2", "lambda_stage1": 0.9, "shared_accuracy": true,
          "warmup_updates": 12, "model": {"embed_dim": 8}})"));
  const auto j = to_json(c);
  const auto back = parse_config(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.train.run.lambda_stage1 == 0.9);
  CHECK(back.train.run.shared_accuracy);
  CHECK(back.train.warmup.updates == 12);
  CHECK(back.model.embed_dim == 8);
  CHECK(planner_spec_for(back.model, vocab()).output_arity == 9);
  CHECK(reasoner_spec_for(back.model, vocab()).embed_dim == 8);
}
