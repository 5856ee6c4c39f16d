// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "rsim/cli/config.hpp"

namespace rsim::cli {

// Flag values shared by the subcommands. Unset optionals leave the config
// (or the built-in default) alone.
struct CommandOptions {
  std::string config_path;
  std::optional<std::string> task;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> updates;  // total updates; must be a multiple of epochs
  std::optional<std::int64_t> stage_boundary;
  std::optional<int> threads;
  std::string out_dir = "out";
  std::string planner_ckpt;
  std::string reasoner_ckpt;
  std::optional<std::string> mask_strategy;
  std::optional<std::string> original_task;  // continue: defaults to the planner's
  bool random_planner = false;
  bool train_reasoner = false;  // plugin-eval: train a fresh reasoner first
  std::optional<std::size_t> questions;
};

// Config file (if any) with the flag overrides applied, validated.
ExperimentConfig resolve_config(const CommandOptions& o);

// Each command writes its human/machine-readable result to `out` and
// throws rsim::Error on failure.
void cmd_train(const CommandOptions& o, std::ostream& out);
void cmd_eval(const CommandOptions& o, std::ostream& out);
void cmd_plugin_eval(const CommandOptions& o, std::ostream& out);
void cmd_continue(const CommandOptions& o, std::ostream& out);
void cmd_gradcheck(const CommandOptions& o, const std::string& role, int probes,
                   std::ostream& out);
void cmd_count(const std::string& text_path, std::ostream& out);
void cmd_inspect(const std::string& ckpt_path, std::ostream& out);
void cmd_summarize(const std::string& metrics_path, std::ostream& out);
void cmd_export_questions(const CommandOptions& o, std::size_t count, std::ostream& out);

// Runs `fn`, mapping exceptions to "error: <Category>: <message>" on `err`.
// Returns the process exit code.
template <typename Fn>
int guarded(Fn&& fn, std::ostream& err);

}  // namespace rsim::cli

#include "rsim/cli/commands_inl.hpp"
