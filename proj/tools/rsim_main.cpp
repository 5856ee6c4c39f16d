// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

// rsim: train, evaluate and inspect planner/reasoner policies.

#include <CLI11.hpp>

#include <iostream>

#include "rsim/cli/commands.hpp"
#include "rsim/cli/log.hpp"

namespace {

void add_common(CLI::App* cmd, rsim::cli::CommandOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--task", o.task, "task, e.g. StrategyLock-A:3 or ChainArithmetic:3");
  cmd->add_option("--seed", o.seed, "64-bit run seed");
  cmd->add_option("--threads", o.threads, "worker threads");
}

void add_training(CLI::App* cmd, rsim::cli::CommandOptions& o) {
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--updates", o.updates, "total updates (multiple of epochs)");
  cmd->add_option("--stage-boundary", o.stage_boundary, "update count N ending stage 1");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rsim::cli;
  CLI::App app{"rsim: strategy-guided planner/reasoner training"};
  app.require_subcommand(1);
  CommandOptions o;
  std::string role = "both", text_path, ckpt_path, metrics_path;
  int probes = 1000;
  std::size_t count = 100;

  auto* train = app.add_subcommand("train", "two-stage joint training");
  add_common(train, o);
  add_training(train, o);
  train->add_option("--planner-ckpt", o.planner_ckpt, "initial planner");
  train->add_option("--reasoner-ckpt", o.reasoner_ckpt, "initial reasoner");
  train->add_flag("--random-planner", o.random_planner, "uniform strategy source, planner untouched");

  auto* eval = app.add_subcommand("eval", "evaluate a planner/reasoner pair");
  add_common(eval, o);
  eval->add_option("--planner-ckpt", o.planner_ckpt, "planner checkpoint");
  eval->add_option("--reasoner-ckpt", o.reasoner_ckpt, "reasoner checkpoint")->required();
  eval->add_option("--mask-strategy", o.mask_strategy, "forbid one strategy");
  eval->add_option("--questions", o.questions, "held-out question count");
  eval->add_flag("--random-planner", o.random_planner, "uniform strategy source");

  auto* plugin = app.add_subcommand("plugin-eval", "frozen planner with a given or fresh reasoner");
  add_common(plugin, o);
  add_training(plugin, o);
  plugin->add_option("--planner-ckpt", o.planner_ckpt, "planner checkpoint")->required();
  plugin->add_option("--reasoner-ckpt", o.reasoner_ckpt, "reasoner checkpoint (fresh if omitted)");
  plugin->add_option("--mask-strategy", o.mask_strategy, "forbid one strategy");
  plugin->add_option("--questions", o.questions, "held-out question count");
  plugin->add_flag("--train-reasoner", o.train_reasoner,
                   "train the reasoner against the frozen planner first");

  auto* cont = app.add_subcommand("continue", "continue planner training on a new task");
  add_common(cont, o);
  add_training(cont, o);
  cont->add_option("--planner-ckpt", o.planner_ckpt, "planner checkpoint")->required();
  cont->add_option("--reasoner-ckpt", o.reasoner_ckpt, "reasoner checkpoint (fresh if omitted)");
  cont->add_option("--original-task", o.original_task, "task for the retention report");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_common(grad, o);
  grad->add_option("--role", role, "planner | reasoner | both");
  grad->add_option("--probes", probes, "probes per policy");

  auto* cnt = app.add_subcommand("count", "keyword strategy counts of a text file");
  cnt->add_option("text", text_path, "UTF-8 text file")->required();

  auto* insp = app.add_subcommand("inspect", "print checkpoint metadata");
  insp->add_option("ckpt", ckpt_path, "checkpoint file")->required();

  auto* summ = app.add_subcommand("summarize", "metrics.jsonl to CSV curves");
  summ->add_option("metrics", metrics_path, "metrics JSON Lines file")->required();

  auto* exq = app.add_subcommand("export-questions", "write generated questions as JSON Lines");
  add_common(exq, o);
  exq->add_option("--count", count, "number of questions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: ConfigError: " << e.what() << '\n';
    return 2;
  }

  return guarded(
      [&] {
        set_log_level(log_level_from_env());
        if (*train) cmd_train(o, std::cout);
        if (*eval) cmd_eval(o, std::cout);
        if (*plugin) cmd_plugin_eval(o, std::cout);
        if (*cont) cmd_continue(o, std::cout);
        if (*grad) cmd_gradcheck(o, role, probes, std::cout);
        if (*cnt) cmd_count(text_path, std::cout);
        if (*insp) cmd_inspect(ckpt_path, std::cout);
        if (*summ) cmd_summarize(metrics_path, std::cout);
        if (*exq) cmd_export_questions(o, count, std::cout);
      },
      std::cerr);
}
