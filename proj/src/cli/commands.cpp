// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rsim/analysis/metrics.hpp"
#include "rsim/analysis/strategy_count.hpp"
#include "rsim/cli/checkpoint.hpp"
#include "rsim/cli/log.hpp"
#include "rsim/core/error.hpp"
#include "rsim/core/rng.hpp"
#include "rsim/model/gradcheck.hpp"

namespace rsim::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kPlannerInitStream = 3;
constexpr std::uint64_t kReasonerInitStream = 4;

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  return f;
}

void write_text(const fs::path& p, const std::string& text) {
  auto f = open_out(p);
  f << text;
}

nlohmann::ordered_json report_json(const marl::EvalReport& r) {
  nlohmann::ordered_json j;
  j["questions"] = r.questions;
  j["accuracy"] = r.accuracy;
  j["mean_strategies"] = r.mean_strategies;
  j["mean_steps"] = r.mean_steps;
  j["mean_trace_tokens"] = r.mean_trace_tokens;
  j["plan_accuracy"] = r.plan_accuracy;
  j["lock_accuracy"] = r.lock_accuracy;
  j["terminal_rate"] = r.terminal_rate;
  return j;
}

std::string eval_csv_header() {
  return "checkpoint,updates,accuracy,mean_strategies,mean_steps,mean_trace_tokens,"
         "plan_accuracy,lock_accuracy,terminal_rate\n";
}

std::string eval_csv_row(const std::string& name, std::int64_t updates,
                         const marl::EvalReport& r) {
  std::ostringstream s;
  s.precision(10);
  s << name << ',' << updates << ',' << r.accuracy << ',' << r.mean_strategies << ','
    << r.mean_steps << ',' << r.mean_trace_tokens << ',' << r.plan_accuracy << ','
    << r.lock_accuracy << ',' << r.terminal_rate << '\n';
  return s.str();
}

model::PolicyParams fresh_planner(const ExperimentConfig& c, const Vocab& v) {
  return model::PolicyParams::init_uniform(
      planner_spec_for(c.model, v), derive_seed(c.train.run.seed, {kPlannerInitStream}),
      c.model.init_scale);
}

model::PolicyParams fresh_reasoner(const ExperimentConfig& c, const Vocab& v) {
  return model::PolicyParams::init_uniform(
      reasoner_spec_for(c.model, v), derive_seed(c.train.run.seed, {kReasonerInitStream}),
      c.model.init_scale);
}

int stage_of(const RunConfig& run, std::int64_t updates) {
  return updates <= run.stage_boundary ? 1 : 2;
}

// Shared by train/continue: streams metrics, writes per-epoch checkpoints
// and the per-checkpoint evaluation table.
struct RunWriter {
  const ExperimentConfig& cfg;
  const Vocab& vocab;
  fs::path dir;
  std::ofstream metrics;
  std::ofstream eval_csv;
  std::vector<Question> held_out;

  RunWriter(const ExperimentConfig& c, const Vocab& v, const std::string& out_dir)
      : cfg(c), vocab(v), dir(out_dir) {
    fs::create_directories(dir);
    write_text(dir / "config.resolved.json", to_json(cfg).dump(2) + "\n");
    metrics = open_out(dir / "metrics.jsonl");
    eval_csv = open_out(dir / "eval.csv");
    eval_csv << eval_csv_header();
    held_out = marl::eval_questions(cfg.train, vocab);
  }

  void save(const std::string& tag, const model::PolicyParams& planner,
            const model::PolicyParams& reasoner, std::int64_t updates) {
    const auto snapshot = nlohmann::json::parse(to_json(cfg).dump());
    const int stage = stage_of(cfg.train.run, updates);
    if (!cfg.train.random_planner) {
      save_checkpoint((dir / ("planner_" + tag + ".ckpt")).string(),
                      {make_meta("planner", planner, vocab, updates, stage, snapshot),
                       planner});
    }
    save_checkpoint((dir / ("reasoner_" + tag + ".ckpt")).string(),
                    {make_meta("reasoner", reasoner, vocab, updates, stage, snapshot),
                     reasoner});
    const auto src = cfg.train.random_planner ? marl::PlannerSource::random()
                                              : marl::PlannerSource::from(planner);
    const auto rep = marl::evaluate(src, reasoner, held_out, vocab,
                                    marl::eval_config(cfg.train.run, cfg.train.eval_seed));
    eval_csv << eval_csv_row(tag, updates, rep) << std::flush;
  }

  marl::TrainCallbacks callbacks() {
    marl::TrainCallbacks cb;
    cb.on_update = [this](const marl::UpdateMetrics& m) {
      metrics << marl::to_json(m).dump() << '\n' << std::flush;
      std::ostringstream s;
      s << "update " << m.update << " stage " << m.stage << " acc " << m.mean_r_acc
        << " loss " << m.loss;
      if (m.eval_accuracy) s << " eval " << *m.eval_accuracy;
      s << " follow " << m.mean_r_follow << " term " << m.terminal_rate;
      const bool milestone = m.eval_accuracy.has_value() || m.update % 50 == 0;
      log(milestone ? LogLevel::kInfo : LogLevel::kDebug, s.str());
    };
    cb.on_epoch = [this](int epoch, const model::PolicyParams& p,
                         const model::PolicyParams& r, std::int64_t updates) {
      save("epoch" + std::to_string(epoch), p, r, updates);
    };
    return cb;
  }

  void finish(const marl::TrainResult& res) {
    save("final", res.planner, res.reasoner, res.updates);
    metrics.close();
    write_text(dir / "curves.csv",
               analysis::summarize_metrics_file((dir / "metrics.jsonl").string()));
  }
};

std::optional<Strategy> mask_of(const CommandOptions& o) {
  if (!o.mask_strategy) return std::nullopt;
  return parse_strategy(*o.mask_strategy);
}

}  // namespace

ExperimentConfig resolve_config(const CommandOptions& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.task) {
    const bool mixed = c.train.task.mixed_lengths;
    c.train.task = env::parse_task(*o.task);
    c.train.task.mixed_lengths = mixed;
  }
  if (o.seed) c.train.run.seed = *o.seed;
  if (o.stage_boundary) c.train.run.stage_boundary = *o.stage_boundary;
  if (o.threads) c.train.run.threads = *o.threads;
  if (o.random_planner) c.train.random_planner = true;
  if (o.questions) c.train.eval_questions = *o.questions;
  if (o.updates) {
    const auto epochs = std::max(c.train.run.epochs, 1);
    if (*o.updates < 0 || *o.updates % epochs != 0) {
      throw Error(ErrorCode::kConfigError, "--updates must be a non-negative multiple of epochs (" +
                                               std::to_string(epochs) + ")");
    }
    c.train.run.epochs = epochs;
    c.train.run.steps_per_epoch = static_cast<int>(*o.updates / epochs);
  }
  c.train.run.validate();
  c.train.task.validate(c.train.run.n_max);
  return c;
}

void cmd_train(const CommandOptions& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  auto planner = o.planner_ckpt.empty() ? fresh_planner(cfg, vocab)
                                        : load_role(o.planner_ckpt, "planner", vocab).params;
  auto reasoner = o.reasoner_ckpt.empty()
                      ? fresh_reasoner(cfg, vocab)
                      : load_role(o.reasoner_ckpt, "reasoner", vocab).params;
  RunWriter w(cfg, vocab, o.out_dir);
  log(LogLevel::kInfo, "training " + cfg.train.task.label() + " for " +
                           std::to_string(cfg.train.run.total_updates()) + " updates");
  const auto res = marl::train(cfg.train, std::move(planner), std::move(reasoner), vocab,
                               w.callbacks());
  w.finish(res);
  nlohmann::ordered_json j;
  j["updates"] = res.updates;
  if (res.final_eval) j["final_eval"] = report_json(*res.final_eval);
  j["out"] = o.out_dir;
  out << j.dump() << '\n';
}

void cmd_eval(const CommandOptions& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  if (o.reasoner_ckpt.empty()) {
    throw Error(ErrorCode::kConfigError, "eval needs --reasoner-ckpt");
  }
  const auto reasoner = load_role(o.reasoner_ckpt, "reasoner", vocab).params;
  std::optional<model::PolicyParams> planner;
  marl::PlannerSource src = marl::PlannerSource::random();
  if (!o.planner_ckpt.empty()) {
    planner = load_role(o.planner_ckpt, "planner", vocab).params;
    src = marl::PlannerSource::from(*planner);
  } else if (!cfg.train.random_planner) {
    throw Error(ErrorCode::kConfigError, "eval needs --planner-ckpt or --random-planner");
  }
  auto ec = marl::eval_config(cfg.train.run, cfg.train.eval_seed);
  src.mask = mask_of(o);
  const auto qs = marl::eval_questions(cfg.train, vocab);
  out << report_json(marl::evaluate(src, reasoner, qs, vocab, ec)).dump() << '\n';
}

void cmd_plugin_eval(const CommandOptions& o, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  if (o.planner_ckpt.empty()) {
    throw Error(ErrorCode::kConfigError, "plugin-eval needs --planner-ckpt");
  }
  const auto planner = load_role(o.planner_ckpt, "planner", vocab).params;
  const std::string before = checkpoint_bytes({make_meta("planner", planner, vocab, 0, 1), planner});
  auto reasoner = o.reasoner_ckpt.empty()
                      ? fresh_reasoner(cfg, vocab)
                      : load_role(o.reasoner_ckpt, "reasoner", vocab).params;
  if (o.train_reasoner) {
    auto opts = cfg.train;
    opts.freeze_planner = true;
    RunWriter w(cfg, vocab, o.out_dir);
    auto res = marl::train(opts, planner, std::move(reasoner), vocab, w.callbacks());
    w.finish(res);
    reasoner = std::move(res.reasoner);
  }
  auto ec = marl::eval_config(cfg.train.run, cfg.train.eval_seed);
  ec.mask = mask_of(o);
  const auto qs = marl::eval_questions(cfg.train, vocab);
  const auto rep = marl::plugin_eval(planner, reasoner, qs, vocab, ec);
  const std::string after = checkpoint_bytes({make_meta("planner", planner, vocab, 0, 1), planner});
  auto j = report_json(rep.report);
  j["planner_unchanged"] = rep.planner_unchanged && before == after;
  out << j.dump() << '\n';
}

void cmd_continue(const CommandOptions& o, std::ostream& out) {
  auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  if (o.planner_ckpt.empty()) {
    throw Error(ErrorCode::kConfigError, "continue needs --planner-ckpt");
  }
  const auto planner_ck = load_role(o.planner_ckpt, "planner", vocab);
  env::TaskSpec original;
  if (o.original_task) {
    original = env::parse_task(*o.original_task);
  } else if (planner_ck.meta.config.contains("task")) {
    original = env::parse_task(planner_ck.meta.config["task"].get<std::string>());
  } else {
    throw Error(ErrorCode::kConfigError, "cannot infer the original task; pass --original-task");
  }
  // The planner's architecture comes from the checkpoint.
  const auto& s = planner_ck.params.spec();
  cfg.model.embed_dim = s.embed_dim;
  cfg.model.context_window = s.context_window;
  cfg.model.hidden_dims = s.hidden_dims;
  auto reasoner = o.reasoner_ckpt.empty()
                      ? fresh_reasoner(cfg, vocab)
                      : load_role(o.reasoner_ckpt, "reasoner", vocab).params;
  RunWriter w(cfg, vocab, o.out_dir);
  auto rep = marl::continue_train(cfg.train, original, planner_ck.params, std::move(reasoner),
                                  vocab, w.callbacks());
  w.finish(rep.result);
  nlohmann::ordered_json j;
  j["new_task"] = cfg.train.task.label();
  j["original_task"] = original.label();
  j["new_before"] = rep.new_before.accuracy;
  j["new_after"] = rep.new_after.accuracy;
  j["new_delta"] = rep.new_delta();
  j["original_before"] = rep.original_before.accuracy;
  j["original_after"] = rep.original_after.accuracy;
  j["original_delta"] = rep.original_delta();
  write_text(fs::path(o.out_dir) / "retention.json", j.dump(2) + "\n");
  out << j.dump() << '\n';
}

void cmd_gradcheck(const CommandOptions& o, const std::string& role, int probes,
                   std::ostream& out) {
  const auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  if (probes < 1) throw Error(ErrorCode::kConfigError, "--probes must be >= 1");
  std::vector<std::pair<std::string, model::PolicySpec>> specs;
  if (role == "planner" || role == "both") specs.emplace_back("planner", planner_spec_for(cfg.model, vocab));
  if (role == "reasoner" || role == "both") specs.emplace_back("reasoner", reasoner_spec_for(cfg.model, vocab));
  if (specs.empty()) throw Error(ErrorCode::kConfigError, "--role must be planner, reasoner or both");
  bool ok = true;
  for (const auto& [name, spec] : specs) {
    const auto r = model::gradcheck(spec, cfg.train.run.seed, static_cast<std::size_t>(probes));
    nlohmann::ordered_json j;
    j["role"] = name;
    j["probes"] = r.probes;
    j["max_rel_error"] = r.max_rel_error;
    j["worst_scalar"] = r.worst_scalar;
    out << j.dump() << '\n';
    ok = ok && r.max_rel_error < 1e-6;
  }
  if (!ok) throw Error(ErrorCode::kNumericError, "gradient check exceeded 1e-6");
}

void cmd_count(const std::string& text_path, std::ostream& out) {
  std::ifstream in(text_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + text_path);
  std::ostringstream s;
  s << in.rdbuf();
  out << analysis::format_counts(analysis::count_strategies_text(s.str()));
}

void cmd_inspect(const std::string& ckpt_path, std::ostream& out) {
  const auto ck = load_checkpoint(ckpt_path);
  const auto& s = ck.params.spec();
  out << "role: " << ck.meta.role << '\n';
  out << "vocab_size: " << s.vocab_size << '\n';
  out << "embed_dim: " << s.embed_dim << '\n';
  out << "context_window: " << s.context_window << '\n';
  out << "hidden_dims:";
  for (int h : s.hidden_dims) out << ' ' << h;
  out << '\n';
  out << "output_arity: " << s.output_arity << '\n';
  out << "updates: " << ck.meta.updates << '\n';
  out << "stage: " << ck.meta.stage << '\n';
  out << "parameters: " << ck.params.num_scalars() << '\n';
  for (const auto& t : ck.params.tensors()) {
    out << "  " << t.name << " [";
    for (std::size_t i = 0; i < t.shape.size(); ++i) out << (i ? "," : "") << t.shape[i];
    out << "]\n";
  }
}

void cmd_summarize(const std::string& metrics_path, std::ostream& out) {
  out << analysis::summarize_metrics_file(metrics_path);
}

void cmd_export_questions(const CommandOptions& o, std::size_t count, std::ostream& out) {
  const auto cfg = resolve_config(o);
  const Vocab vocab = Vocab::standard();
  env::write_questions_jsonl(
      out, env::generate_questions(cfg.train.task, cfg.train.run.seed, count, vocab), vocab);
}

}  // namespace rsim::cli
