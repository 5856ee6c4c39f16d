// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/cli/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "rsim/core/error.hpp"

namespace rsim::cli {

namespace {

using Setter = std::function<void(const nlohmann::json&, ExperimentConfig&)>;

template <typename T>
T as(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw std::invalid_argument("expected a number");
    }
    return v.get<T>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kConfigError, "config key '" + key + "': " + e.what());
  }
}

#define RSIM_FIELD(key, expr)                                              \
  {key, [](const nlohmann::json& v, ExperimentConfig& c) {                 \
     using T = std::remove_reference_t<decltype(c.expr)>;                  \
     c.expr = as<T>(v, key);                                               \
   }}

const std::map<std::string, Setter>& top_level() {
  static const std::map<std::string, Setter> m = {
      RSIM_FIELD("G", train.run.group_size),
      RSIM_FIELD("temp_train", train.run.temp_train),
      RSIM_FIELD("temp_eval_planner", train.run.temp_eval_planner),
      RSIM_FIELD("temp_eval_reasoner", train.run.temp_eval_reasoner),
      RSIM_FIELD("beta_kl", train.run.beta_kl),
      RSIM_FIELD("clip_eps", train.run.clip_eps),
      RSIM_FIELD("lambda_stage1", train.run.lambda_stage1),
      RSIM_FIELD("lambda_stage2", train.run.lambda_stage2),
      RSIM_FIELD("stage_boundary", train.run.stage_boundary),
      RSIM_FIELD("epochs", train.run.epochs),
      RSIM_FIELD("steps_per_epoch", train.run.steps_per_epoch),
      RSIM_FIELD("batch_questions", train.run.batch_questions),
      RSIM_FIELD("grad_accum", train.run.grad_accum),
      RSIM_FIELD("lr_max", train.run.lr_max),
      RSIM_FIELD("lr_min", train.run.lr_min),
      RSIM_FIELD("n_max", train.run.n_max),
      RSIM_FIELD("l_max", train.run.l_max),
      RSIM_FIELD("seed", train.run.seed),
      RSIM_FIELD("threads", train.run.threads),
      RSIM_FIELD("shared_accuracy", train.run.shared_accuracy),
      RSIM_FIELD("eval_every", train.eval_every),
      RSIM_FIELD("eval_questions", train.eval_questions),
      RSIM_FIELD("eval_seed", train.eval_seed),
      RSIM_FIELD("random_planner", train.random_planner),
      RSIM_FIELD("freeze_planner", train.freeze_planner),
      RSIM_FIELD("freeze_reasoner", train.freeze_reasoner),
      RSIM_FIELD("mixed_lengths", train.task.mixed_lengths),
      RSIM_FIELD("warmup_updates", train.warmup.updates),
      RSIM_FIELD("warmup_traces", train.warmup.traces_per_update),
      RSIM_FIELD("warmup_lr", train.warmup.lr),
      {"task",
       [](const nlohmann::json& v, ExperimentConfig& c) {
         const bool mixed = c.train.task.mixed_lengths;
         c.train.task = env::parse_task(as<std::string>(v, "task"));
         c.train.task.mixed_lengths = mixed;
       }},
  };
  return m;
}

const std::map<std::string, Setter>& model_keys() {
  static const std::map<std::string, Setter> m = {
      RSIM_FIELD("embed_dim", model.embed_dim),
      RSIM_FIELD("context_window", model.context_window),
      RSIM_FIELD("hidden_dims", model.hidden_dims),
      RSIM_FIELD("init_scale", model.init_scale),
  };
  return m;
}

#undef RSIM_FIELD

void apply(const nlohmann::json& j, const std::map<std::string, Setter>& keys,
           const std::string& where, ExperimentConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (where == "config" && k == "model") continue;
    const auto it = keys.find(k);
    if (it == keys.end()) {
      throw Error(ErrorCode::kConfigError, "unknown " + where + " key '" + k + "'");
    }
    it->second(v, c);
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  // mixed_lengths must survive "task" regardless of key order.
  if (j.is_object() && j.contains("task")) top_level().at("task")(j["task"], c);
  apply(j, top_level(), "config", c);
  if (j.contains("model")) apply(j["model"], model_keys(), "model", c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, "config " + path + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  const auto& r = c.train.run;
  nlohmann::ordered_json j;
  j["task"] = c.train.task.label();
  j["mixed_lengths"] = c.train.task.mixed_lengths;
  j["G"] = r.group_size;
  j["temp_train"] = r.temp_train;
  j["temp_eval_planner"] = r.temp_eval_planner;
  j["temp_eval_reasoner"] = r.temp_eval_reasoner;
  j["beta_kl"] = r.beta_kl;
  j["clip_eps"] = r.clip_eps;
  j["lambda_stage1"] = r.lambda_stage1;
  j["lambda_stage2"] = r.lambda_stage2;
  j["stage_boundary"] = r.stage_boundary;
  j["epochs"] = r.epochs;
  j["steps_per_epoch"] = r.steps_per_epoch;
  j["batch_questions"] = r.batch_questions;
  j["grad_accum"] = r.grad_accum;
  j["lr_max"] = r.lr_max;
  j["lr_min"] = r.lr_min;
  j["n_max"] = r.n_max;
  j["l_max"] = r.l_max;
  j["seed"] = r.seed;
  j["threads"] = r.threads;
  j["shared_accuracy"] = r.shared_accuracy;
  j["eval_every"] = c.train.eval_every;
  j["eval_questions"] = c.train.eval_questions;
  j["eval_seed"] = c.train.eval_seed;
  j["random_planner"] = c.train.random_planner;
  j["freeze_planner"] = c.train.freeze_planner;
  j["freeze_reasoner"] = c.train.freeze_reasoner;
  j["warmup_updates"] = c.train.warmup.updates;
  j["warmup_traces"] = c.train.warmup.traces_per_update;
  j["warmup_lr"] = c.train.warmup.lr;
  j["model"] = {{"embed_dim", c.model.embed_dim},
                {"context_window", c.model.context_window},
                {"hidden_dims", c.model.hidden_dims},
                {"init_scale", c.model.init_scale}};
  return j;
}

model::PolicySpec planner_spec_for(const ModelConfig& m, const Vocab& vocab) {
  auto s = model::planner_spec(vocab);
  s.embed_dim = m.embed_dim;
  s.context_window = m.context_window;
  s.hidden_dims = m.hidden_dims;
  s.validate();
  return s;
}

model::PolicySpec reasoner_spec_for(const ModelConfig& m, const Vocab& vocab) {
  auto s = model::reasoner_spec(vocab);
  s.embed_dim = m.embed_dim;
  s.context_window = m.context_window;
  s.hidden_dims = m.hidden_dims;
  s.validate();
  return s;
}

}  // namespace rsim::cli
