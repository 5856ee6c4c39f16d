// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rsim/marl/trainer.hpp"

namespace rsim::cli {

struct ModelConfig {
  int embed_dim = 16;
  int context_window = 32;
  std::vector<int> hidden_dims{64};
  double init_scale = 0.05;
};

struct ExperimentConfig {
  marl::TrainOptions train;
  ModelConfig model;
};

// Reads a single JSON document. Unknown keys and ill-typed values throw
// ConfigError; missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Resolved snapshot; parse_config(to_json(c)) reproduces c.
nlohmann::ordered_json to_json(const ExperimentConfig& c);

model::PolicySpec planner_spec_for(const ModelConfig& m, const Vocab& vocab);
model::PolicySpec reasoner_spec_for(const ModelConfig& m, const Vocab& vocab);

}  // namespace rsim::cli
