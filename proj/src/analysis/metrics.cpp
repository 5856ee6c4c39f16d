// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "rsim/analysis/metrics.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>

#include "rsim/core/error.hpp"

namespace rsim::analysis {

const std::vector<std::string>& curve_columns() {
  static const std::vector<std::string> cols = {
      "update",        "epoch",         "stage",
      "lambda",        "lr",            "mean_planner_reward",
      "mean_reasoner_reward", "mean_r_acc", "mean_r_follow",
      "mean_r_penalty", "terminal_rate", "kl_planner",
      "kl_reasoner",   "loss",          "eval_accuracy",
      "mean_strategies_per_question"};
  return cols;
}

namespace {

std::string cell(const nlohmann::json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
  return buf;
}

}  // namespace

std::string summarize_metrics(std::istream& jsonl) {
  std::string out;
  for (std::size_t i = 0; i < curve_columns().size(); ++i) {
    out += (i ? "," : "") + curve_columns()[i];
  }
  out += '\n';

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(jsonl, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("update") || !j["update"].is_number()) {
      throw ParseError(lineno, "record is not a metrics object with an update");
    }
    for (std::size_t i = 0; i < curve_columns().size(); ++i) {
      if (i) out += ',';
      const auto it = j.find(curve_columns()[i]);
      if (it == j.end() || it->is_null()) continue;
      if (!it->is_number()) {
        throw ParseError(lineno, "non-numeric value for " + curve_columns()[i]);
      }
      out += cell(*it);
    }
    out += '\n';
  }
  return out;
}

std::string summarize_metrics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return summarize_metrics(in);
}

}  // namespace rsim::analysis
