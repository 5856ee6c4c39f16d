// Copyright 2026 The rsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rsim::analysis {

// Column order of the curve table; optional metrics become empty cells.
const std::vector<std::string>& curve_columns();

// Converts a metrics JSON Lines stream into a CSV curve table (header plus
// one row per record). Blank lines are skipped; anything else that is not a
// JSON object with a numeric "update" throws ParseError carrying the
// 1-based line number.
std::string summarize_metrics(std::istream& jsonl);
std::string summarize_metrics_file(const std::string& path);

}  // namespace rsim::analysis
