// camo/eval/report.hpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camo/eval/experiments.hpp"

namespace camo {

struct EvalReport {
  std::vector<GridRow> rows;
  std::vector<Curve> curves;
  std::optional<WordAnalysis> words;
  std::optional<SwapResult> swap;
  nlohmann::json provenance = nlohmann::json::object();  // seeds, digests, config

  nlohmann::json to_json() const;
};

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows);
/// Columns x,y,y_scaled,cer,y_lo,y_hi,covered_s.
void write_curve_csv(const std::filesystem::path& path, const Curve& curve);
void write_words_csv(const std::filesystem::path& path, const WordAnalysis& words);

/// Writes `<dir>/report.json`, `table.csv` when there are rows, one
/// `curve_<name>.csv` per curve and `words.csv`. Returns the JSON path.
std::filesystem::path write_report(const std::filesystem::path& dir, const EvalReport& report);

/// Plain-text table from a report JSON: one line per attack, WER/CER (%)
/// per defense column, plus run time and m.
std::string render_table(const nlohmann::json& report);

}  // namespace camo
