/*
 * Copyright 2026 The capot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPOT_EVALUATION_HPP_
#define CAPOT_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "capot/index.hpp"

namespace capot {

using Qrels = std::map<std::string, std::set<std::string>, std::less<>>;
using ResultsById = std::map<std::string, SearchResult, std::less<>>;

inline const std::vector<std::size_t> kDefaultDepths = {20, 100, 200};

// Row names besides the ten noise types.
inline constexpr std::string_view kCleanRow = "none";
inline constexpr std::string_view kAverageRow = "average";
inline constexpr std::string_view kTyposRow = "typos";

// Fraction of queries with at least one relevant passage in the top k.
// Every query must have qrels; otherwise DataError lists the missing ids.
double retrieval_accuracy(const ResultsById& results, const Qrels& qrels,
                          std::size_t k);

// Mean reciprocal rank of the first relevant passage within the top k.
double mrr_at_k(const ResultsById& results, const Qrels& qrels,
                std::size_t k = 10);

struct ReportCell {
  double accuracy = 0.0;
  double relative_loss = 0.0;
};

struct ReportRow {
  std::string name;
  std::map<std::size_t, ReportCell> cells;
};

struct EvalReport {
  std::string regime;
  std::uint64_t seed = 0;
  std::string dataset_hash;
  std::vector<std::size_t> depths;
  // "none", then noise types in canonical order, then "average", "typos".
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view name) const;
  const ReportCell& cell(std::string_view name, std::size_t k) const;
};

using AccuracyByDepth = std::map<std::size_t, double>;

// Builds a report from accuracy cells. noisy is keyed by noise type name.
// Aggregates are derived when their constituent rows are present; an
// explicit "average" or "typos" entry is accepted only when none of its
// constituents is supplied. Every row needs every depth.
EvalReport degradation_report(const AccuracyByDepth& clean,
                              const std::map<std::string, AccuracyByDepth>& noisy,
                              const std::vector<std::size_t>& depths);

// Runs the metric over retrieval results. noisy results are keyed by noise
// type and then by the anchor query id; each type must cover exactly the
// clean id set.
EvalReport evaluate_runs(const ResultsById& clean,
                         const std::map<std::string, ResultsById>& noisy,
                         const Qrels& qrels,
                         const std::vector<std::size_t>& depths);

struct ComparisonCell {
  double accuracy = 0.0;
  // Relative to the first report's clean accuracy at the same depth.
  double loss = 0.0;
  // Accuracy minus the first report's accuracy in the same row.
  double delta = 0.0;
};

struct ComparisonTable {
  std::vector<std::string> regimes;
  std::vector<std::size_t> depths;
  std::vector<std::string> rows;
  // cells[row][k][regime index]
  std::map<std::string, std::map<std::size_t, std::vector<ComparisonCell>>> cells;
};

// Side-by-side view; the first report is the reference. Reports must share
// depths and rows.
ComparisonTable compare_runs(const std::vector<EvalReport>& reports);

// Percentages at two decimals.
std::string format_percent(double fraction);

// Header: noise_type,k,accuracy,relative_loss,regime,seed
std::string report_to_csv(const EvalReport& report);
EvalReport report_from_csv(std::string_view csv);

// Full precision round trip.
std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(std::string_view json_text);

EvalReport load_report(const std::filesystem::path& path);

// Header: noise_type,k,<regime>,<regime>_loss,...
std::string comparison_to_csv(const ComparisonTable& table);

}  // namespace capot

#endif  // CAPOT_EVALUATION_HPP_
