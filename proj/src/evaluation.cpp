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

#include "capot/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capot/errors.hpp"
#include "capot/noise.hpp"
#include "capot/text.hpp"
#include "json.hpp"

namespace capot {
namespace {

using json = nlohmann::ordered_json;

void check_qrels(const ResultsById& results, const Qrels& qrels) {
  if (results.empty()) throw DataError("no queries to evaluate");
  std::vector<std::string> missing;
  for (const auto& [id, _] : results) {
    auto it = qrels.find(id);
    if (it == qrels.end() || it->second.empty()) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "queries without qrels:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
      msg += " " + missing[i];
    }
    if (missing.size() > 20) {
      msg += " (+" + std::to_string(missing.size() - 20) + " more)";
    }
    throw DataError(msg);
  }
}

// Rank (1-based) of the first relevant hit within the top k, or 0.
std::size_t first_relevant_rank(const SearchResult& r,
                                const std::set<std::string>& relevant,
                                std::size_t k) {
  const std::size_t n = std::min(k, r.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(r[i].id)) return i + 1;
  }
  return 0;
}

double relative(double value, double reference) {
  if (reference <= 0.0) {
    throw DataError("relative loss undefined: clean accuracy is zero");
  }
  return (value - reference) / reference;
}

std::vector<std::string> canonical_type_names() {
  std::vector<std::string> out;
  for (NoiseType t : kAllNoiseTypes) out.emplace_back(to_string(t));
  return out;
}

bool is_typo_row(std::string_view name) {
  auto t = parse_noise_type(name);
  return t && is_typo(*t);
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

double retrieval_accuracy(const ResultsById& results, const Qrels& qrels,
                          std::size_t k) {
  check_qrels(results, qrels);
  std::size_t hits = 0;
  for (const auto& [id, r] : results) {
    hits += first_relevant_rank(r, qrels.find(id)->second, k) != 0;
  }
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

double mrr_at_k(const ResultsById& results, const Qrels& qrels, std::size_t k) {
  check_qrels(results, qrels);
  double sum = 0.0;
  for (const auto& [id, r] : results) {
    const std::size_t rank = first_relevant_rank(r, qrels.find(id)->second, k);
    if (rank) sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(results.size());
}

const ReportRow* EvalReport::find(std::string_view name) const {
  for (const ReportRow& row : rows) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

const ReportCell& EvalReport::cell(std::string_view name, std::size_t k) const {
  const ReportRow* row = find(name);
  if (!row) throw DataError("report has no row '" + std::string(name) + "'");
  auto it = row->cells.find(k);
  if (it == row->cells.end()) {
    throw DataError("report has no depth " + std::to_string(k));
  }
  return it->second;
}

EvalReport degradation_report(
    const AccuracyByDepth& clean,
    const std::map<std::string, AccuracyByDepth>& noisy,
    const std::vector<std::size_t>& depths) {
  if (depths.empty()) throw UsageError("no recall depths");
  auto require_depths = [&](const std::string& name, const AccuracyByDepth& acc) {
    for (std::size_t k : depths) {
      auto it = acc.find(k);
      if (it == acc.end()) {
        throw DataError("row '" + name + "' lacks depth " + std::to_string(k));
      }
      if (!(it->second >= 0.0 && it->second <= 1.0)) {
        throw DataError("row '" + name + "' accuracy outside [0, 1]");
      }
    }
  };
  require_depths(std::string(kCleanRow), clean);

  EvalReport report;
  report.depths = depths;
  auto add_row = [&](const std::string& name, auto accuracy_at) {
    ReportRow row{name, {}};
    for (std::size_t k : depths) {
      const double a = accuracy_at(k);
      row.cells[k] = {a, relative(a, clean.at(k))};
    }
    report.rows.push_back(std::move(row));
  };
  add_row(std::string(kCleanRow), [&](std::size_t k) { return clean.at(k); });

  for (const auto& [name, acc] : noisy) {
    if (name != kAverageRow && name != kTyposRow && !parse_noise_type(name)) {
      throw DataError("unknown noise row '" + name + "'");
    }
    require_depths(name, acc);
  }
  std::vector<std::string> present;
  for (const std::string& name : canonical_type_names()) {
    if (noisy.count(name)) present.push_back(name);
  }
  for (const std::string& name : present) {
    add_row(name, [&](std::size_t k) { return noisy.at(name).at(k); });
  }

  const bool explicit_average = noisy.count(std::string(kAverageRow)) > 0;
  if (explicit_average && !present.empty()) {
    throw DataError("explicit average given together with per-type rows");
  }
  if (explicit_average) {
    add_row(std::string(kAverageRow),
            [&](std::size_t k) { return noisy.at(std::string(kAverageRow)).at(k); });
  } else if (!present.empty()) {
    add_row(std::string(kAverageRow), [&](std::size_t k) {
      double s = 0.0;
      for (const auto& name : present) s += noisy.at(name).at(k);
      return s / static_cast<double>(present.size());
    });
  }

  std::vector<std::string> typo_rows;
  for (const auto& name : present) {
    if (is_typo_row(name)) typo_rows.push_back(name);
  }
  const bool explicit_typos = noisy.count(std::string(kTyposRow)) > 0;
  if (explicit_typos && !typo_rows.empty()) {
    throw DataError("explicit typos row given together with typo rows");
  }
  if (explicit_typos) {
    add_row(std::string(kTyposRow),
            [&](std::size_t k) { return noisy.at(std::string(kTyposRow)).at(k); });
  } else if (typo_rows.size() == kTypoNoiseTypes.size()) {
    add_row(std::string(kTyposRow), [&](std::size_t k) {
      double s = 0.0;
      for (const auto& name : typo_rows) s += noisy.at(name).at(k);
      return s / static_cast<double>(typo_rows.size());
    });
  }
  return report;
}

EvalReport evaluate_runs(const ResultsById& clean,
                         const std::map<std::string, ResultsById>& noisy,
                         const Qrels& qrels,
                         const std::vector<std::size_t>& depths) {
  AccuracyByDepth clean_acc;
  for (std::size_t k : depths) clean_acc[k] = retrieval_accuracy(clean, qrels, k);
  std::map<std::string, AccuracyByDepth> noisy_acc;
  for (const auto& [type, results] : noisy) {
    bool same = results.size() == clean.size();
    for (auto a = results.begin(), b = clean.begin(); same && a != results.end();
         ++a, ++b) {
      same = a->first == b->first;
    }
    if (!same) {
      throw DataError("noise type '" + type +
                      "' was evaluated on a different query id set");
    }
    for (std::size_t k : depths) {
      noisy_acc[type][k] = retrieval_accuracy(results, qrels, k);
    }
  }
  return degradation_report(clean_acc, noisy_acc, depths);
}

ComparisonTable compare_runs(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw UsageError("nothing to compare");
  const EvalReport& ref = reports.front();
  ComparisonTable table;
  table.depths = ref.depths;
  for (const ReportRow& row : ref.rows) table.rows.push_back(row.name);
  for (const EvalReport& r : reports) {
    if (r.depths != ref.depths) {
      throw DataError("report '" + r.regime + "' has different recall depths");
    }
    std::vector<std::string> names;
    for (const ReportRow& row : r.rows) names.push_back(row.name);
    if (names != table.rows) {
      throw DataError("report '" + r.regime + "' has different noise rows");
    }
    table.regimes.push_back(r.regime);
  }
  for (const std::string& row : table.rows) {
    for (std::size_t k : table.depths) {
      const double clean = ref.cell(kCleanRow, k).accuracy;
      const double base = ref.cell(row, k).accuracy;
      auto& cells = table.cells[row][k];
      for (const EvalReport& r : reports) {
        const double a = r.cell(row, k).accuracy;
        cells.push_back({a, relative(a, clean), a - base});
      }
    }
  }
  return table;
}

std::string format_percent(double fraction) { return format_fixed(fraction * 100.0); }

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "noise_type,k,accuracy,relative_loss,regime,seed\n";
  for (const ReportRow& row : report.rows) {
    for (std::size_t k : report.depths) {
      const ReportCell& c = row.cells.at(k);
      out << row.name << ',' << k << ',' << format_percent(c.accuracy) << ','
          << format_percent(c.relative_loss) << ',' << report.regime << ','
          << report.seed << '\n';
    }
  }
  return out.str();
}

EvalReport report_from_csv(std::string_view csv) {
  EvalReport report;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) ||
      text::trim(line) != "noise_type,k,accuracy,relative_loss,regime,seed") {
    throw DataError("report CSV: unexpected header");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw DataError("report CSV line " + std::to_string(lineno) +
                      ": expected 6 fields");
    }
    const std::size_t k = parse_u64(f[1], "k");
    ReportCell cell{parse_double(f[2], "accuracy") / 100.0,
                    parse_double(f[3], "relative_loss") / 100.0};
    if (report.rows.empty()) {
      report.regime = f[4];
      report.seed = parse_u64(f[5], "seed");
    }
    if (std::find(report.depths.begin(), report.depths.end(), k) ==
        report.depths.end()) {
      report.depths.push_back(k);
    }
    if (report.rows.empty() || report.rows.back().name != f[0]) {
      if (report.find(f[0])) {
        throw DataError("report CSV: row '" + f[0] + "' is not contiguous");
      }
      report.rows.push_back({f[0], {}});
    }
    report.rows.back().cells[k] = cell;
  }
  if (report.rows.empty()) throw DataError("report CSV has no rows");
  for (const ReportRow& row : report.rows) {
    if (row.cells.size() != report.depths.size()) {
      throw DataError("report CSV: row '" + row.name + "' lacks some depths");
    }
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["regime"] = report.regime;
  j["seed"] = report.seed;
  j["dataset_hash"] = report.dataset_hash;
  j["depths"] = report.depths;
  j["rows"] = json::array();
  for (const ReportRow& row : report.rows) {
    json r;
    r["noise_type"] = row.name;
    for (std::size_t k : report.depths) {
      const ReportCell& c = row.cells.at(k);
      r["cells"].push_back({{"k", k},
                            {"accuracy", c.accuracy},
                            {"relative_loss", c.relative_loss}});
    }
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    EvalReport report;
    report.regime = j.at("regime").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.dataset_hash = j.value("dataset_hash", std::string());
    report.depths = j.at("depths").get<std::vector<std::size_t>>();
    for (const json& r : j.at("rows")) {
      ReportRow row{r.at("noise_type").get<std::string>(), {}};
      for (const json& c : r.at("cells")) {
        row.cells[c.at("k").get<std::size_t>()] = {
            c.at("accuracy").get<double>(), c.at("relative_loss").get<double>()};
      }
      if (row.cells.size() != report.depths.size()) {
        throw DataError("report row '" + row.name + "' lacks some depths");
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read report " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") return report_from_json(ss.str());
  return report_from_csv(ss.str());
}

std::string comparison_to_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "noise_type,k";
  for (const std::string& r : table.regimes) out << ',' << r << ',' << r << "_loss";
  out << '\n';
  for (const std::string& row : table.rows) {
    for (std::size_t k : table.depths) {
      out << row << ',' << k;
      for (const ComparisonCell& c : table.cells.at(row).at(k)) {
        out << ',' << format_percent(c.accuracy) << ',' << format_percent(c.loss);
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace capot
