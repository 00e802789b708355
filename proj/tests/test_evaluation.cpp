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

#include <cmath>
#include <fstream>
#include <sstream>

#include "capot/errors.hpp"
#include "capot/evaluation.hpp"
#include "capot/noise.hpp"
#include "capot/random.hpp"
#include "doctest.h"

namespace capot {
namespace {

SearchResult ranked(std::initializer_list<const char*> ids) {
  SearchResult r;
  double s = 1.0;
  for (const char* id : ids) r.push_back({id, s -= 0.01, 0});
  return r;
}

// A result list of length n whose only relevant doc sits at rank.
SearchResult with_hit_at(std::size_t rank, std::size_t n) {
  SearchResult r;
  for (std::size_t i = 1; i <= n; ++i) {
    r.push_back({i == rank ? "rel" : "x" + std::to_string(i), -double(i), i});
  }
  return r;
}

double pp(double fraction) { return fraction * 100.0; }

struct RegimeFixture {
  std::vector<std::string> regimes;
  std::map<std::string, std::vector<double>> values;  // row -> columns
};

RegimeFixture load_regimes() {
  std::ifstream in(std::string(CAPOT_FIXTURE_DIR) + "/nq_k20_regimes.tsv");
  REQUIRE(in);
  RegimeFixture f;
  f.regimes = {"Regular", "PT", "DA", "CAPOT"};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    double v;
    while (ls >> v) f.values[name].push_back(v);
  }
  return f;
}

EvalReport report_for(const RegimeFixture& f, std::size_t col) {
  std::map<std::string, AccuracyByDepth> noisy;
  for (const auto& [row, v] : f.values) {
    if (row == "none" || row == "average" || row == "typos") continue;
    noisy[row][20] = v[2 * col] / 100.0;
  }
  EvalReport r = degradation_report({{20, f.values.at("none")[2 * col] / 100.0}},
                                    noisy, {20});
  r.regime = f.regimes[col];
  return r;
}

}  // namespace

TEST_CASE("retrieval accuracy examples") {
  Qrels q{{"a", {"rel"}}, {"b", {"rel"}}, {"c", {"rel"}}};
  const std::size_t k = 20;
  ResultsById r{{"a", with_hit_at(1, 30)},
                {"b", with_hit_at(k, 30)},
                {"c", with_hit_at(k + 1, 30)}};
  CHECK(retrieval_accuracy(r, q, k) == doctest::Approx(2.0 / 3.0));
  ResultsById all{{"a", with_hit_at(1, 5)}, {"b", with_hit_at(1, 5)}};
  CHECK(retrieval_accuracy(all, q, 20) == 1.0);
  ResultsById none{{"a", ranked({"x", "y"})}};
  CHECK(retrieval_accuracy(none, q, 20) == 0.0);
  // Multiple relevant passages: any one counts.
  Qrels multi{{"a", {"y", "zz"}}};
  CHECK(retrieval_accuracy({{"a", ranked({"x", "y"})}}, multi, 2) == 1.0);
}

TEST_CASE("missing qrels are reported by id") {
  Qrels q{{"a", {"rel"}}};
  ResultsById r{{"a", with_hit_at(1, 3)}, {"zz9", with_hit_at(1, 3)}};
  CHECK_THROWS_WITH_AS(retrieval_accuracy(r, q, 20),
                       doctest::Contains("zz9"), DataError);
  CHECK_THROWS_AS(mrr_at_k(r, q), DataError);
  CHECK_THROWS_AS(retrieval_accuracy({}, q, 20), DataError);
}

TEST_CASE("mrr examples") {
  Qrels q{{"a", {"rel"}}, {"b", {"rel"}}};
  CHECK(mrr_at_k({{"a", with_hit_at(1, 5)}, {"b", with_hit_at(1, 5)}}, q) == 1.0);
  CHECK(mrr_at_k({{"a", with_hit_at(3, 20)}}, q) == doctest::Approx(1.0 / 3.0));
  CHECK(mrr_at_k({{"a", with_hit_at(11, 20)}}, q, 10) == 0.0);
}

TEST_CASE("metrics are bounded and accuracy grows with depth") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    Qrels q;
    ResultsById r;
    for (int i = 0; i < 30; ++i) {
      const std::string id = "q" + std::to_string(i);
      q[id] = {"rel"};
      r[id] = with_hit_at(1 + rng.uniform_index(400), 250);
    }
    double prev = 0.0;
    for (std::size_t k : kDefaultDepths) {
      const double a = retrieval_accuracy(r, q, k);
      CHECK(a >= prev);
      CHECK(a <= 1.0);
      prev = a;
    }
    const double m = mrr_at_k(r, q);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("degradation arithmetic on published accuracy cells") {
  struct Case {
    double clean, noisy, loss;
  };
  // Dataset-level averages and typo averages at depth 20.
  for (const Case& c : {Case{79.73, 72.30, -9.31}, Case{71.63, 58.45, -18.40},
                        Case{79.40, 75.86, -4.46}, Case{79.73, 67.83, -14.93},
                        Case{71.63, 41.77, -41.69}, Case{79.40, 72.71, -8.43}}) {
    const auto avg = degradation_report({{20, c.clean / 100}},
                                        {{"average", {{20, c.noisy / 100}}}}, {20});
    CHECK(std::fabs(pp(avg.cell("average", 20).relative_loss) - c.loss) <= 0.01);
    const auto typos = degradation_report({{20, c.clean / 100}},
                                          {{"typos", {{20, c.noisy / 100}}}}, {20});
    CHECK(std::fabs(pp(typos.cell("typos", 20).relative_loss) - c.loss) <= 0.01);
  }
  // Deeper recall sets.
  const auto deep = degradation_report(
      {{100, 0.8598}, {200, 0.8825}},
      {{"average", {{100, 0.8158}, {200, 0.8431}}}}, {100, 200});
  CHECK(std::fabs(pp(deep.cell("average", 100).relative_loss) + 5.12) <= 0.01);
  CHECK(std::fabs(pp(deep.cell("average", 200).relative_loss) + 4.47) <= 0.01);
}

TEST_CASE("derived aggregates are unweighted means of the per-type rows") {
  // Per-type baseline cells at depth 20 for one dataset.
  const auto f = load_regimes();
  const auto r = report_for(f, 0);
  CHECK(std::fabs(pp(r.cell("average", 20).accuracy) - f.values.at("average")[0]) <= 0.01);
  CHECK(std::fabs(pp(r.cell("typos", 20).accuracy) - f.values.at("typos")[0]) <= 0.01);

  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    std::map<std::string, AccuracyByDepth> noisy;
    double sum = 0.0, typo_sum = 0.0;
    for (NoiseType type : kAllNoiseTypes) {
      const double a = rng.uniform_real(0.3, 0.9);
      noisy[std::string(to_string(type))][20] = a;
      sum += a;
      if (is_typo(type)) typo_sum += a;
    }
    const auto rep = degradation_report({{20, 0.95}}, noisy, {20});
    CHECK(std::fabs(rep.cell("average", 20).accuracy - sum / 10) <= 1e-9);
    CHECK(std::fabs(rep.cell("typos", 20).accuracy - typo_sum / 3) <= 1e-9);
    for (const auto& row : rep.rows) {
      const auto& c = row.cells.at(20);
      CHECK(std::fabs(c.relative_loss - (c.accuracy - 0.95) / 0.95) <= 1e-6);
    }
    CHECK(rep.rows.size() == 13);
    CHECK(rep.rows.front().name == "none");
  }
}

TEST_CASE("degradation report rules") {
  const AccuracyByDepth clean{{20, 0.8}, {100, 0.9}};
  const std::vector<std::size_t> depths{20, 100};
  const auto same = degradation_report(
      clean, {{"rcs", clean}, {"kcs", clean}, {"cd", clean}, {"rw", clean}}, depths);
  for (const auto& row : same.rows) {
    for (std::size_t k : depths) CHECK(std::fabs(row.cells.at(k).relative_loss) < 1e-12);
  }
  CHECK(same.find("typos") != nullptr);
  // Without all three typo rows there is no typo aggregate.
  CHECK(degradation_report(clean, {{"rcs", clean}}, depths).find("typos") == nullptr);

  CHECK_THROWS_AS(degradation_report(clean, {{"rcs", clean}, {"average", clean}}, depths),
                  DataError);
  CHECK_THROWS_AS(degradation_report(clean, {{"rcs", clean}, {"typos", clean}}, depths),
                  DataError);
  CHECK_THROWS_AS(degradation_report(clean, {{"nonsense", clean}}, depths), DataError);
  CHECK_THROWS_AS(degradation_report(clean, {{"rcs", {{20, 0.5}}}}, depths), DataError);
  CHECK_THROWS_AS(degradation_report({{20, 0.0}, {100, 0.1}}, {{"rcs", clean}}, depths),
                  DataError);
}

TEST_CASE("evaluate_runs requires matching query sets") {
  Qrels q{{"a", {"rel"}}, {"b", {"rel"}}};
  ResultsById clean{{"a", with_hit_at(1, 5)}, {"b", with_hit_at(1, 5)}};
  ResultsById noisy{{"a", with_hit_at(30, 50)}, {"b", with_hit_at(1, 5)}};
  const auto rep = evaluate_runs(clean, {{"rcs", noisy}}, q, {20});
  CHECK(rep.cell("rcs", 20).accuracy == 0.5);
  CHECK(rep.cell("rcs", 20).relative_loss == -0.5);
  ResultsById partial{{"a", with_hit_at(1, 5)}};
  CHECK_THROWS_AS(evaluate_runs(clean, {{"rcs", partial}}, q, {20}), DataError);
}

TEST_CASE("regime comparison reproduces published deltas") {
  const auto f = load_regimes();
  std::vector<EvalReport> reports;
  for (std::size_t c = 0; c < 4; ++c) reports.push_back(report_for(f, c));
  const auto table = compare_runs(reports);
  CHECK(table.regimes == std::vector<std::string>{"Regular", "PT", "DA", "CAPOT"});
  const auto& rcs = table.cells.at("rcs").at(20);
  CHECK(pp(rcs[0].accuracy) == doctest::Approx(67.12));
  CHECK(pp(rcs[3].accuracy) == doctest::Approx(75.43));
  CHECK(pp(rcs[3].delta) == doctest::Approx(75.43 - 67.12));
  // Loss columns are relative to the reference clean accuracy; every
  // non-reference column reproduces at two decimals within one unit.
  for (const auto& [row, v] : f.values) {
    for (std::size_t c = 1; c < 4; ++c) {
      const double loss = std::stod(format_percent(table.cells.at(row).at(20)[c].loss));
      CHECK(std::fabs(loss - v[2 * c + 1]) <= 0.0100001);
    }
  }
  const std::string csv = comparison_to_csv(table);
  CHECK(csv.rfind("noise_type,k,Regular,Regular_loss,PT,PT_loss,DA,DA_loss,CAPOT,CAPOT_loss\n", 0) == 0);
  CHECK(csv.find("rcs,20,67.12,") != std::string::npos);
}

TEST_CASE("comparison identities and schema checks") {
  const auto f = load_regimes();
  const auto r = report_for(f, 0);
  const auto single = compare_runs({r});
  for (const auto& row : r.rows) {
    const auto& c = single.cells.at(row.name).at(20)[0];
    CHECK(c.accuracy == row.cells.at(20).accuracy);
    CHECK(c.loss == row.cells.at(20).relative_loss);
  }
  const auto pair = compare_runs({r, r});
  for (const auto& [row, by_k] : pair.cells) CHECK(by_k.at(20)[1].delta == 0.0);

  auto other = r;
  other.depths = {100};
  CHECK_THROWS_AS(compare_runs({r, other}), DataError);
  auto fewer = r;
  fewer.rows.pop_back();
  CHECK_THROWS_AS(compare_runs({r, fewer}), DataError);
  CHECK_THROWS_AS(compare_runs({}), UsageError);
}

TEST_CASE("report serialization") {
  const auto f = load_regimes();
  auto r = report_for(f, 3);
  r.seed = 7;
  r.dataset_hash = "abc";
  const std::string csv = report_to_csv(r);
  CHECK(csv.rfind("noise_type,k,accuracy,relative_loss,regime,seed\n", 0) == 0);
  CHECK(csv.find("\nrcs,20,75.43,-3.10,CAPOT,7\n") != std::string::npos);
  const auto back = report_from_csv(csv);
  CHECK(back.regime == "CAPOT");
  CHECK(back.seed == 7);
  CHECK(report_to_csv(back) == csv);

  const auto j = report_from_json(report_to_json(r));
  CHECK(j.dataset_hash == "abc");
  for (const auto& row : r.rows) {
    CHECK(j.cell(row.name, 20).accuracy == row.cells.at(20).accuracy);
    CHECK(j.cell(row.name, 20).relative_loss == row.cells.at(20).relative_loss);
  }
  CHECK(format_percent(-0.00001) == "0.00");
  CHECK_THROWS_AS(report_from_csv("bad header\n"), DataError);
  CHECK_THROWS_AS(report_from_csv("noise_type,k,accuracy,relative_loss,regime,seed\nnone,x,1,1,R,1\n"),
                  DataError);
  CHECK_THROWS_AS(report_from_json("{"), DataError);
}

}  // namespace capot
