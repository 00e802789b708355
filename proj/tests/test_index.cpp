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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "capot/binary_io.hpp"
#include "capot/errors.hpp"
#include "capot/index.hpp"
#include "capot/random.hpp"
#include "doctest.h"
#include "json.hpp"

namespace capot {
namespace {

namespace fs = std::filesystem;

double gaussian(Rng& rng) {
  // Box-Muller on the portable uniform stream.
  const double u1 = 1.0 - rng.uniform_real();
  const double u2 = rng.uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = gaussian(rng);
  return v;
}

DocumentIndex gaussian_index(std::size_t n, std::size_t dim, std::uint64_t seed,
                             bool unit = false, bool quantize_ties = false) {
  Rng rng(seed);
  std::vector<std::string> ids;
  std::vector<float> m;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("d" + std::to_string(i));
    auto v = gaussian_vector(rng, dim);
    double norm = 0;
    for (double x : v) norm += x * x;
    for (double x : v) {
      double y = unit ? x / std::sqrt(norm) : x;
      if (quantize_ties) y = std::round(y);
      m.push_back(static_cast<float>(y));
    }
  }
  // Shuffle ids so row order and id order disagree.
  rng.shuffle(ids);
  return DocumentIndex(ids, m, dim);
}

// Full scan and sort, written independently of the index internals.
std::vector<std::string> oracle_top_k(const DocumentIndex& index,
                                      const std::vector<double>& q,
                                      std::size_t k) {
  struct Row {
    double score;
    std::string id;
  };
  std::vector<Row> rows;
  for (std::size_t r = 0; r < index.size(); ++r) {
    double s = 0;
    const auto v = index.vector(r);
    for (std::size_t d = 0; d < q.size(); ++d) s += double(v[d]) * q[d];
    rows.push_back({s, index.ids()[r]});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, rows.size()); ++i) out.push_back(rows[i].id);
  return out;
}

std::vector<std::string> ids_of(const SearchResult& r) {
  std::vector<std::string> out;
  for (const auto& h : r) out.push_back(h.id);
  return out;
}

double overlap(const SearchResult& a, const std::vector<std::string>& exact) {
  std::set<std::string> e(exact.begin(), exact.end());
  std::size_t hit = 0;
  for (const auto& h : a) hit += e.count(h.id);
  return double(hit) / double(exact.size());
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "capot_index_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("single passage index") {
  const auto params = init_params(8, 1024, 1);
  const auto index = build_index(params, {{"p1", "hello world"}});
  CHECK(index.size() == 1);
  const auto q = embed(params, featurize("anything at all", 1024));
  const auto r = index.search_exact(q, 20);
  REQUIRE(r.size() == 1);
  CHECK(r[0].id == "p1");
}

TEST_CASE("build validation and determinism") {
  const auto params = init_params(8, 1024, 1);
  CHECK_THROWS_AS(build_index(params, {}), DataError);
  CHECK_THROWS_AS(build_index(params, {{"a", "x"}, {"a", "y"}}), DataError);
  std::vector<Passage> ps;
  for (int i = 0; i < 30; ++i) ps.push_back({"p" + std::to_string(i), "text number " + std::to_string(i)});
  const auto dir = scratch();
  save_index(build_index(params, ps), dir / "a.idx");
  save_index(build_index(params, ps), dir / "b.idx");
  CHECK(binary::file_checksum(dir / "a.idx") == binary::file_checksum(dir / "b.idx"));
}

TEST_CASE("stored passage vectors are unit length") {
  const auto params = init_params(64, 1 << 14, 3);
  Rng rng(4);
  std::vector<Passage> ps;
  for (int i = 0; i < 1000; ++i) {
    std::string t;
    for (int w = 0; w < 6; ++w) {
      t += char('a' + rng.uniform_index(26));
      t += char('a' + rng.uniform_index(26));
      t += char('a' + rng.uniform_index(26));
      t += ' ';
    }
    ps.push_back({"p" + std::to_string(i), t});
  }
  const auto index = build_index(params, ps);
  for (std::size_t r = 0; r < index.size(); ++r) {
    double n = 0;
    for (float x : index.vector(r)) n += double(x) * x;
    CHECK(std::fabs(std::sqrt(n) - 1.0) < 1e-6);
  }
}

TEST_CASE("exact search basics") {
  const auto index = gaussian_index(50, 8, 1, true);
  Rng rng(2);
  const auto q = gaussian_vector(rng, 8);
  const auto all = index.search_exact(q, 500);
  CHECK(all.size() == 50);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].score >= all[i].score);
  // A stored unit vector finds itself first.
  std::vector<double> self(index.vector(17).begin(), index.vector(17).end());
  const auto r = index.search_exact(self, 1);
  CHECK(r[0].id == index.ids()[17]);
  CHECK(r[0].score == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(index.search_exact(std::vector<double>(7, 0.0), 3), std::invalid_argument);
  CHECK_THROWS_AS(index.search_exact(q, 0), UsageError);
}

TEST_CASE("exact search equals the naive scan oracle") {
  for (bool ties : {false, true}) {
    const auto small = gaussian_index(200, 16, 5, false, ties);
    const auto big = gaussian_index(1000, 64, 6, false, ties);
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
      auto q16 = gaussian_vector(rng, 16);
      auto q64 = gaussian_vector(rng, 64);
      if (ties) {
        for (double& x : q16) x = std::round(x);
        for (double& x : q64) x = std::round(x);
      }
      CHECK(ids_of(small.search_exact(q16, 10)) == oracle_top_k(small, q16, 10));
      for (std::size_t k : {20, 100, 200}) {
        CHECK(ids_of(big.search_exact(q64, k)) == oracle_top_k(big, q64, k));
      }
    }
  }
}

TEST_CASE("ivf structure and degenerate probes") {
  const auto base = gaussian_index(1000, 64, 8);
  CHECK_THROWS_AS(base.with_ivf(1001, 1), UsageError);
  CHECK_THROWS_AS(base.search_ivf(std::vector<double>(64, 1.0), 5, 1), UsageError);
  const auto index = base.with_ivf(32, 9);
  CHECK(base == gaussian_index(1000, 64, 8));
  REQUIRE(index.ivf().has_value());
  std::vector<int> seen(1000, 0);
  for (const auto& list : index.ivf()->lists) {
    for (auto r : list) ++seen[r];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  CHECK(index.with_ivf(32, 9) == base.with_ivf(32, 9));

  Rng rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto q = gaussian_vector(rng, 64);
    for (std::size_t k : {10, 20, 100, 200}) {
      CHECK(ids_of(index.search_ivf(q, k, 32)) == ids_of(index.search_exact(q, k)));
    }
    const auto one = index.search_ivf(q, 10, 1);
    bool inside_one_list = false;
    for (const auto& list : index.ivf()->lists) {
      std::set<std::uint32_t> members(list.begin(), list.end());
      bool all = true;
      for (const auto& h : one) all = all && members.count(h.doc);
      inside_one_list = inside_one_list || all;
    }
    CHECK(inside_one_list);
  }
  CHECK_THROWS_AS(index.search_ivf(gaussian_vector(rng, 64), 5, 0), UsageError);
  CHECK_THROWS_AS(index.search_ivf(gaussian_vector(rng, 64), 5, 33), UsageError);
}

TEST_CASE("ivf recall is monotone in nprobe and meets the calibrated floor") {
  std::ifstream in(fs::path(CAPOT_FIXTURE_DIR) / "ivf_calibration.json");
  const auto cal = nlohmann::json::parse(in);
  const std::size_t dim = cal["dim"];
  const auto index = gaussian_index(cal["docs"], dim, cal["doc_seed"])
                         .with_ivf(cal["centroids"], cal["ivf_seed"]);
  Rng rng(cal["query_seed"].get<std::uint64_t>());
  const std::size_t probes[] = {1, 2, 4, 8, 16, 32};
  std::vector<double> mean(6, 0.0);
  const int queries = cal["queries"];
  for (int t = 0; t < queries; ++t) {
    const auto q = gaussian_vector(rng, dim);
    const auto exact = oracle_top_k(index, q, cal["k"]);
    double prev = -1;
    for (std::size_t i = 0; i < 6; ++i) {
      const double o = overlap(index.search_ivf(q, cal["k"], probes[i]), exact);
      CHECK(o >= prev);
      prev = o;
      mean[i] += o / queries;
    }
  }
  for (std::size_t i = 0; i < 6; ++i) {
    MESSAGE("nprobe=" << probes[i] << " mean overlap=" << mean[i]);
  }
  CHECK(mean[5] == doctest::Approx(1.0));
  CHECK(mean[3] >= cal["floor"].get<double>());
  CHECK(mean[3] == doctest::Approx(cal["measured_mean_overlap"].get<double>()));
}

TEST_CASE("ivf recall on clustered data") {
  // Mixture of 32 well separated unit-norm clusters.
  std::ifstream in(fs::path(CAPOT_FIXTURE_DIR) / "ivf_calibration.json");
  const auto cal = nlohmann::json::parse(in);
  Rng rng(21);
  const std::size_t dim = 64;
  std::vector<std::vector<double>> centers;
  for (int c = 0; c < 32; ++c) centers.push_back(gaussian_vector(rng, dim));
  std::vector<std::string> ids;
  std::vector<float> m;
  for (int i = 0; i < 1000; ++i) {
    const auto& c = centers[rng.uniform_index(32)];
    ids.push_back("d" + std::to_string(i));
    for (std::size_t d = 0; d < dim; ++d) m.push_back(float(c[d] + 0.3 * gaussian(rng)));
  }
  const auto index = DocumentIndex(ids, m, dim).with_ivf(32, 22);
  double mean = 0;
  for (int t = 0; t < 100; ++t) {
    auto q = centers[rng.uniform_index(32)];
    for (double& x : q) x += 0.3 * gaussian(rng);
    mean += overlap(index.search_ivf(q, 10, 8), oracle_top_k(index, q, 10)) / 100;
  }
  MESSAGE("clustered mean overlap=" << mean);
  CHECK(mean >= cal["clustered_floor"].get<double>());
}

TEST_CASE("index files round trip") {
  const auto dir = scratch();
  const auto index = gaussian_index(300, 16, 14).with_ivf(8, 15);
  save_index(index, dir / "i.idx");
  const auto loaded = load_index(dir / "i.idx");
  CHECK(loaded == index);
  save_index(loaded, dir / "j.idx");
  CHECK(binary::file_checksum(dir / "i.idx") == binary::file_checksum(dir / "j.idx"));
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    const auto q = gaussian_vector(rng, 16);
    const auto a = index.search_exact(q, 10), b = loaded.search_exact(q, 10);
    CHECK(ids_of(a) == ids_of(b));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
    CHECK(ids_of(index.search_ivf(q, 10, 2)) == ids_of(loaded.search_ivf(q, 10, 2)));
  }

  // Corrupt magic.
  {
    std::fstream f(dir / "j.idx", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_WITH_AS(load_index(dir / "j.idx"), doctest::Contains("bad magic"), DataError);
  // Truncation.
  const auto size = fs::file_size(dir / "i.idx");
  fs::copy_file(dir / "i.idx", dir / "t.idx", fs::copy_options::overwrite_existing);
  fs::resize_file(dir / "t.idx", size - 10);
  CHECK_THROWS_WITH_AS(load_index(dir / "t.idx"), doctest::Contains("truncated"), DataError);
  // Version mismatch.
  fs::copy_file(dir / "i.idx", dir / "v.idx", fs::copy_options::overwrite_existing);
  {
    std::fstream f(dir / "v.idx", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const std::uint32_t v = 99;
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
  CHECK_THROWS_WITH_AS(load_index(dir / "v.idx"), doctest::Contains("version 99"), DataError);
}

}  // namespace capot
