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
#include <cctype>
#include <filesystem>
#include <map>
#include <fstream>
#include <set>
#include <string>

#include "capot/errors.hpp"
#include "capot/text.hpp"
#include "capot/text_resources.hpp"
#include "doctest.h"

namespace {

using capot::TextResources;

const TextResources& res() { return TextResources::bundled(); }

std::vector<std::pair<std::string, std::string>> porter_reference() {
  std::ifstream in(std::string(CAPOT_FIXTURE_DIR) + "/porter_reference.tsv");
  REQUIRE(in.good());
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

bool is_lower_token(const std::string& s) {
  if (s.empty()) return false;
  for (char32_t c : capot::text::to_u32(s)) {
    if (capot::text::is_space(c) || capot::text::lower(c) != c) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("stem: examples") {
  CHECK(res().stem("recorded") == "record");
  CHECK(res().stem("a") == "a");
  CHECK(res().stem("caresses") == "caress");
  CHECK(res().stem("Recorded") == "record");
  CHECK(res().stem("2019") == "2019");
  CHECK(res().stem("one?") == "one?");
}

TEST_CASE("stem: matches the reference Porter word list") {
  auto rows = porter_reference();
  REQUIRE(rows.size() > 3000);
  std::size_t mismatches = 0;
  for (const auto& [word, expected] : rows) {
    std::string got = capot::porter_stem(word);
    if (got != expected) {
      ++mismatches;
      MESSAGE(word << ": expected " << expected << ", got " << got);
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("stem: deterministic, and idempotent wherever the reference is") {
  // The reference list includes every stem as a word, so stem(stem(w)) is
  // checked against the reference for all words.
  auto rows = porter_reference();
  std::map<std::string, std::string> ref(rows.begin(), rows.end());
  for (const auto& [word, expected] : rows) {
    std::string once = capot::porter_stem(word);
    CHECK(capot::porter_stem(word) == once);
    if (once.size() < 3) continue;
    auto it = ref.find(once);
    REQUIRE(it != ref.end());
    CHECK(capot::porter_stem(once) == it->second);
  }
}

TEST_CASE("lemmatize: examples") {
  CHECK(res().lemmatize("plays") == "play");
  CHECK(res().lemmatize("play") == "play");
  CHECK(res().lemmatize("better") == "good");
  CHECK(res().lemmas().exceptions().at("better") == "good");
  CHECK(res().lemmatize("studies") == "study");
  CHECK(res().lemmatize("running") == "run");
  CHECK(res().lemmatize("glasses") == "glass");
  CHECK(res().lemmatize("bus") == "bus");
  CHECK(res().lemmatize("need") == "need");
  CHECK(res().lemmatize("zzzz") == "zzzz");
}

TEST_CASE("lemmatize: idempotent on bundled entries and the test word list") {
  const auto& table = res().lemmas();
  for (const auto& [form, lemma] : table.exceptions()) {
    INFO(form << " -> " << lemma);
    CHECK(res().lemmatize(lemma) == lemma);
  }
  for (const auto& [word, unused] : porter_reference()) {
    std::string once = res().lemmatize(word);
    INFO(word << " -> " << once);
    CHECK(res().lemmatize(once) == once);
  }
}

TEST_CASE("synonyms_of: examples") {
  const auto& capital = res().synonyms_of("capital");
  CHECK(std::find(capital.begin(), capital.end(), "majuscule") != capital.end());
  CHECK(res().synonyms_of("Capital") == capital);
  CHECK(res().synonyms_of("zzzz").empty());
  const auto& big = res().synonyms_of("big");
  CHECK_FALSE(big.empty());
  CHECK(std::find(big.begin(), big.end(), "big") == big.end());
}

TEST_CASE("synonym lexicon invariants") {
  const auto& lex = res().synonyms();
  CHECK(lex.size() >= 2000);
  for (const auto& [token, syns] : lex.entries()) {
    INFO(token);
    CHECK(is_lower_token(token));
    CHECK_FALSE(syns.empty());
    for (const auto& s : syns) {
      CHECK(s != token);
      CHECK(is_lower_token(s));
    }
  }
}

TEST_CASE("keyboard_neighbors: examples") {
  auto i = res().keyboard_neighbors(U'i');
  CHECK(std::find(i.begin(), i.end(), U'j') != i.end());
  CHECK(res().keyboard_neighbors(U' ').empty());
  auto s = res().keyboard_neighbors(U's');
  CHECK(std::set<char32_t>(s.begin(), s.end()) ==
        std::set<char32_t>{U'a', U'd', U'w', U'e', U'x', U'z', U'q'});
  CHECK(res().keyboard_neighbors(U'S') == s);
}

TEST_CASE("keyboard map: symmetric, every letter has at least two neighbours") {
  const auto& adj = res().keyboard().adjacency();
  for (const auto& [c, neighbors] : adj) {
    for (char32_t n : neighbors) {
      auto back = res().keyboard_neighbors(n);
      CHECK(std::find(back.begin(), back.end(), c) != back.end());
    }
  }
  for (char32_t c = U'a'; c <= U'z'; ++c) {
    CHECK(res().keyboard_neighbors(c).size() >= 2);
  }
  for (char32_t c = U'0'; c <= U'9'; ++c) CHECK(adj.count(c) == 1);
}

TEST_CASE("determiner and stopword lists") {
  const auto& det = res().determiners().words();
  REQUIRE_FALSE(det.empty());
  for (const auto& d : det) {
    CHECK(is_lower_token(d));
    CHECK(res().stopwords().contains(d));
  }
  CHECK(res().stopwords().contains("The"));
}

TEST_CASE("back-translation table is closed under substitution") {
  const auto& table = res().backtranslation();
  REQUIRE_FALSE(table.empty());
  for (const auto& [src, dst] : table) CHECK(table.count(dst) == 0);
}

TEST_CASE("resources load from override files") {
  auto dir = std::filesystem::temp_directory_path() / "capot_res_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "syn.tsv") << "# comment\nfoo\tbar,baz\n";
    std::ofstream(dir / "det.txt") << "zz\n";
  }
  capot::ResourcePaths paths;
  paths.synonyms = dir / "syn.tsv";
  paths.determiners = dir / "det.txt";
  auto custom = TextResources::load(paths);
  CHECK(custom.synonyms().size() == 1);
  CHECK(custom.synonyms_of("foo") == std::vector<std::string>{"bar", "baz"});
  CHECK(custom.determiners().words() == std::vector<std::string>{"zz"});
  CHECK(custom.lemmatize("plays") == "play");

  {
    std::ofstream(dir / "bad.tsv") << "self\tself\n";
  }
  paths.synonyms = dir / "bad.tsv";
  CHECK_THROWS_AS(TextResources::load(paths), capot::DataError);
  paths.synonyms = dir / "missing.tsv";
  CHECK_THROWS_AS(TextResources::load(paths), capot::DataError);
  std::filesystem::remove_all(dir);
}
