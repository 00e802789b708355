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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "capot/errors.hpp"
#include "capot/noise.hpp"
#include "capot/rewrite.hpp"
#include "capot/text.hpp"
#include "capot/text_resources.hpp"
#include "doctest.h"

namespace capot {
namespace {

const TextResources& res() { return TextResources::bundled(); }

std::vector<std::string> words_of(const std::string& s) {
  return text::split_whitespace(s);
}

// Random multi-word query drawn from a vocabulary that exercises every
// noise type: lexicon words, inflected forms, capitals and punctuation.
std::string random_query(Rng& rng) {
  static const std::vector<std::string> kVocab = {
      "who",      "sang",     "waiting",  "for",      "a",       "girl",
      "like",     "you",      "capital",  "Capital",  "plays",   "recorded",
      "big",      "little",   "lies",     "season",   "2",       "how",
      "many",     "episodes", "when",     "did",      "veterans", "day",
      "start",    "being",    "called",   "main",     "character", "in",
      "green",    "eggs",     "and",      "ham",      "punishment?", "(ncis)",
      "studies",  "running",  "Quickly",  "the",      "of",      "zzxq",
      "café",     "naïve",    "x",        "song,",    "won't",   "IBM"};
  const std::size_t n = 1 + rng.uniform_index(9);
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < n; ++i) {
    toks.push_back(kVocab[rng.uniform_index(kVocab.size())]);
  }
  return text::join(toks);
}

// True when b equals a with exactly one code point removed.
bool is_single_deletion(const std::u32string& a, const std::u32string& b) {
  if (b.size() + 1 != a.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::u32string t = a;
    t.erase(i, 1);
    if (t == b) return true;
  }
  return false;
}

std::size_t hamming(const std::u32string& a, const std::u32string& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Every string reachable by one keyboard edit: (anchor, placement, neighbor).
std::set<std::u32string> keyboard_edits(const std::u32string& s) {
  std::set<std::u32string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (char32_t c : res().keyboard().neighbors(s[i])) {
      std::u32string left = s, right = s, at = s;
      left.insert(i, 1, c);
      right.insert(i + 1, 1, c);
      at[i] = c;
      out.insert(left);
      out.insert(right);
      out.insert(at);
    }
  }
  return out;
}

std::set<std::u32string> random_edits(const std::u32string& s) {
  const std::u32string pool = U"abcdefghijklmnopqrstuvwxyz ";
  std::set<std::u32string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (char32_t c : pool) {
      std::u32string left = s, right = s, at = s;
      left.insert(i, 1, c);
      right.insert(i + 1, 1, c);
      at[i] = c;
      out.insert(left);
      out.insert(right);
      if (at != s) out.insert(at);
    }
  }
  return out;
}

constexpr int kCases = 10000;

NoisedQuery noise(const std::string& text, NoiseType type, std::uint64_t seed,
                  const QueryNoiser& noiser) {
  return noiser.apply_with_seed(Query{"q", text}, type, seed, NoiseConfig{});
}

}  // namespace

TEST_CASE("noise type names round trip over the closed set") {
  std::set<std::string> names;
  for (NoiseType t : kAllNoiseTypes) {
    names.insert(std::string(to_string(t)));
    CHECK(parse_noise_type(to_string(t)) == t);
  }
  CHECK(names == std::set<std::string>{"determiner", "synonym", "lemmatize",
                                       "stem", "rcs", "kcs", "cd", "rw", "bt",
                                       "paraphrase"});
  CHECK_FALSE(parse_noise_type("typo").has_value());
  CHECK(is_typo(NoiseType::kKcs));
  CHECK_FALSE(is_typo(NoiseType::kRw));
}

TEST_CASE("noise config validation") {
  NoiseConfig c;
  CHECK_NOTHROW(c.validate());
  c.placement = {0.5, 0.5, 0.0};
  CHECK_NOTHROW(c.validate());
  c.placement = {0.5, 0.6, -0.1};
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.placement = {0.5, 0.5, 0.1};
  CHECK_THROWS_AS(c.validate(), UsageError);
  NoiseConfig empty;
  empty.enabled_types.clear();
  CHECK_THROWS_AS(empty.validate(), UsageError);
}

TEST_CASE("anchor index selection") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng a(s), b(s);
    const auto i = select_anchor_index("ab", Granularity::kCharacter, a);
    CHECK(i < 2);
    CHECK(select_anchor_index("ab", Granularity::kCharacter, b) == i);
    Rng w(s);
    CHECK(select_anchor_index("who sang", Granularity::kWord, w) < 2);
  }
  Rng r(1);
  CHECK_THROWS_WITH_AS(select_anchor_index("", Granularity::kCharacter, r),
                       "empty query", DataError);
  CHECK_THROWS_WITH_AS(select_anchor_index("   ", Granularity::kWord, r),
                       "empty query", DataError);
}

TEST_CASE("anchor index is uniform over five tokens") {
  Rng rng(2024);
  std::vector<int> counts(5, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ++counts[select_anchor_index("one two three four five",
                                 Granularity::kWord, rng)];
  }
  double chi2 = 0.0;
  const double expected = draws / 5.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // Upper 1% point of chi-squared with 4 degrees of freedom.
  CHECK(chi2 < 13.2767);
}

TEST_CASE("primitive edit operations") {
  CHECK(noise_ops::delete_character("abc", 1) == "ac");
  CHECK(noise_ops::place_character("abc", 1, Placement::kLeft, U'x') == "axbc");
  CHECK(noise_ops::place_character("abc", 1, Placement::kRight, U'x') == "abxc");
  CHECK(noise_ops::place_character("abc", 1, Placement::kAt, U'x') == "axc");
  CHECK(noise_ops::delete_character("café", 3) == "caf");
  CHECK(noise_ops::swap_words("a b c", 0, 2) == "c b a");
  CHECK(noise_ops::place_word("who sang", 1, Placement::kLeft, "the") ==
        "who the sang");
  CHECK(noise_ops::place_word("who sang", 0, Placement::kAt, "a") == "a sang");
  CHECK_THROWS(noise_ops::delete_character("abc", 3));
}

TEST_CASE("lexical exemplars resolve") {
  CHECK(res().stem("recorded") == "record");
  const auto& syns = res().synonyms_of("capital");
  CHECK(std::find(syns.begin(), syns.end(), "majuscule") != syns.end());
  CHECK(res().lemmatize("plays") == "play");

  QueryNoiser noiser(res());
  const auto stemmed =
      noise("who recorded the song still the one?", NoiseType::kStem, 3, noiser);
  CHECK(words_of(stemmed.text)[1] == "record");
  const auto lemma =
      noise("who plays young dr mallard on ncis", NoiseType::kLemmatize, 3, noiser);
  CHECK(words_of(lemma.text)[1] == "play");

  bool saw_majuscule = false;
  for (std::uint64_t s = 0; s < 200 && !saw_majuscule; ++s) {
    const auto out = noise(
        "Which was the first European country to abolish capital punishment?",
        NoiseType::kSynonym, s, noiser);
    saw_majuscule = out.text ==
        "Which was the first European country to abolish majuscule "
        "punishment?";
  }
  CHECK(saw_majuscule);
}

TEST_CASE("determiner example inserts or substitutes one determiner") {
  QueryNoiser noiser(res());
  const std::string input = "who sang waiting for a girl like you";
  const auto in = words_of(input);
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto out = words_of(noise(input, NoiseType::kDeterminer, s, noiser).text);
    if (out.size() == in.size() + 1) {
      bool ok = false;
      for (std::size_t i = 0; i < out.size() && !ok; ++i) {
        auto t = out;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
        ok = t == in && res().determiners().contains(out[i]);
      }
      CHECK(ok);
    } else {
      REQUIRE(out.size() == in.size());
      std::size_t diffs = 0;
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] != out[i]) {
          ++diffs;
          CHECK(res().determiners().contains(out[i]));
        }
      }
      CHECK(diffs <= 1);
    }
  }
}

TEST_CASE("keyboard swap example lies in the brute-force edit set") {
  QueryNoiser noiser(res());
  const std::string input =
      "when did veterans day start being called veterans day";
  const auto reachable = keyboard_edits(text::to_u32(input));
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto out = noise(input, NoiseType::kKcs, s, noiser);
    CHECK(reachable.count(text::to_u32(out.text)) == 1);
  }
  // The worked example from the typo literature is itself reachable.
  CHECK(reachable.count(
            U"when djid veterans day start being called veterans day") == 1);
}

TEST_CASE("character delete example") {
  QueryNoiser noiser(res());
  std::set<std::string> outs;
  for (std::uint64_t s = 0; s < 200; ++s) {
    outs.insert(noise("abc", NoiseType::kCd, s, noiser).text);
  }
  CHECK(outs == std::set<std::string>{"bc", "ac", "ab"});
  CHECK(outs.count("ac") == 1);
}

TEST_CASE("structural invariants hold per type") {
  QueryNoiser noiser(res());
  Rng gen(99);
  for (int c = 0; c < kCases; ++c) {
    const std::string input = random_query(gen);
    const std::u32string in32 = text::to_u32(input);
    const auto in_words = words_of(input);
    const std::uint64_t seed = gen.next_u64();
    CAPTURE(input);
    CAPTURE(seed);

    {
      const auto out = text::to_u32(noise(input, NoiseType::kCd, seed, noiser).text);
      CHECK(out.size() + 1 == in32.size());
      CHECK(is_single_deletion(in32, out));
    }
    {
      const auto out = text::to_u32(noise(input, NoiseType::kRcs, seed, noiser).text);
      const bool insert = out.size() == in32.size() + 1 && is_single_deletion(out, in32);
      const bool subst = out.size() == in32.size() && hamming(in32, out) == 1;
      CHECK((insert || subst));
    }
    {
      const auto out = text::to_u32(noise(input, NoiseType::kKcs, seed, noiser).text);
      const bool insert = out.size() == in32.size() + 1 && is_single_deletion(out, in32);
      const bool subst = out.size() == in32.size() && hamming(in32, out) == 1;
      CHECK((insert || subst));
      if (!keyboard_edits(in32).count(out)) {
        // Anchors without neighbors fall back to a random swap.
        CHECK(random_edits(in32).count(out) == 1);
      }
    }
    {
      auto out = words_of(noise(input, NoiseType::kRw, seed, noiser).text);
      auto sorted_in = in_words;
      std::sort(out.begin(), out.end());
      std::sort(sorted_in.begin(), sorted_in.end());
      CHECK(out == sorted_in);
    }
    {
      const auto out = words_of(noise(input, NoiseType::kDeterminer, seed, noiser).text);
      CHECK((out.size() == in_words.size() || out.size() == in_words.size() + 1));
    }
    for (NoiseType t : {NoiseType::kStem, NoiseType::kLemmatize,
                        NoiseType::kSynonym}) {
      const auto out = words_of(noise(input, t, seed, noiser).text);
      REQUIRE(out.size() == in_words.size());
      std::size_t changed = 0;
      for (std::size_t i = 0; i < out.size(); ++i) changed += out[i] != in_words[i];
      if (t == NoiseType::kSynonym) {
        CHECK(changed <= 1);
      } else {
        CHECK(changed <= NoiseConfig{}.max_stem_lemma_words);
      }
    }
  }
}

TEST_CASE("un-noised queries pass through verbatim") {
  QueryNoiser noiser(res());
  const std::string input = "  zzxq   qqxz  ";
  for (NoiseType t : {NoiseType::kStem, NoiseType::kLemmatize,
                      NoiseType::kSynonym}) {
    CHECK(noise(input, t, 5, noiser).text == input);
  }
  CHECK(noise("solo", NoiseType::kRw, 5, noiser).text == "solo");
  CHECK(noise("day day", NoiseType::kRw, 5, noiser).text == "day day");
}

TEST_CASE("empty queries are rejected") {
  QueryNoiser noiser(res());
  for (NoiseType t : kOfflineNoiseTypes) {
    CHECK_THROWS_AS(noise("  ", t, 1, noiser), DataError);
  }
}

TEST_CASE("rewrite types need a backend") {
  QueryNoiser offline(res());
  CHECK_THROWS_WITH_AS(noise("what is a charter", NoiseType::kBt, 1, offline),
                       "rewrite backend required", BackendError);
  QueryNoiser stubbed(res(), std::make_shared<StubRewriteBackend>(res()));
  CHECK_FALSE(noise("what is a charter", NoiseType::kParaphrase, 1, stubbed)
                  .text.empty());
}

TEST_CASE("noise_dataset cardinality, order and determinism") {
  std::vector<Query> queries;
  for (int i = 0; i < 10; ++i) {
    queries.push_back({"q" + std::to_string(i),
                       "who sang waiting for a girl like you " + std::to_string(i)});
  }
  QueryNoiser noiser(res());
  NoiseConfig config;
  config.master_seed = 42;
  const auto a = noiser.noise_dataset(queries, config);
  const auto b = noiser.noise_dataset(queries, config);
  REQUIRE(a.size() == 80);
  std::set<std::pair<std::string, NoiseType>> keys;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].anchor_id == queries[i / 8].id);
    CHECK(a[i].noise_type == kOfflineNoiseTypes[i % 8]);
    CHECK(a[i].seed == record_seed(42, a[i].anchor_id, a[i].noise_type));
    CHECK(a[i].text == b[i].text);
    CHECK_FALSE(text::trim(a[i].text).empty());
    keys.insert({a[i].anchor_id, a[i].noise_type});
  }
  CHECK(keys.size() == 80);

  // Any record can be regenerated in isolation from its seed.
  const auto& r = a[37];
  CHECK(noiser.apply_with_seed(queries[37 / 8], r.noise_type, r.seed, config).text ==
        r.text);

  config.master_seed = 43;
  const auto c = noiser.noise_dataset(queries, config);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += a[i].text != c[i].text;
  CHECK(differing >= 1);
}

TEST_CASE("noise_dataset input validation") {
  QueryNoiser noiser(res());
  CHECK_THROWS_AS(noiser.noise_dataset({}, NoiseConfig{}), DataError);
  CHECK_THROWS_AS(noiser.noise_dataset({{"a", "x y"}, {"a", "z"}}, NoiseConfig{}),
                  DataError);
  try {
    noiser.noise_dataset({{"ok", "fine"}, {"bad", "   "}}, NoiseConfig{});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad") != std::string::npos);
  }
}

}  // namespace capot
