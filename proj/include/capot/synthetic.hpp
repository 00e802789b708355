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

#ifndef CAPOT_SYNTHETIC_HPP_
#define CAPOT_SYNTHETIC_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "capot/evaluation.hpp"
#include "capot/index.hpp"
#include "capot/noise.hpp"

namespace capot {

struct SyntheticOptions {
  std::size_t num_queries = 500;
  std::size_t vocab_size = 2000;
  std::uint64_t seed = 7;
  std::size_t min_query_tokens = 4;
  std::size_t max_query_tokens = 9;
  std::size_t min_passage_tokens = 30;
  std::size_t max_passage_tokens = 60;
  std::size_t distractors_per_query = 4;
  // The vocabulary starts with function_words high-frequency words, followed
  // by content_vocab_size words that queries draw their content from.
  std::size_t function_words = 24;  // single-syllable
  std::size_t min_syllables = 2;     // content and filler words
  std::size_t max_syllables = 3;
  std::size_t content_vocab_size = 150;
  std::size_t min_content_tokens = 2;
  std::size_t max_content_tokens = 4;
  // Share of filler tokens drawn from the function words.
  double function_word_rate = 0.3;
  // Words that must not appear in the vocabulary, e.g. another corpus's.
  std::set<std::string> excluded_words;
  // Words carried over from another corpus. They open the function and
  // content lists respectively and bypass excluded_words.
  std::vector<std::string> shared_function_words;
  std::vector<std::string> shared_content_words;
};

struct SyntheticCorpus {
  std::vector<std::string> vocabulary;
  std::vector<Query> queries;
  std::vector<Passage> passages;
  Qrels qrels;
};

// Distinct pseudo-words of min_syllables to max_syllables consonant-vowel
// syllables, in seed order.
std::vector<std::string> synthetic_vocabulary(std::size_t size, std::uint64_t seed,
                                              const std::set<std::string>& excluded = {},
                                              std::size_t min_syllables = 2,
                                              std::size_t max_syllables = 3);

// Each query is 4-9 distinct words: a few content words plus function words.
// Its relevant passage holds all of them among filler words; each of its
// distractor passages holds one or two of its content words. Passages are
// shuffled so position carries no signal.
SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options);

// Lexical reference scorer: counts the query's distinct hashed character
// n-grams present in each passage. Used to confirm a corpus is solvable.
ResultsById lexical_search(const std::vector<Query>& queries,
                           const std::vector<Passage>& passages, std::size_t k);

}  // namespace capot

#endif  // CAPOT_SYNTHETIC_HPP_
