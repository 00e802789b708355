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

#include "capot/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "capot/encoder.hpp"
#include "capot/errors.hpp"
#include "capot/random.hpp"
#include "capot/text.hpp"

namespace capot {
namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string padded_id(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, i);
  return buf;
}

// Places each kept token at a random position among the filler, preserving the
// order of both.
std::vector<std::string> interleave(const std::vector<std::string>& keep,
                                    const std::vector<std::string>& filler, Rng& rng) {
  const std::size_t total = keep.size() + filler.size();
  std::vector<std::size_t> slots = rng.sample_without_replacement(total, keep.size());
  std::sort(slots.begin(), slots.end());
  std::vector<std::string> out;
  out.reserve(total);
  std::size_t ki = 0, fi = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (ki < slots.size() && slots[ki] == pos) {
      out.push_back(keep[ki++]);
    } else {
      out.push_back(filler[fi++]);
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> synthetic_vocabulary(std::size_t size, std::uint64_t seed,
                                              const std::set<std::string>& excluded,
                                              std::size_t min_syllables,
                                              std::size_t max_syllables) {
  if (min_syllables == 0 || min_syllables > max_syllables || max_syllables > 4) {
    throw UsageError("syllable range must lie within [1, 4]");
  }
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  std::size_t capacity = 0;
  for (std::size_t n = min_syllables, c = 1; n <= max_syllables; ++n) {
    c = 1;
    for (std::size_t i = 0; i < n; ++i) c *= syllables;
    capacity += c;
  }
  if (size > capacity / 2) {
    throw UsageError("vocabulary size " + std::to_string(size) +
                     " too large for the syllable inventory");
  }
  Rng rng(derive_seed(seed, "vocabulary"));
  std::unordered_set<std::string> seen;
  std::vector<std::string> words;
  words.reserve(size);
  std::size_t attempts = 0;
  while (words.size() < size) {
    if (++attempts > 1000 * size) {
      throw UsageError("too few pseudo-words left after exclusions");
    }
    const std::size_t n = min_syllables + rng.uniform_index(max_syllables - min_syllables + 1);
    std::string w;
    for (std::size_t s = 0; s < n; ++s) {
      w += kConsonants[rng.uniform_index(kConsonants.size())];
      w += kVowels[rng.uniform_index(kVowels.size())];
    }
    if (excluded.count(w) || !seen.insert(w).second) continue;
    words.push_back(std::move(w));
  }
  return words;
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& o) {
  if (o.num_queries < 10) throw UsageError("num_queries must be at least 10");
  if (o.min_query_tokens < 2 || o.min_query_tokens > o.max_query_tokens) {
    throw UsageError("bad query length range");
  }
  if (o.min_content_tokens < 2 || o.min_content_tokens > o.max_content_tokens ||
      o.min_content_tokens > o.min_query_tokens) {
    throw UsageError("bad content token range");
  }
  if (o.min_passage_tokens < o.max_query_tokens ||
      o.min_passage_tokens > o.max_passage_tokens) {
    throw UsageError("passages must be able to hold a whole query");
  }
  if (!(o.function_word_rate >= 0.0 && o.function_word_rate < 1.0)) {
    throw UsageError("function_word_rate must be in [0, 1)");
  }
  if (o.function_words < o.max_query_tokens ||
      o.content_vocab_size < 4 * o.max_content_tokens ||
      o.vocab_size < o.function_words + o.content_vocab_size) {
    throw UsageError("vocab_size too small for the requested query shape");
  }
  SyntheticCorpus corpus;
  if (o.shared_function_words.size() > o.function_words ||
      o.shared_content_words.size() > o.content_vocab_size) {
    throw UsageError("more shared words than vocabulary slots");
  }
  std::set<std::string> shared(o.shared_function_words.begin(), o.shared_function_words.end());
  shared.insert(o.shared_content_words.begin(), o.shared_content_words.end());
  if (shared.size() != o.shared_function_words.size() + o.shared_content_words.size()) {
    throw UsageError("shared words must be distinct");
  }
  std::set<std::string> taken = o.excluded_words;
  taken.insert(shared.begin(), shared.end());
  auto& vocabulary = corpus.vocabulary;
  vocabulary = o.shared_function_words;
  for (std::string& w : synthetic_vocabulary(o.function_words - o.shared_function_words.size(),
                                             derive_seed(o.seed, "function"), taken, 1, 1)) {
    taken.insert(w);
    vocabulary.push_back(std::move(w));
  }
  vocabulary.insert(vocabulary.end(), o.shared_content_words.begin(),
                    o.shared_content_words.end());
  for (std::string& w : synthetic_vocabulary(o.vocab_size - vocabulary.size(), o.seed, taken,
                                             o.min_syllables, o.max_syllables)) {
    vocabulary.push_back(std::move(w));
  }
  const auto& vocab = corpus.vocabulary;
  const std::size_t nf = o.function_words;
  Rng rng(derive_seed(o.seed, "corpus"));

  auto filler = [&](std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(rng.uniform_real() < o.function_word_rate
                        ? vocab[rng.uniform_index(nf)]
                        : vocab[nf + rng.uniform_index(vocab.size() - nf)]);
    }
    return out;
  };
  auto passage_length = [&] {
    return o.min_passage_tokens +
           rng.uniform_index(o.max_passage_tokens - o.min_passage_tokens + 1);
  };

  struct Draft {
    std::string text;
    std::size_t relevant_to;  // query index, or npos for distractors
  };
  std::vector<Draft> drafts;
  std::set<std::string> query_texts;
  for (std::size_t qi = 0; qi < o.num_queries; ++qi) {
    std::vector<std::string> content, tokens;
    std::string qtext;
    do {
      const std::size_t len =
          o.min_query_tokens + rng.uniform_index(o.max_query_tokens - o.min_query_tokens + 1);
      const std::size_t hi = std::min(len, o.max_content_tokens);
      const std::size_t nc = o.min_content_tokens + rng.uniform_index(hi - o.min_content_tokens + 1);
      content.clear();
      for (std::size_t idx : rng.sample_without_replacement(o.content_vocab_size, nc)) {
        content.push_back(vocab[nf + idx]);
      }
      tokens = content;
      for (std::size_t idx : rng.sample_without_replacement(nf, len - nc)) {
        tokens.push_back(vocab[idx]);
      }
      rng.shuffle(tokens);
      qtext = text::join(tokens);
    } while (!query_texts.insert(qtext).second);
    corpus.queries.push_back({padded_id('q', qi, 5), qtext});

    const std::size_t len = passage_length();
    drafts.push_back({text::join(interleave(tokens, filler(len - tokens.size()), rng)), qi});
    for (std::size_t d = 0; d < o.distractors_per_query; ++d) {
      const std::size_t shared = std::min<std::size_t>(1 + rng.uniform_index(2), content.size() - 1);
      std::vector<std::string> keep;
      for (std::size_t idx : rng.sample_without_replacement(content.size(), shared)) {
        keep.push_back(content[idx]);
      }
      const std::size_t dlen = passage_length();
      drafts.push_back({text::join(interleave(keep, filler(dlen - keep.size()), rng)),
                        std::string::npos});
    }
  }
  rng.shuffle(drafts);
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const std::string id = padded_id('p', i, 6);
    corpus.passages.push_back({id, drafts[i].text});
    if (drafts[i].relevant_to != std::string::npos) {
      corpus.qrels[corpus.queries[drafts[i].relevant_to].id].insert(id);
    }
  }
  return corpus;
}

ResultsById lexical_search(const std::vector<Query>& queries,
                           const std::vector<Passage>& passages, std::size_t k) {
  constexpr std::size_t kBuckets = std::size_t{1} << 24;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> postings;
  for (std::uint32_t p = 0; p < passages.size(); ++p) {
    for (std::uint32_t b : featurize(passages[p].text, kBuckets, 1u << 20).indices) {
      postings[b].push_back(p);
    }
  }
  ResultsById out;
  std::vector<double> scores(passages.size());
  for (const Query& q : queries) {
    std::fill(scores.begin(), scores.end(), 0.0);
    for (std::uint32_t b : featurize(q.text, kBuckets, 1u << 20).indices) {
      auto it = postings.find(b);
      if (it == postings.end()) continue;
      for (std::uint32_t p : it->second) scores[p] += 1.0;
    }
    std::vector<std::uint32_t> order(passages.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                      order.end(), [&](std::uint32_t a, std::uint32_t b) {
                        if (scores[a] != scores[b]) return scores[a] > scores[b];
                        return passages[a].id < passages[b].id;
                      });
    SearchResult r;
    for (std::size_t i = 0; i < n; ++i) {
      r.push_back({passages[order[i]].id, scores[order[i]], order[i]});
    }
    out[q.id] = std::move(r);
  }
  return out;
}

}  // namespace capot
