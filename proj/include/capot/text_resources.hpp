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

#ifndef CAPOT_TEXT_RESOURCES_HPP_
#define CAPOT_TEXT_RESOURCES_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace capot {

// Classic Porter (1980) suffix stripper, steps 1a through 5b. Tokens that are
// not purely ASCII-alphabetic, or are shorter than three letters, come back
// unchanged. Input is lowercased first.
std::string porter_stem(std::string_view token);

// token -> synonyms. Loaded from "token<TAB>syn,syn,..." lines.
class SynonymLexicon {
 public:
  static SynonymLexicon parse(std::string_view tsv);

  // Empty when the lowercased token is out of vocabulary.
  const std::vector<std::string>& lookup(std::string_view token) const;

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries()
      const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

class LemmaTable {
 public:
  struct SuffixRule {
    std::string suffix;
    std::string replacement;
  };

  static LemmaTable parse(std::string_view exceptions_tsv,
                          std::string_view rules_tsv);

  // Exception-table hit wins; otherwise the first applicable suffix rule;
  // otherwise identity. A non-identity rule applies only when its result has
  // at least three letters and contains a vowel.
  std::string lemmatize(std::string_view token) const;

  const std::map<std::string, std::string, std::less<>>& exceptions() const {
    return exceptions_;
  }
  const std::vector<SuffixRule>& suffix_rules() const { return rules_; }

 private:
  std::map<std::string, std::string, std::less<>> exceptions_;
  std::vector<SuffixRule> rules_;
};

// Physical key adjacency derived from row geometry: keys on the same row are
// adjacent when one key apart, keys on neighbouring rows when their centres
// are at most 1.25 key widths apart horizontally.
class KeyboardMap {
 public:
  static KeyboardMap parse(std::string_view layout_tsv);

  // Uppercase is lowercased before lookup; unmapped characters have no
  // neighbours.
  std::vector<char32_t> neighbors(char32_t c) const;

  const std::map<char32_t, std::vector<char32_t>>& adjacency() const {
    return adjacency_;
  }

 private:
  std::map<char32_t, std::vector<char32_t>> adjacency_;
};

// Plain one-word-per-line list (determiners, stopwords).
class WordList {
 public:
  static WordList parse(std::string_view text);

  bool contains(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::set<std::string, std::less<>> index_;
};

// Optional on-disk replacements for the bundled resources.
struct ResourcePaths {
  std::optional<std::filesystem::path> synonyms;
  std::optional<std::filesystem::path> lemma_exceptions;
  std::optional<std::filesystem::path> lemma_rules;
  std::optional<std::filesystem::path> keyboard;
  std::optional<std::filesystem::path> determiners;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> backtranslation;
};

// Immutable after construction; safe for concurrent reads.
class TextResources {
 public:
  // Resources compiled into the library.
  static const TextResources& bundled();
  static TextResources load(const ResourcePaths& paths);

  std::string stem(std::string_view token) const { return porter_stem(token); }
  std::string lemmatize(std::string_view token) const {
    return lemmas_.lemmatize(token);
  }
  const std::vector<std::string>& synonyms_of(std::string_view token) const {
    return synonyms_.lookup(token);
  }
  std::vector<char32_t> keyboard_neighbors(char32_t c) const {
    return keyboard_.neighbors(c);
  }

  const SynonymLexicon& synonyms() const { return synonyms_; }
  const LemmaTable& lemmas() const { return lemmas_; }
  const KeyboardMap& keyboard() const { return keyboard_; }
  const WordList& determiners() const { return determiners_; }
  const WordList& stopwords() const { return stopwords_; }
  // Source word -> round-trip substitute, used by the offline rewrite stub.
  const std::map<std::string, std::string, std::less<>>& backtranslation()
      const {
    return backtranslation_;
  }

 private:
  SynonymLexicon synonyms_;
  LemmaTable lemmas_;
  KeyboardMap keyboard_;
  WordList determiners_;
  WordList stopwords_;
  std::map<std::string, std::string, std::less<>> backtranslation_;
};

namespace resources {
// Raw text of the bundled resource files.
std::string_view synonyms_tsv();
std::string_view lemma_exceptions_tsv();
std::string_view lemma_rules_tsv();
std::string_view keyboard_tsv();
std::string_view determiners_txt();
std::string_view stopwords_txt();
std::string_view backtranslation_tsv();
}  // namespace resources

// Lines of a resource file with '#' comments and blank lines removed, split
// on TAB. Trailing empty fields are kept.
std::vector<std::vector<std::string>> parse_tsv_lines(std::string_view text);

}  // namespace capot

#endif  // CAPOT_TEXT_RESOURCES_HPP_
