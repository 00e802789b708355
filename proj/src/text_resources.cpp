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

#include "capot/text_resources.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "capot/errors.hpp"
#include "capot/text.hpp"

namespace capot {

std::vector<std::vector<std::string>> parse_tsv_lines(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.emplace_back(line.substr(start));
        break;
      }
      fields.emplace_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

namespace {

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    std::string item = text::trim(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

bool has_internal_space(std::string_view s) {
  for (char32_t c : text::to_u32(s)) {
    if (text::is_space(c)) return true;
  }
  return false;
}

bool contains_vowel(std::string_view s) {
  return s.find_first_of("aeiouy") != std::string_view::npos;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read resource file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SynonymLexicon SynonymLexicon::parse(std::string_view tsv) {
  SynonymLexicon lex;
  for (const auto& row : parse_tsv_lines(tsv)) {
    if (row.size() != 2) {
      throw DataError("synonym lexicon: expected 2 fields per line");
    }
    std::string key = text::lower(text::trim(row[0]));
    if (key.empty() || has_internal_space(key)) {
      throw DataError("synonym lexicon: invalid token '" + row[0] + "'");
    }
    std::vector<std::string> syns;
    for (std::string& s : split_commas(row[1])) {
      s = text::lower(s);
      if (has_internal_space(s)) {
        throw DataError("synonym lexicon: synonym with whitespace for '" +
                        key + "'");
      }
      if (s != key) syns.push_back(std::move(s));
    }
    if (syns.empty()) {
      throw DataError("synonym lexicon: '" + key + "' has no synonyms");
    }
    auto& slot = lex.entries_[key];
    for (auto& s : syns) {
      if (std::find(slot.begin(), slot.end(), s) == slot.end()) {
        slot.push_back(std::move(s));
      }
    }
  }
  return lex;
}

const std::vector<std::string>& SynonymLexicon::lookup(
    std::string_view token) const {
  static const std::vector<std::string> kEmpty;
  auto it = entries_.find(text::lower(token));
  return it == entries_.end() ? kEmpty : it->second;
}

LemmaTable LemmaTable::parse(std::string_view exceptions_tsv,
                             std::string_view rules_tsv) {
  LemmaTable table;
  for (const auto& row : parse_tsv_lines(exceptions_tsv)) {
    if (row.size() != 2 || row[0].empty() || row[1].empty()) {
      throw DataError("lemma exceptions: expected 'form<TAB>lemma'");
    }
    table.exceptions_[text::lower(row[0])] = text::lower(row[1]);
  }
  for (const auto& row : parse_tsv_lines(rules_tsv)) {
    if (row.empty() || row.size() > 2 || row[0].empty()) {
      throw DataError("lemma rules: expected 'suffix<TAB>replacement'");
    }
    table.rules_.push_back({row[0], row.size() == 2 ? row[1] : std::string()});
  }
  return table;
}

std::string LemmaTable::lemmatize(std::string_view token) const {
  std::string word = text::lower(token);
  if (auto it = exceptions_.find(word); it != exceptions_.end()) {
    return it->second;
  }
  for (const SuffixRule& rule : rules_) {
    if (word.size() < rule.suffix.size() ||
        word.compare(word.size() - rule.suffix.size(), rule.suffix.size(),
                     rule.suffix) != 0) {
      continue;
    }
    if (rule.suffix == rule.replacement) return word;
    std::string lemma =
        word.substr(0, word.size() - rule.suffix.size()) + rule.replacement;
    if (lemma.size() < 3 || !contains_vowel(lemma)) continue;
    return lemma;
  }
  return word;
}

KeyboardMap KeyboardMap::parse(std::string_view layout_tsv) {
  struct Key {
    char32_t c;
    int row;
    double x;
  };
  std::vector<Key> keys;
  int row = 0;
  for (const auto& fields : parse_tsv_lines(layout_tsv)) {
    if (fields.size() != 2) {
      throw DataError("keyboard layout: expected 'offset<TAB>keys'");
    }
    double offset = 0.0;
    try {
      offset = std::stod(fields[0]);
    } catch (const std::exception&) {
      throw DataError("keyboard layout: bad offset '" + fields[0] + "'");
    }
    std::u32string row_keys = text::to_u32(fields[1]);
    for (std::size_t i = 0; i < row_keys.size(); ++i) {
      keys.push_back({text::lower(row_keys[i]), row, offset + double(i)});
    }
    ++row;
  }
  KeyboardMap map;
  for (const Key& a : keys) {
    auto& list = map.adjacency_[a.c];
    for (const Key& b : keys) {
      if (a.c == b.c) continue;
      const double dx = std::fabs(a.x - b.x);
      const bool same_row = a.row == b.row && std::fabs(dx - 1.0) < 1e-9;
      const bool next_row = std::abs(a.row - b.row) == 1 && dx <= 1.25 + 1e-9;
      if (same_row || next_row) list.push_back(b.c);
    }
  }
  return map;
}

std::vector<char32_t> KeyboardMap::neighbors(char32_t c) const {
  auto it = adjacency_.find(text::lower(c));
  if (it == adjacency_.end()) return {};
  return it->second;
}

WordList WordList::parse(std::string_view content) {
  WordList list;
  for (const auto& row : parse_tsv_lines(content)) {
    std::string w = text::lower(text::trim(row[0]));
    if (w.empty()) continue;
    if (list.index_.insert(w).second) list.words_.push_back(std::move(w));
  }
  if (list.words_.empty()) throw DataError("word list is empty");
  return list;
}

bool WordList::contains(std::string_view word) const {
  return index_.find(text::lower(word)) != index_.end();
}

const TextResources& TextResources::bundled() {
  static const TextResources instance = load(ResourcePaths{});
  return instance;
}

TextResources TextResources::load(const ResourcePaths& paths) {
  auto pick = [](const std::optional<std::filesystem::path>& path,
                 std::string_view fallback) {
    return path ? read_file(*path) : std::string(fallback);
  };
  TextResources r;
  r.synonyms_ = SynonymLexicon::parse(
      pick(paths.synonyms, resources::synonyms_tsv()));
  r.lemmas_ = LemmaTable::parse(
      pick(paths.lemma_exceptions, resources::lemma_exceptions_tsv()),
      pick(paths.lemma_rules, resources::lemma_rules_tsv()));
  r.keyboard_ = KeyboardMap::parse(
      pick(paths.keyboard, resources::keyboard_tsv()));
  r.determiners_ = WordList::parse(
      pick(paths.determiners, resources::determiners_txt()));
  r.stopwords_ = WordList::parse(
      pick(paths.stopwords, resources::stopwords_txt()));
  for (const auto& row : parse_tsv_lines(
           pick(paths.backtranslation, resources::backtranslation_tsv()))) {
    if (row.size() != 2) {
      throw DataError("back-translation table: expected 2 fields per line");
    }
    r.backtranslation_[text::lower(row[0])] = text::lower(row[1]);
  }
  return r;
}

}  // namespace capot
