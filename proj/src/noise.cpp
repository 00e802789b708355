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

#include "capot/noise.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "capot/errors.hpp"
#include "capot/text.hpp"

namespace capot {
namespace {

constexpr std::u32string_view kRandomPool = U"abcdefghijklmnopqrstuvwxyz ";

struct NoiseTypeName {
  NoiseType type;
  std::string_view name;
};

constexpr std::array<NoiseTypeName, 10> kNames{{
    {NoiseType::kDeterminer, "determiner"},
    {NoiseType::kSynonym, "synonym"},
    {NoiseType::kLemmatize, "lemmatize"},
    {NoiseType::kStem, "stem"},
    {NoiseType::kRcs, "rcs"},
    {NoiseType::kKcs, "kcs"},
    {NoiseType::kCd, "cd"},
    {NoiseType::kRw, "rw"},
    {NoiseType::kBt, "bt"},
    {NoiseType::kParaphrase, "paraphrase"},
}};

Placement draw_placement(Rng& rng, const PlacementProbabilities& p) {
  const double weights[] = {p.left, p.right, p.at};
  switch (rng.categorical(weights)) {
    case 0:
      return Placement::kLeft;
    case 1:
      return Placement::kRight;
    default:
      return Placement::kAt;
  }
}

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string_view to_string(NoiseType type) {
  for (const auto& n : kNames) {
    if (n.type == type) return n.name;
  }
  return "unknown";
}

std::optional<NoiseType> parse_noise_type(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.type;
  }
  return std::nullopt;
}

bool is_typo(NoiseType type) {
  return type == NoiseType::kRcs || type == NoiseType::kKcs ||
         type == NoiseType::kCd;
}

void NoiseConfig::validate() const {
  if (enabled_types.empty()) throw UsageError("no noise types enabled");
  const double p[] = {placement.left, placement.right, placement.at};
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw UsageError("placement probabilities must be nonnegative");
    }
  }
  if (std::fabs(p[0] + p[1] + p[2] - 1.0) > 1e-9) {
    throw UsageError("placement probabilities must sum to 1");
  }
}

std::size_t select_anchor_index(std::string_view text, Granularity granularity,
                                Rng& rng) {
  const std::size_t n = granularity == Granularity::kCharacter
                            ? text::to_u32(text).size()
                            : text::split_whitespace(text).size();
  if (n == 0) throw DataError("empty query");
  return rng.uniform_index(n);
}

std::uint64_t record_seed(std::uint64_t master_seed, std::string_view query_id,
                          NoiseType type) {
  return derive_seed(master_seed, query_id, to_string(type));
}

namespace noise_ops {

std::string delete_character(std::string_view text, std::size_t anchor) {
  std::u32string s = text::to_u32(text);
  if (anchor >= s.size()) throw std::out_of_range("delete_character: anchor");
  s.erase(anchor, 1);
  return text::to_utf8(s);
}

std::string place_character(std::string_view text, std::size_t anchor,
                            Placement placement, char32_t c) {
  std::u32string s = text::to_u32(text);
  if (anchor >= s.size()) throw std::out_of_range("place_character: anchor");
  switch (placement) {
    case Placement::kLeft:
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(anchor), c);
      break;
    case Placement::kRight:
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(anchor) + 1, c);
      break;
    case Placement::kAt:
      s[anchor] = c;
      break;
  }
  return text::to_utf8(s);
}

std::string swap_words(std::string_view text, std::size_t first,
                       std::size_t second) {
  auto tokens = text::split_whitespace(text);
  if (first >= tokens.size() || second >= tokens.size()) {
    throw std::out_of_range("swap_words: index");
  }
  std::swap(tokens[first], tokens[second]);
  return text::join(tokens);
}

std::string place_word(std::string_view text, std::size_t anchor,
                       Placement placement, std::string_view word) {
  auto tokens = text::split_whitespace(text);
  if (anchor >= tokens.size()) throw std::out_of_range("place_word: anchor");
  auto pos = tokens.begin() + static_cast<std::ptrdiff_t>(anchor);
  switch (placement) {
    case Placement::kLeft:
      tokens.insert(pos, std::string(word));
      break;
    case Placement::kRight:
      tokens.insert(pos + 1, std::string(word));
      break;
    case Placement::kAt:
      *pos = std::string(word);
      break;
  }
  return text::join(tokens);
}

}  // namespace noise_ops

QueryNoiser::QueryNoiser(const TextResources& resources,
                         std::shared_ptr<RewriteBackend> rewriter)
    : resources_(resources), rewriter_(std::move(rewriter)) {}

NoisedQuery QueryNoiser::apply(const Query& q, NoiseType type,
                               const NoiseConfig& config) const {
  return apply_with_seed(q, type, record_seed(config.master_seed, q.id, type),
                         config);
}

NoisedQuery QueryNoiser::apply_with_seed(const Query& q, NoiseType type,
                                         std::uint64_t seed,
                                         const NoiseConfig& config) const {
  if (text::trim(q.text).empty()) throw DataError("empty query");
  const std::string normalized = text::nfc(q.text);
  Rng rng(seed);
  std::string out;
  switch (type) {
    case NoiseType::kRcs:
      out = random_character_swap(text::to_u32(normalized), rng, config);
      break;
    case NoiseType::kKcs:
      out = keyboard_character_swap(text::to_u32(normalized), rng, config);
      break;
    case NoiseType::kCd:
      out = character_delete(text::to_u32(normalized), rng);
      break;
    case NoiseType::kRw:
      out = reorder_words(normalized, rng);
      break;
    case NoiseType::kDeterminer:
      out = insert_determiner(normalized, rng, config);
      break;
    case NoiseType::kSynonym:
      out = replace_synonym(normalized, rng);
      break;
    case NoiseType::kLemmatize:
    case NoiseType::kStem:
      out = transform_words(normalized, type, rng, config);
      break;
    case NoiseType::kBt:
      out = rewrite(normalized, RewriteMode::kBackTranslation);
      break;
    case NoiseType::kParaphrase:
      out = rewrite(normalized, RewriteMode::kParaphrase);
      break;
  }
  // Word-level edits re-join on single spaces; an edit that changed nothing
  // must hand back the input verbatim.
  const bool word_level = !is_typo(type) && type != NoiseType::kBt &&
                          type != NoiseType::kParaphrase;
  if (word_level && out == text::join(text::split_whitespace(normalized))) {
    out = q.text;
  }
  return NoisedQuery{q.id, type, std::move(out), seed};
}

std::vector<NoisedQuery> QueryNoiser::noise_dataset(
    const std::vector<Query>& queries, const NoiseConfig& config) const {
  config.validate();
  if (queries.empty()) throw DataError("no queries");
  std::set<std::string_view> ids;
  for (const Query& q : queries) {
    if (!ids.insert(q.id).second) {
      throw DataError("duplicate query id '" + q.id + "'");
    }
  }
  std::vector<NoiseType> types;
  for (NoiseType t : config.enabled_types) {
    if (std::find(types.begin(), types.end(), t) == types.end()) {
      types.push_back(t);
    }
  }
  std::vector<NoisedQuery> out;
  out.reserve(queries.size() * types.size());
  for (const Query& q : queries) {
    for (NoiseType t : types) {
      try {
        out.push_back(apply(q, t, config));
      } catch (const BackendError& e) {
        throw BackendError("query '" + q.id + "': " + e.what());
      } catch (const DataError& e) {
        throw DataError("query '" + q.id + "': " + e.what());
      }
    }
  }
  return out;
}

std::string QueryNoiser::random_character_swap(const std::u32string& text,
                                               Rng& rng,
                                               const NoiseConfig& config) const {
  const std::size_t anchor = rng.uniform_index(text.size());
  const Placement placement = draw_placement(rng, config.placement);
  char32_t c;
  if (placement == Placement::kAt) {
    // A replacement must actually change the character.
    std::u32string pool;
    for (char32_t p : kRandomPool) {
      if (p != text[anchor]) pool.push_back(p);
    }
    c = pool[rng.uniform_index(pool.size())];
  } else {
    c = kRandomPool[rng.uniform_index(kRandomPool.size())];
  }
  return noise_ops::place_character(text::to_utf8(text), anchor, placement, c);
}

std::string QueryNoiser::keyboard_character_swap(
    const std::u32string& text, Rng& rng, const NoiseConfig& config) const {
  std::vector<std::size_t> keyed;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!resources_.keyboard_neighbors(text[i]).empty()) keyed.push_back(i);
  }
  if (keyed.empty()) return random_character_swap(text, rng, config);
  const std::size_t anchor = keyed[rng.uniform_index(keyed.size())];
  const auto neighbors = resources_.keyboard_neighbors(text[anchor]);
  const Placement placement = draw_placement(rng, config.placement);
  const char32_t c = neighbors[rng.uniform_index(neighbors.size())];
  return noise_ops::place_character(text::to_utf8(text), anchor, placement, c);
}

std::string QueryNoiser::character_delete(const std::u32string& text,
                                          Rng& rng) const {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!text::is_space(text[i])) eligible.push_back(i);
  }
  if (eligible.empty()) throw DataError("empty query");
  const std::size_t anchor = eligible[rng.uniform_index(eligible.size())];
  return noise_ops::delete_character(text::to_utf8(text), anchor);
}

std::string QueryNoiser::reorder_words(const std::string& text,
                                       Rng& rng) const {
  const std::size_t anchor =
      select_anchor_index(text, Granularity::kWord, rng);
  const std::size_t n = text::split_whitespace(text).size();
  if (n < 2) return text::join(text::split_whitespace(text));
  std::size_t other = rng.uniform_index(n - 1);
  if (other >= anchor) ++other;
  return noise_ops::swap_words(text, anchor, other);
}

std::string QueryNoiser::insert_determiner(const std::string& text, Rng& rng,
                                           const NoiseConfig& config) const {
  const auto tokens = text::split_whitespace(text);
  if (tokens.empty()) throw DataError("empty query");
  // No noun-phrase chunker: any content word is a candidate anchor.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string core = text::split_token(tokens[i]).core;
    if (!core.empty() && !resources_.stopwords().contains(core) &&
        !resources_.determiners().contains(core)) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    for (std::size_t i = 0; i < tokens.size(); ++i) eligible.push_back(i);
  }
  const std::size_t anchor = eligible[rng.uniform_index(eligible.size())];
  const Placement placement = draw_placement(rng, config.placement);
  const auto& determiners = resources_.determiners().words();
  const std::string& det = determiners[rng.uniform_index(determiners.size())];
  return noise_ops::place_word(text, anchor, placement, det);
}

std::string QueryNoiser::replace_synonym(const std::string& text,
                                         Rng& rng) const {
  auto tokens = text::split_whitespace(text);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string core = text::split_token(tokens[i]).core;
    if (!core.empty() && !resources_.synonyms_of(core).empty()) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) return text::join(tokens);
  const std::size_t pick = candidates[rng.uniform_index(candidates.size())];
  text::TokenParts parts = text::split_token(tokens[pick]);
  const auto& syns = resources_.synonyms_of(parts.core);
  parts.core = text::match_case(parts.core, syns[rng.uniform_index(syns.size())]);
  tokens[pick] = parts.joined();
  return text::join(tokens);
}

std::string QueryNoiser::transform_words(const std::string& text,
                                         NoiseType type, Rng& rng,
                                         const NoiseConfig& config) const {
  auto tokens = text::split_whitespace(text);
  const std::size_t k = std::min(config.max_stem_lemma_words, tokens.size());
  for (std::size_t i : rng.sample_without_replacement(tokens.size(), k)) {
    text::TokenParts parts = text::split_token(tokens[i]);
    if (parts.core.empty()) continue;
    const std::string lowered = text::lower(parts.core);
    const std::string changed = type == NoiseType::kStem
                                    ? resources_.stem(parts.core)
                                    : resources_.lemmatize(parts.core);
    if (changed == lowered || changed == parts.core) continue;
    parts.core = text::match_case(parts.core, lower_ascii(changed));
    tokens[i] = parts.joined();
  }
  return text::join(tokens);
}

std::string QueryNoiser::rewrite(const std::string& text,
                                 RewriteMode mode) const {
  if (!rewriter_) throw BackendError("rewrite backend required");
  RewriteResponse response = rewriter_->rewrite(RewriteRequest{text, mode});
  if (text::trim(response.text).empty()) {
    throw BackendError("empty rewrite response from " + rewriter_->label());
  }
  return response.text;
}

}  // namespace capot
