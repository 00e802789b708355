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

#ifndef CAPOT_NOISE_HPP_
#define CAPOT_NOISE_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capot/random.hpp"
#include "capot/rewrite.hpp"
#include "capot/text_resources.hpp"

namespace capot {

enum class NoiseType {
  kDeterminer,
  kSynonym,
  kLemmatize,
  kStem,
  kRcs,  // random character swap
  kKcs,  // keyboard character swap
  kCd,   // character delete
  kRw,   // reorder words
  kBt,   // back-translation
  kParaphrase,
};

inline constexpr std::array<NoiseType, 10> kAllNoiseTypes{
    NoiseType::kDeterminer, NoiseType::kSynonym, NoiseType::kLemmatize,
    NoiseType::kStem,       NoiseType::kRcs,     NoiseType::kKcs,
    NoiseType::kCd,         NoiseType::kRw,      NoiseType::kBt,
    NoiseType::kParaphrase};

inline constexpr std::array<NoiseType, 3> kTypoNoiseTypes{
    NoiseType::kRcs, NoiseType::kKcs, NoiseType::kCd};

// Types that need no rewrite backend.
inline constexpr std::array<NoiseType, 8> kOfflineNoiseTypes{
    NoiseType::kDeterminer, NoiseType::kSynonym, NoiseType::kLemmatize,
    NoiseType::kStem,       NoiseType::kRcs,     NoiseType::kKcs,
    NoiseType::kCd,         NoiseType::kRw};

std::string_view to_string(NoiseType type);
std::optional<NoiseType> parse_noise_type(std::string_view name);
bool is_typo(NoiseType type);

struct Query {
  std::string id;
  std::string text;
};

struct NoisedQuery {
  std::string anchor_id;
  NoiseType noise_type;
  std::string text;
  std::uint64_t seed = 0;
};

struct PlacementProbabilities {
  double left = 1.0 / 3.0;
  double right = 1.0 / 3.0;
  double at = 1.0 / 3.0;
};

struct NoiseConfig {
  std::vector<NoiseType> enabled_types{kOfflineNoiseTypes.begin(),
                                       kOfflineNoiseTypes.end()};
  std::uint64_t master_seed = 0;
  std::size_t max_stem_lemma_words = 5;
  PlacementProbabilities placement;

  // Throws UsageError on an empty type set or bad probabilities.
  void validate() const;
};

enum class Granularity { kCharacter, kWord };
enum class Placement { kLeft, kRight, kAt };

// Uniform index over the code points (character) or whitespace tokens (word)
// of text. Throws DataError("empty query") when there is nothing to pick.
std::size_t select_anchor_index(std::string_view text, Granularity granularity,
                                Rng& rng);

// Seed of the record for (query id, noise type) under a master seed; any
// record can be regenerated on its own from this.
std::uint64_t record_seed(std::uint64_t master_seed, std::string_view query_id,
                          NoiseType type);

// Single edits with every random choice made explicit. Positions index code
// points.
namespace noise_ops {
std::string delete_character(std::string_view text, std::size_t anchor);
std::string place_character(std::string_view text, std::size_t anchor,
                            Placement placement, char32_t c);
std::string swap_words(std::string_view text, std::size_t first,
                       std::size_t second);
std::string place_word(std::string_view text, std::size_t anchor,
                       Placement placement, std::string_view word);
}  // namespace noise_ops

class QueryNoiser {
 public:
  // The rewrite backend is only needed for kBt and kParaphrase.
  explicit QueryNoiser(const TextResources& resources,
                       std::shared_ptr<RewriteBackend> rewriter = nullptr);

  // Seed derived with record_seed(config.master_seed, q.id, type).
  NoisedQuery apply(const Query& q, NoiseType type,
                    const NoiseConfig& config) const;
  NoisedQuery apply_with_seed(const Query& q, NoiseType type,
                              std::uint64_t seed,
                              const NoiseConfig& config) const;

  // One record per (query, enabled type), in input order. Errors are
  // re-raised with the offending query id.
  std::vector<NoisedQuery> noise_dataset(const std::vector<Query>& queries,
                                         const NoiseConfig& config) const;

  const TextResources& resources() const { return resources_; }

 private:
  std::string random_character_swap(const std::u32string& text, Rng& rng,
                                    const NoiseConfig& config) const;
  std::string keyboard_character_swap(const std::u32string& text, Rng& rng,
                                      const NoiseConfig& config) const;
  std::string character_delete(const std::u32string& text, Rng& rng) const;
  std::string reorder_words(const std::string& text, Rng& rng) const;
  std::string insert_determiner(const std::string& text, Rng& rng,
                                const NoiseConfig& config) const;
  std::string replace_synonym(const std::string& text, Rng& rng) const;
  std::string transform_words(const std::string& text, NoiseType type,
                              Rng& rng, const NoiseConfig& config) const;
  std::string rewrite(const std::string& text, RewriteMode mode) const;

  const TextResources& resources_;
  std::shared_ptr<RewriteBackend> rewriter_;
};

}  // namespace capot

#endif  // CAPOT_NOISE_HPP_
