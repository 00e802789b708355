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

#ifndef CAPOT_INDEX_HPP_
#define CAPOT_INDEX_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capot/encoder.hpp"

namespace capot {

struct Passage {
  std::string id;
  std::string text;
};

struct SearchHit {
  std::string id;
  double score = 0.0;
  std::size_t doc = 0;  // row in the index
};

// Descending score, ties by ascending id.
using SearchResult = std::vector<SearchHit>;

// Coarse quantizer: unit-length centroids and the rows assigned to each.
struct InvertedLists {
  std::vector<float> centroids;  // num_centroids x dim, row-major
  std::vector<std::vector<std::uint32_t>> lists;

  std::size_t num_centroids() const { return lists.size(); }
  bool operator==(const InvertedLists&) const = default;
};

// Immutable inner-product store of document vectors.
class DocumentIndex {
 public:
  // Throws DataError on duplicate or empty ids, or size mismatch.
  DocumentIndex(std::vector<std::string> ids, std::vector<float> vectors,
                std::size_t dim);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> vector(std::size_t row) const {
    return {vectors_.data() + row * dim_, dim_};
  }
  std::span<const float> matrix() const { return vectors_; }

  const std::optional<InvertedLists>& ivf() const { return ivf_; }

  // Exact top-k by inner product. k must be positive.
  SearchResult search_exact(std::span<const double> query, std::size_t k) const;

  // Scans only the posting lists of the nprobe centroids with the highest
  // inner product against the query. Requires an IVF section.
  SearchResult search_ivf(std::span<const double> query, std::size_t k,
                          std::size_t nprobe) const;

  // Copy of this index with a spherical k-means quantizer: k-means++ seeding,
  // 25 Lloyd iterations, empty clusters keep their previous centroid.
  DocumentIndex with_ivf(std::size_t num_centroids, std::uint64_t seed) const;

  bool operator==(const DocumentIndex&) const = default;

 private:
  friend DocumentIndex load_index(const std::filesystem::path& path);

  double score(std::size_t row, std::span<const double> query) const;
  SearchResult top_k(std::span<const double> query, std::size_t k,
                     const std::vector<std::uint32_t>* rows) const;
  void check_query(std::span<const double> query, std::size_t k) const;

  std::vector<std::string> ids_;
  std::vector<float> vectors_;
  std::size_t dim_ = 0;
  std::optional<InvertedLists> ivf_;
};

inline constexpr std::size_t kKMeansIterations = 25;

// Embeds every passage with the document tower.
DocumentIndex build_index(const EncoderParams& document_params,
                          const std::vector<Passage>& passages,
                          std::size_t max_tokens = kDefaultMaxPassageTokens);

// Binary index file: "CAPOTIDX", u32 version, u64 doc count, u64 dim,
// length-prefixed ids, float32 matrix, u8 has_ivf, then for the IVF section
// u64 num_centroids, float32 centroids and length-prefixed u32 posting lists.
void save_index(const DocumentIndex& index, const std::filesystem::path& path);
DocumentIndex load_index(const std::filesystem::path& path);

}  // namespace capot

#endif  // CAPOT_INDEX_HPP_
