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

#ifndef CAPOT_ENCODER_HPP_
#define CAPOT_ENCODER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace capot {

inline constexpr std::size_t kDefaultEmbeddingDim = 64;
inline constexpr std::size_t kDefaultNumBuckets = std::size_t{1} << 18;
inline constexpr std::size_t kDefaultMaxTokens = 28;
inline constexpr std::size_t kDefaultMaxPassageTokens = 128;

// Sparse bag of hashed character n-grams.
struct FeatureVector {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<float> values;           // positive counts

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
};

using Embedding = std::vector<double>;

// Lowercases, keeps the first max_tokens whitespace tokens, and counts the
// 3 to 5 character n-grams of each token after prefixing it with '<'.
// Padded tokens shorter than three characters count as one feature.
FeatureVector featurize(std::string_view text, std::size_t num_buckets,
                        std::size_t max_tokens = kDefaultMaxTokens);

// The n-gram strings featurize hashes, in emission order.
std::vector<std::string> char_ngrams(std::string_view token);

// Linear projection from hashed features to embedding_dim. Logically a
// (embedding_dim x num_buckets) matrix; stored bucket-major so each feature
// touches one contiguous column.
class EncoderParams {
 public:
  EncoderParams() = default;
  EncoderParams(std::size_t embedding_dim, std::size_t num_buckets);

  std::size_t embedding_dim() const { return dim_; }
  std::size_t num_buckets() const { return buckets_; }
  bool frozen() const { return frozen_; }

  float at(std::size_t row, std::size_t bucket) const {
    return weights_[bucket * dim_ + row];
  }
  // Mutating access; throws FrozenParamsError on frozen params.
  float& mutable_at(std::size_t row, std::size_t bucket);

  std::span<const float> column(std::size_t bucket) const {
    return {weights_.data() + bucket * dim_, dim_};
  }
  std::span<const float> raw() const { return weights_; }

  bool operator==(const EncoderParams& other) const = default;

 private:
  friend EncoderParams init_params(std::size_t, std::size_t, std::uint64_t);
  friend EncoderParams clone_frozen(const EncoderParams&);
  friend EncoderParams load_params(const std::filesystem::path&);
  friend class GradientBuffer;

  std::size_t dim_ = 0;
  std::size_t buckets_ = 0;
  bool frozen_ = false;
  std::vector<float> weights_;
};

// Entries i.i.d. uniform in [-1/sqrt(num_buckets), 1/sqrt(num_buckets)].
EncoderParams init_params(std::size_t embedding_dim, std::size_t num_buckets,
                          std::uint64_t seed);

// Deep copy with frozen set.
EncoderParams clone_frozen(const EncoderParams& params);

// Forward pass with the intermediates backprop needs.
struct Encoded {
  Embedding embedding;  // unit length, or zero for empty features
  Embedding projected;  // before normalization
  double norm = 0.0;
};

Encoded encode(const EncoderParams& params, const FeatureVector& features);

// L2-normalized projection. Empty features give the zero vector.
Embedding embed(const EncoderParams& params, const FeatureVector& features);

// Gradient with respect to the pre-normalization projection given the
// gradient with respect to the normalized embedding.
Embedding normalize_backward(const Encoded& encoded,
                             std::span<const double> grad_embedding);

// Accumulates sparse parameter gradients over a batch so the update uses
// the parameters as they were when the batch was encoded.
class GradientBuffer {
 public:
  void add(const FeatureVector& features, std::span<const double> grad_projected);
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }

  // params -= learning_rate * gradient. Throws FrozenParamsError, leaving
  // params untouched, when params are frozen.
  void apply_sgd(EncoderParams& params, double learning_rate) const;

 private:
  struct Entry {
    FeatureVector features;
    Embedding grad;
  };
  std::vector<Entry> entries_;
};

// Binary model file: "CAPOTENC", u32 version, u64 embedding_dim,
// u64 num_buckets, u8 frozen, then the matrix row-major as float32.
void save_params(const EncoderParams& params, const std::filesystem::path& path);
EncoderParams load_params(const std::filesystem::path& path);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace capot

#endif  // CAPOT_ENCODER_HPP_
