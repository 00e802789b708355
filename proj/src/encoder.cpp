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

#include "capot/encoder.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "capot/binary_io.hpp"
#include "capot/errors.hpp"
#include "capot/random.hpp"
#include "capot/text.hpp"

namespace capot {
namespace {

constexpr char kMagic[8] = {'C', 'A', 'P', 'O', 'T', 'E', 'N', 'C'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::vector<std::string> char_ngrams(std::string_view token) {
  std::u32string padded = U"<" + text::to_u32(token);
  std::vector<std::string> grams;
  if (padded.size() < 3) {
    grams.push_back(text::to_utf8(padded));
    return grams;
  }
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      grams.push_back(text::to_utf8(std::u32string_view(padded).substr(i, n)));
    }
  }
  return grams;
}

FeatureVector featurize(std::string_view text, std::size_t num_buckets,
                        std::size_t max_tokens) {
  if (num_buckets == 0) throw UsageError("num_buckets must be positive");
  std::map<std::uint32_t, float> counts;
  auto tokens = text::split_whitespace(text::lower(text));
  if (tokens.size() > max_tokens) tokens.resize(max_tokens);
  for (const std::string& tok : tokens) {
    for (const std::string& gram : char_ngrams(tok)) {
      counts[static_cast<std::uint32_t>(fnv1a64(gram) % num_buckets)] += 1.0f;
    }
  }
  FeatureVector fv;
  fv.indices.reserve(counts.size());
  fv.values.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    fv.indices.push_back(index);
    fv.values.push_back(count);
  }
  return fv;
}

EncoderParams::EncoderParams(std::size_t embedding_dim, std::size_t num_buckets)
    : dim_(embedding_dim),
      buckets_(num_buckets),
      weights_(embedding_dim * num_buckets, 0.0f) {
  if (embedding_dim == 0 || num_buckets == 0) {
    throw UsageError("encoder dimensions must be positive");
  }
}

float& EncoderParams::mutable_at(std::size_t row, std::size_t bucket) {
  if (frozen_) throw FrozenParamsError("parameters are frozen");
  return weights_[bucket * dim_ + row];
}

EncoderParams init_params(std::size_t embedding_dim, std::size_t num_buckets,
                          std::uint64_t seed) {
  EncoderParams p(embedding_dim, num_buckets);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_buckets));
  Rng rng(seed);
  for (float& w : p.weights_) {
    w = static_cast<float>(rng.uniform_real(-scale, scale));
  }
  return p;
}

EncoderParams clone_frozen(const EncoderParams& params) {
  EncoderParams copy = params;
  copy.frozen_ = true;
  return copy;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Encoded encode(const EncoderParams& params, const FeatureVector& features) {
  const std::size_t dim = params.embedding_dim();
  Encoded out;
  out.projected.assign(dim, 0.0);
  for (std::size_t k = 0; k < features.size(); ++k) {
    const std::uint32_t b = features.indices[k];
    if (b >= params.num_buckets()) {
      throw std::out_of_range("feature index " + std::to_string(b) +
                              " outside " + std::to_string(params.num_buckets()) +
                              " buckets");
    }
    const double v = features.values[k];
    const auto col = params.column(b);
    for (std::size_t r = 0; r < dim; ++r) out.projected[r] += v * col[r];
  }
  out.norm = std::sqrt(dot(out.projected, out.projected));
  out.embedding.assign(dim, 0.0);
  if (out.norm > 0.0) {
    for (std::size_t r = 0; r < dim; ++r) {
      out.embedding[r] = out.projected[r] / out.norm;
    }
  }
  return out;
}

Embedding embed(const EncoderParams& params, const FeatureVector& features) {
  return encode(params, features).embedding;
}

Embedding normalize_backward(const Encoded& encoded,
                             std::span<const double> grad_embedding) {
  const std::size_t dim = encoded.embedding.size();
  if (grad_embedding.size() != dim) {
    throw std::invalid_argument("normalize_backward: size mismatch");
  }
  Embedding grad(dim, 0.0);
  if (encoded.norm <= 0.0) return grad;
  const double along = dot(encoded.embedding, grad_embedding);
  for (std::size_t r = 0; r < dim; ++r) {
    grad[r] = (grad_embedding[r] - encoded.embedding[r] * along) / encoded.norm;
  }
  return grad;
}

void GradientBuffer::add(const FeatureVector& features,
                         std::span<const double> grad_projected) {
  entries_.push_back({features, Embedding(grad_projected.begin(),
                                          grad_projected.end())});
}

void GradientBuffer::apply_sgd(EncoderParams& params,
                               double learning_rate) const {
  if (params.frozen_) throw FrozenParamsError("parameters are frozen");
  const std::size_t dim = params.dim_;
  for (const Entry& e : entries_) {
    if (e.grad.size() != dim) {
      throw std::invalid_argument("gradient dimension mismatch");
    }
  }
  for (const Entry& e : entries_) {
    for (std::size_t k = 0; k < e.features.size(); ++k) {
      float* col = params.weights_.data() + e.features.indices[k] * dim;
      const double step = learning_rate * e.features.values[k];
      for (std::size_t r = 0; r < dim; ++r) {
        col[r] = static_cast<float>(col[r] - step * e.grad[r]);
      }
    }
  }
}

void save_params(const EncoderParams& params,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model " + path.string());
  out.write(kMagic, sizeof(kMagic));
  binary::write_pod<std::uint32_t>(out, kVersion);
  binary::write_pod<std::uint64_t>(out, params.embedding_dim());
  binary::write_pod<std::uint64_t>(out, params.num_buckets());
  binary::write_pod<std::uint8_t>(out, params.frozen() ? 1 : 0);
  std::vector<float> row(params.num_buckets());
  for (std::size_t r = 0; r < params.embedding_dim(); ++r) {
    for (std::size_t b = 0; b < params.num_buckets(); ++b) {
      row[b] = params.at(r, b);
    }
    binary::write_array<float>(out, row);
  }
  if (!out) throw DataError("failed writing model " + path.string());
}

EncoderParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model " + path.string());
  binary::Reader reader(in, path.string());
  char magic[8];
  reader.array<char>(magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    reader.fail("not an encoder model file");
  }
  if (reader.pod<std::uint32_t>("version") != kVersion) {
    reader.fail("unsupported model version");
  }
  const auto dim = reader.pod<std::uint64_t>("embedding_dim");
  const auto buckets = reader.pod<std::uint64_t>("num_buckets");
  const auto frozen = reader.pod<std::uint8_t>("frozen");
  if (dim == 0 || buckets == 0 || dim > (1u << 16) || buckets > (1u << 28)) {
    reader.fail("implausible model dimensions");
  }
  if (frozen > 1) reader.fail("bad frozen flag");
  EncoderParams p(dim, buckets);
  std::vector<float> row(buckets);
  for (std::size_t r = 0; r < dim; ++r) {
    reader.array<float>(row, "weights");
    for (std::size_t b = 0; b < buckets; ++b) {
      if (!std::isfinite(row[b])) reader.fail("non-finite weight");
      p.weights_[b * dim + r] = row[b];
    }
  }
  reader.expect_end();
  p.frozen_ = frozen == 1;
  return p;
}

namespace binary {

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
  return out;
}

}  // namespace binary
}  // namespace capot
