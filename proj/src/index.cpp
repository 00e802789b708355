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

#include "capot/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "capot/binary_io.hpp"
#include "capot/errors.hpp"
#include "capot/random.hpp"

namespace capot {
namespace {

constexpr char kMagic[8] = {'C', 'A', 'P', 'O', 'T', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

void normalize_in_place(std::span<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

double dot_rows(std::span<const float> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

}  // namespace

DocumentIndex::DocumentIndex(std::vector<std::string> ids,
                             std::vector<float> vectors, std::size_t dim)
    : ids_(std::move(ids)), vectors_(std::move(vectors)), dim_(dim) {
  if (dim_ == 0) throw DataError("index dimension must be positive");
  if (ids_.empty()) throw DataError("index has no documents");
  if (vectors_.size() != ids_.size() * dim_) {
    throw DataError("index vector count does not match id count");
  }
  std::unordered_set<std::string_view> seen;
  for (const std::string& id : ids_) {
    if (id.empty()) throw DataError("empty passage id");
    if (!seen.insert(id).second) {
      throw DataError("duplicate passage id '" + id + "'");
    }
  }
}

double DocumentIndex::score(std::size_t row,
                            std::span<const double> query) const {
  return dot_rows(vector(row), query);
}

void DocumentIndex::check_query(std::span<const double> query,
                                std::size_t k) const {
  if (k == 0) throw UsageError("k must be at least 1");
  if (query.size() != dim_) {
    throw std::invalid_argument("query dimension " +
                                std::to_string(query.size()) +
                                " does not match index dimension " +
                                std::to_string(dim_));
  }
}

SearchResult DocumentIndex::top_k(std::span<const double> query, std::size_t k,
                                  const std::vector<std::uint32_t>* rows) const {
  std::vector<std::pair<double, std::uint32_t>> scored;
  if (rows) {
    scored.reserve(rows->size());
    for (std::uint32_t r : *rows) scored.emplace_back(score(r, query), r);
  } else {
    scored.reserve(size());
    for (std::uint32_t r = 0; r < size(); ++r) {
      scored.emplace_back(score(r, query), r);
    }
  }
  auto better = [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return ids_[a.second] < ids_[b.second];
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), better);
  SearchResult out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({ids_[scored[i].second], scored[i].first, scored[i].second});
  }
  return out;
}

SearchResult DocumentIndex::search_exact(std::span<const double> query,
                                         std::size_t k) const {
  check_query(query, k);
  return top_k(query, k, nullptr);
}

SearchResult DocumentIndex::search_ivf(std::span<const double> query,
                                       std::size_t k,
                                       std::size_t nprobe) const {
  check_query(query, k);
  if (!ivf_) throw UsageError("index has no IVF section");
  const std::size_t nc = ivf_->num_centroids();
  if (nprobe < 1 || nprobe > nc) {
    throw UsageError("nprobe must be in [1, " + std::to_string(nc) + "]");
  }
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const std::span<const float> centroid(ivf_->centroids.data() + c * dim_, dim_);
    order.emplace_back(dot_rows(centroid, query), c);
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nprobe),
                    order.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<std::uint32_t> rows;
  for (std::size_t p = 0; p < nprobe; ++p) {
    const auto& list = ivf_->lists[order[p].second];
    rows.insert(rows.end(), list.begin(), list.end());
  }
  return top_k(query, k, &rows);
}

DocumentIndex DocumentIndex::with_ivf(std::size_t num_centroids,
                                      std::uint64_t seed) const {
  const std::size_t n = size();
  if (num_centroids == 0) throw UsageError("num_centroids must be positive");
  if (num_centroids > n) {
    throw UsageError("num_centroids " + std::to_string(num_centroids) +
                     " exceeds document count " + std::to_string(n));
  }
  // Clustering runs on unit directions, which is what inner-product ranking
  // against a probe cares about.
  std::vector<double> unit(n * dim_);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < dim_; ++d) unit[r * dim_ + d] = vectors_[r * dim_ + d];
    normalize_in_place(std::span<double>(unit.data() + r * dim_, dim_));
  }
  auto row = [&](std::size_t r) {
    return std::span<const double>(unit.data() + r * dim_, dim_);
  };

  Rng rng(seed);
  std::vector<double> centroids(num_centroids * dim_);
  auto set_centroid = [&](std::size_t c, std::span<const double> v) {
    std::copy(v.begin(), v.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * dim_));
  };
  auto centroid = [&](std::size_t c) {
    return std::span<const double>(centroids.data() + c * dim_, dim_);
  };

  // k-means++ on squared chordal distance 2 - 2<a,b>.
  set_centroid(0, row(rng.uniform_index(n)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < num_centroids; ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = std::max(0.0, 2.0 - 2.0 * dot(row(r), centroid(c - 1)));
      nearest[r] = std::min(nearest[r], d);
      total += nearest[r];
    }
    std::size_t pick;
    if (total > 0.0) {
      pick = rng.categorical(nearest);
    } else {
      pick = rng.uniform_index(n);
    }
    set_centroid(c, row(pick));
  }

  std::vector<std::uint32_t> assign(n, 0);
  auto assign_all = [&] {
    for (std::size_t r = 0; r < n; ++r) {
      double best = -std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t c = 0; c < num_centroids; ++c) {
        const double s = dot(row(r), centroid(c));
        if (s > best) {
          best = s;
          arg = static_cast<std::uint32_t>(c);
        }
      }
      assign[r] = arg;
    }
  };
  for (std::size_t iter = 0; iter < kKMeansIterations; ++iter) {
    assign_all();
    std::vector<double> sums(num_centroids * dim_, 0.0);
    std::vector<std::size_t> counts(num_centroids, 0);
    for (std::size_t r = 0; r < n; ++r) {
      ++counts[assign[r]];
      for (std::size_t d = 0; d < dim_; ++d) {
        sums[assign[r] * dim_ + d] += unit[r * dim_ + d];
      }
    }
    for (std::size_t c = 0; c < num_centroids; ++c) {
      if (counts[c] == 0) continue;
      std::span<double> s(sums.data() + c * dim_, dim_);
      normalize_in_place(s);
      set_centroid(c, s);
    }
  }
  // Quantize centroids to the stored precision before the final assignment
  // so lists agree with what a reloaded index would compute.
  InvertedLists ivf;
  ivf.centroids.assign(centroids.begin(), centroids.end());
  for (std::size_t i = 0; i < centroids.size(); ++i) centroids[i] = ivf.centroids[i];
  assign_all();
  ivf.lists.resize(num_centroids);
  for (std::size_t r = 0; r < n; ++r) {
    ivf.lists[assign[r]].push_back(static_cast<std::uint32_t>(r));
  }
  DocumentIndex out = *this;
  out.ivf_ = std::move(ivf);
  return out;
}

DocumentIndex build_index(const EncoderParams& document_params,
                          const std::vector<Passage>& passages,
                          std::size_t max_tokens) {
  if (passages.empty()) throw DataError("no passages to index");
  const std::size_t dim = document_params.embedding_dim();
  std::vector<std::string> ids;
  std::vector<float> vectors;
  ids.reserve(passages.size());
  vectors.reserve(passages.size() * dim);
  for (const Passage& p : passages) {
    ids.push_back(p.id);
    const Embedding e = embed(
        document_params, featurize(p.text, document_params.num_buckets(), max_tokens));
    for (double x : e) vectors.push_back(static_cast<float>(x));
  }
  return DocumentIndex(std::move(ids), std::move(vectors), dim);
}

void save_index(const DocumentIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write index " + path.string());
  out.write(kMagic, sizeof(kMagic));
  binary::write_pod<std::uint32_t>(out, kVersion);
  binary::write_pod<std::uint64_t>(out, index.size());
  binary::write_pod<std::uint64_t>(out, index.dim());
  for (const std::string& id : index.ids()) binary::write_string(out, id);
  binary::write_array<float>(out, index.matrix());
  const auto& ivf = index.ivf();
  binary::write_pod<std::uint8_t>(out, ivf ? 1 : 0);
  if (ivf) {
    binary::write_pod<std::uint64_t>(out, ivf->num_centroids());
    binary::write_array<float>(out, ivf->centroids);
    for (const auto& list : ivf->lists) {
      binary::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
      binary::write_array<std::uint32_t>(out, list);
    }
  }
  if (!out) throw DataError("failed writing index " + path.string());
}

DocumentIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read index " + path.string());
  binary::Reader reader(in, path.string());
  char magic[8];
  reader.array<char>(magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    reader.fail("not an index file (bad magic)");
  }
  const auto version = reader.pod<std::uint32_t>("version");
  if (version != kVersion) {
    reader.fail("unsupported index version " + std::to_string(version));
  }
  const auto count = reader.pod<std::uint64_t>("doc count");
  const auto dim = reader.pod<std::uint64_t>("dim");
  if (count == 0 || dim == 0 || count > (1u << 30) || dim > (1u << 16)) {
    reader.fail("implausible index dimensions");
  }
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(reader.string("id"));
  std::vector<float> vectors(count * dim);
  reader.array<float>(vectors, "vectors");
  DocumentIndex index(std::move(ids), std::move(vectors), dim);
  const auto has_ivf = reader.pod<std::uint8_t>("ivf flag");
  if (has_ivf > 1) reader.fail("bad ivf flag");
  if (has_ivf) {
    const auto nc = reader.pod<std::uint64_t>("num_centroids");
    if (nc == 0 || nc > count) reader.fail("bad centroid count");
    InvertedLists ivf;
    ivf.centroids.resize(nc * dim);
    reader.array<float>(ivf.centroids, "centroids");
    std::vector<bool> covered(count, false);
    for (std::uint64_t c = 0; c < nc; ++c) {
      const auto len = reader.pod<std::uint32_t>("posting length");
      if (len > count) reader.fail("posting list too long");
      std::vector<std::uint32_t> list(len);
      reader.array<std::uint32_t>(list, "posting list");
      for (std::uint32_t r : list) {
        if (r >= count || covered[r]) reader.fail("posting lists do not partition documents");
        covered[r] = true;
      }
      ivf.lists.push_back(std::move(list));
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
      reader.fail("posting lists do not partition documents");
    }
    index.ivf_ = std::move(ivf);
  }
  reader.expect_end();
  return index;
}

}  // namespace capot
