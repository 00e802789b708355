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

#include "capot/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "capot/errors.hpp"
#include "capot/random.hpp"

namespace capot {
namespace {

struct Example {
  std::string query_text;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

std::size_t passage_row(const std::unordered_map<std::string_view, std::size_t>& rows,
                        const std::string& id) {
  auto it = rows.find(id);
  if (it == rows.end()) throw DataError("unknown passage id '" + id + "'");
  return it->second;
}

// Shared bi-encoder loop for baseline, DA and PT stage 2.
TrainResult train_bi_encoder(const std::vector<Example>& examples,
                             const std::vector<Passage>& passages,
                             const TrainConfig& config,
                             const EncoderParams* initial_query) {
  config.validate();
  if (config.batch_size < 2) {
    throw UsageError("batch_size must be at least 2 for in-batch negatives");
  }
  TrainResult result;
  result.examples_per_epoch = examples.size();
  EncoderParams query = initial_query ? *initial_query : initial_query_params(config);
  if (query.frozen()) throw FrozenParamsError("cannot train a frozen encoder");
  if (query.embedding_dim() != config.embedding_dim ||
      query.num_buckets() != config.num_buckets) {
    throw UsageError("initial query encoder does not match configured dimensions");
  }
  EncoderParams document = initial_document_params(config);

  std::vector<FeatureVector> passage_features;
  passage_features.reserve(passages.size());
  for (const Passage& p : passages) {
    passage_features.push_back(featurize(p.text, config.num_buckets, config.max_passage_tokens));
  }
  std::vector<FeatureVector> query_features;
  query_features.reserve(examples.size());
  for (const Example& e : examples) {
    query_features.push_back(featurize(e.query_text, config.num_buckets, config.max_tokens));
  }

  const double inv_t = 1.0 / config.temperature;
  const std::size_t dim = config.embedding_dim;
  std::vector<std::size_t> order(examples.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, "epoch", std::to_string(epoch)));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      // Unique candidate passages in first-seen order.
      std::vector<std::size_t> candidates;
      std::unordered_map<std::size_t, std::size_t> slot;
      auto add_candidate = [&](std::size_t row) {
        if (slot.emplace(row, candidates.size()).second) candidates.push_back(row);
      };
      for (std::size_t i = start; i < end; ++i) add_candidate(examples[order[i]].positive);
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t n : examples[order[i]].negatives) add_candidate(n);
      }
      std::vector<Encoded> docs;
      docs.reserve(candidates.size());
      for (std::size_t row : candidates) {
        docs.push_back(encode(document, passage_features[row]));
      }
      std::vector<Embedding> doc_grads(candidates.size(), Embedding(dim, 0.0));
      GradientBuffer query_grads;
      const double batch_scale = 1.0 / static_cast<double>(end - start);
      std::vector<double> logits(candidates.size());
      for (std::size_t i = start; i < end; ++i) {
        const Example& ex = examples[order[i]];
        const Encoded q = encode(query, query_features[order[i]]);
        double max_logit = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          logits[c] = dot(q.embedding, docs[c].embedding) * inv_t;
          max_logit = std::max(max_logit, logits[c]);
        }
        double z = 0.0;
        for (double& l : logits) {
          l = std::exp(l - max_logit);
          z += l;
        }
        const std::size_t target = slot.at(ex.positive);
        epoch_loss += -std::log(logits[target] / z);
        Embedding grad_q(dim, 0.0);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const double g = (logits[c] / z - (c == target ? 1.0 : 0.0)) * inv_t * batch_scale;
          if (g == 0.0) continue;
          for (std::size_t r = 0; r < dim; ++r) {
            grad_q[r] += g * docs[c].embedding[r];
            doc_grads[c][r] += g * q.embedding[r];
          }
        }
        query_grads.add(query_features[order[i]], normalize_backward(q, grad_q));
      }
      GradientBuffer document_grads;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        document_grads.add(passage_features[candidates[c]],
                           normalize_backward(docs[c], doc_grads[c]));
      }
      query_grads.apply_sgd(query, config.learning_rate);
      document_grads.apply_sgd(document, config.learning_rate);
    }
    result.epoch_loss.push_back(examples.empty() ? 0.0
                                                 : epoch_loss / double(examples.size()));
  }
  result.encoders = {std::move(query), std::move(document)};
  return result;
}

std::vector<Example> examples_from(const std::vector<TrainingTriple>& triples,
                                   const std::vector<Passage>& passages) {
  std::unordered_map<std::string_view, std::size_t> rows;
  for (std::size_t i = 0; i < passages.size(); ++i) rows.emplace(passages[i].id, i);
  std::vector<Example> out;
  out.reserve(triples.size());
  for (const TrainingTriple& t : triples) {
    Example e{t.query.text, passage_row(rows, t.positive_passage_id), {}};
    for (const std::string& n : t.negative_passage_ids) {
      e.negatives.push_back(passage_row(rows, n));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void check_unique_ids(const std::vector<Query>& queries) {
  std::set<std::string_view> ids;
  for (const Query& q : queries) {
    if (!ids.insert(q.id).second) {
      throw DataError("duplicate query id '" + q.id + "'");
    }
  }
}

AlignResult align_core(
    const EncoderParams& query_params, const TrainConfig& config,
    const std::function<std::vector<AlignmentTriple>(std::size_t)>& triples_for_epoch) {
  config.validate();
  config.loss_weights.validate();
  if (query_params.frozen()) throw FrozenParamsError("cannot align a frozen encoder");
  AlignResult result;
  result.frozen_anchor = clone_frozen(query_params);
  EncoderParams trainable = query_params;
  std::unordered_map<std::string, FeatureVector> cache;
  auto features = [&](const std::string& text) -> const FeatureVector& {
    auto it = cache.find(text);
    if (it == cache.end()) {
      it = cache.emplace(text, featurize(text, trainable.num_buckets(), config.max_tokens))
               .first;
    }
    return it->second;
  };
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<AlignmentTriple> triples = triples_for_epoch(epoch);
    result.triples_per_epoch = triples.size();
    LossBreakdown total;
    for (std::size_t start = 0; start < triples.size(); start += config.batch_size) {
      const std::size_t end = std::min(triples.size(), start + config.batch_size);
      GradientBuffer grads;
      for (std::size_t i = start; i < end; ++i) {
        const AlignmentTriple& t = triples[i];
        const FeatureVector& fx = features(t.anchor.text);
        const FeatureVector& fp = features(t.positive.text);
        const FeatureVector& fn = features(t.negative.text);
        const Encoded x = encode(trainable, fx);
        const Encoded pos = encode(trainable, fp);
        const Encoded neg = encode(trainable, fn);
        const Embedding anchor = embed(result.frozen_anchor, fx);
        const CapotTerm term = capot_loss(x.embedding, pos.embedding, neg.embedding,
                                          anchor, config.loss_weights);
        total += term.breakdown;
        grads.add(fx, normalize_backward(x, term.grad_x));
        grads.add(fp, normalize_backward(pos, term.grad_pos));
        grads.add(fn, normalize_backward(neg, term.grad_neg));
      }
      grads.apply_sgd(trainable, config.learning_rate);
    }
    result.epoch_loss.push_back(total);
  }
  result.query = std::move(trainable);
  return result;
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::kBaseline:
      return "baseline";
    case Regime::kDataAugmentation:
      return "da";
    case Regime::kPretrainAlign:
      return "pt";
    case Regime::kCapot:
      return "capot";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view name) {
  for (Regime r : {Regime::kBaseline, Regime::kDataAugmentation,
                   Regime::kPretrainAlign, Regime::kCapot}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw UsageError("batch_size must be positive");
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw UsageError("learning_rate must be finite and positive");
  }
  if (!std::isfinite(temperature) || temperature <= 0.0) {
    throw UsageError("temperature must be finite and positive");
  }
  if (embedding_dim == 0 || num_buckets == 0) {
    throw UsageError("encoder dimensions must be positive");
  }
  if (num_buckets > (std::size_t{1} << 28)) throw UsageError("num_buckets too large");
  if (max_tokens == 0 || max_passage_tokens == 0) {
    throw UsageError("token limits must be positive");
  }
  loss_weights.validate();
}

EncoderParams initial_query_params(const TrainConfig& config) {
  return init_params(config.embedding_dim, config.num_buckets,
                     derive_seed(config.seed, "init", config.shared_init ? "document" : "query"));
}

EncoderParams initial_document_params(const TrainConfig& config) {
  return init_params(config.embedding_dim, config.num_buckets,
                     derive_seed(config.seed, "init", "document"));
}

std::vector<TrainingTriple> make_training_triples(
    const std::vector<Query>& queries, const std::vector<Passage>& passages,
    const Qrels& qrels, std::size_t negatives_per_positive, std::uint64_t seed) {
  if (queries.empty()) throw DataError("no queries");
  if (passages.empty()) throw DataError("no passages");
  check_unique_ids(queries);
  std::unordered_map<std::string_view, std::size_t> rows;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    if (!rows.emplace(passages[i].id, i).second) {
      throw DataError("duplicate passage id '" + passages[i].id + "'");
    }
  }
  std::set<std::string_view> query_ids;
  for (const Query& q : queries) query_ids.insert(q.id);
  for (const auto& [qid, rel] : qrels) {
    if (!query_ids.count(qid)) continue;
    for (const std::string& pid : rel) {
      if (!rows.count(pid)) {
        throw DataError("qrel for query '" + qid + "' references unknown passage '" +
                        pid + "'");
      }
    }
  }
  std::vector<TrainingTriple> triples;
  triples.reserve(queries.size());
  for (const Query& q : queries) {
    auto it = qrels.find(q.id);
    if (it == qrels.end() || it->second.empty()) {
      throw DataError("query '" + q.id + "' has no relevant passage");
    }
    const auto& relevant = it->second;
    if (relevant.size() + negatives_per_positive > passages.size()) {
      throw DataError("not enough passages to draw negatives");
    }
    TrainingTriple t{q, *relevant.begin(), {}};
    Rng rng(derive_seed(seed, "negatives", q.id));
    while (t.negative_passage_ids.size() < negatives_per_positive) {
      const std::string& cand = passages[rng.uniform_index(passages.size())].id;
      if (relevant.count(cand)) continue;
      if (std::find(t.negative_passage_ids.begin(), t.negative_passage_ids.end(), cand) !=
          t.negative_passage_ids.end()) {
        continue;
      }
      t.negative_passage_ids.push_back(cand);
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

TrainResult train_baseline(const std::vector<Query>& queries,
                           const std::vector<Passage>& passages,
                           const Qrels& qrels, const TrainConfig& config,
                           const EncoderParams* initial_query) {
  config.validate();
  const auto triples = make_training_triples(queries, passages, qrels,
                                             config.negatives_per_positive, config.seed);
  return train_bi_encoder(examples_from(triples, passages), passages, config,
                          initial_query);
}

TrainResult train_data_augmentation(const std::vector<Query>& queries,
                                    const std::vector<NoisedQuery>& noised,
                                    const std::vector<Passage>& passages,
                                    const Qrels& qrels, const TrainConfig& config) {
  config.validate();
  auto triples = make_training_triples(queries, passages, qrels,
                                       config.negatives_per_positive, config.seed);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < triples.size(); ++i) by_id.emplace(triples[i].query.id, i);
  triples.reserve(triples.size() + noised.size());
  for (const NoisedQuery& nq : noised) {
    auto it = by_id.find(nq.anchor_id);
    if (it == by_id.end()) {
      throw DataError("noised query references unknown anchor '" + nq.anchor_id + "'");
    }
    TrainingTriple t = triples[it->second];
    t.query = Query{nq.anchor_id + "#" + std::string(to_string(nq.noise_type)), nq.text};
    triples.push_back(std::move(t));
  }
  return train_bi_encoder(examples_from(triples, passages), passages, config, nullptr);
}

std::vector<AlignmentTriple> sample_alignment_triples(
    const std::vector<Query>& queries, const std::vector<NoisedQuery>& noised,
    std::uint64_t seed) {
  check_unique_ids(queries);
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < queries.size(); ++i) by_id.emplace(queries[i].id, i);
  std::set<std::string_view> anchors;
  for (const NoisedQuery& nq : noised) {
    if (!by_id.count(nq.anchor_id)) {
      throw DataError("noised query references unknown anchor '" + nq.anchor_id + "'");
    }
    anchors.insert(nq.anchor_id);
  }
  if (anchors.size() < 2 || queries.size() < 2) {
    throw DataError("alignment needs at least two distinct anchors");
  }
  Rng rng(derive_seed(seed, "alignment-negatives"));
  std::vector<AlignmentTriple> out;
  out.reserve(noised.size());
  for (const NoisedQuery& nq : noised) {
    const std::size_t anchor = by_id.at(nq.anchor_id);
    std::size_t neg = rng.uniform_index(queries.size() - 1);
    if (neg >= anchor) ++neg;
    out.push_back({queries[anchor], nq, queries[neg]});
  }
  return out;
}

AlignResult align_capot(const EncoderParams& query_params,
                        const std::vector<Query>& queries,
                        const std::vector<NoisedQuery>& noised,
                        const TrainConfig& config) {
  // Validate once up front so errors surface even with zero epochs.
  sample_alignment_triples(queries, noised, config.seed);
  return align_core(query_params, config, [&](std::size_t epoch) {
    auto triples = sample_alignment_triples(
        queries, noised, derive_seed(config.seed, "align-epoch", std::to_string(epoch)));
    Rng rng(derive_seed(config.seed, "align-shuffle", std::to_string(epoch)));
    rng.shuffle(triples);
    return triples;
  });
}

AlignResult align_capot(const EncoderParams& query_params,
                        const std::vector<AlignmentTriple>& triples,
                        const TrainConfig& config) {
  for (const AlignmentTriple& t : triples) {
    if (t.positive.anchor_id != t.anchor.id) {
      throw DataError("alignment triple positive does not belong to its anchor");
    }
    if (t.negative.id == t.anchor.id) {
      throw DataError("alignment triple negative equals its anchor");
    }
  }
  return align_core(query_params, config, [&](std::size_t epoch) {
    auto shuffled = triples;
    Rng rng(derive_seed(config.seed, "align-shuffle", std::to_string(epoch)));
    rng.shuffle(shuffled);
    return shuffled;
  });
}

PretrainResult pretrain_align(const std::vector<Query>& external_queries,
                              const std::vector<NoisedQuery>& external_noised,
                              const std::vector<Query>& queries,
                              const std::vector<Passage>& passages,
                              const Qrels& qrels, const TrainConfig& align_config,
                              const TrainConfig& config) {
  PretrainResult out;
  const EncoderParams fresh = initial_query_params(config);
  if (align_config.epochs == 0) {
    out.stage1.frozen_anchor = clone_frozen(fresh);
    out.stage1.query = fresh;
  } else {
    out.stage1 = align_capot(fresh, external_queries, external_noised, align_config);
  }
  out.stage1_query = out.stage1.query;
  out.stage2 = train_baseline(queries, passages, qrels, config, &out.stage1_query);
  return out;
}

ResultsById search_queries(const EncoderParams& query_params,
                           const DocumentIndex& index,
                           const std::vector<Query>& queries, std::size_t k,
                           std::size_t max_tokens) {
  ResultsById out;
  for (const Query& q : queries) {
    const Embedding e =
        embed(query_params, featurize(q.text, query_params.num_buckets(), max_tokens));
    out[q.id] = index.search_exact(e, k);
  }
  return out;
}

}  // namespace capot
