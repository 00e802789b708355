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

#ifndef CAPOT_TRAINING_HPP_
#define CAPOT_TRAINING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capot/encoder.hpp"
#include "capot/evaluation.hpp"
#include "capot/index.hpp"
#include "capot/losses.hpp"
#include "capot/noise.hpp"

namespace capot {

enum class Regime { kBaseline, kDataAugmentation, kPretrainAlign, kCapot };

std::string_view to_string(Regime regime);
std::optional<Regime> parse_regime(std::string_view name);

// Alignment moves a trained encoder, so it uses its own step size and length.
inline constexpr double kDefaultAlignLearningRate = 5e-5;
inline constexpr std::size_t kDefaultAlignEpochs = 10;

struct TrainConfig {
  Regime regime = Regime::kBaseline;
  std::size_t batch_size = 32;
  double learning_rate = 1e-5;
  std::size_t epochs = 50;
  std::size_t negatives_per_positive = 1;
  std::uint64_t seed = 0;
  // Softmax temperature for the in-batch objective.
  double temperature = 0.05;
  std::size_t embedding_dim = kDefaultEmbeddingDim;
  std::size_t num_buckets = kDefaultNumBuckets;
  std::size_t max_tokens = kDefaultMaxTokens;
  std::size_t max_passage_tokens = kDefaultMaxPassageTokens;
  // Start the query tower from the document tower's initialization instead of
  // an independent draw.
  bool shared_init = false;
  LossWeights loss_weights;

  // Bi-encoder training needs batch_size >= 2; alignment accepts 1.
  void validate() const;
};

struct TrainingTriple {
  Query query;
  std::string positive_passage_id;
  std::vector<std::string> negative_passage_ids;
};

struct AlignmentTriple {
  Query anchor;
  NoisedQuery positive;
  Query negative;
};

struct EncoderPair {
  EncoderParams query;
  EncoderParams document;
};

struct TrainResult {
  EncoderPair encoders;
  std::vector<double> epoch_loss;  // mean per-example loss, one per epoch
  std::size_t examples_per_epoch = 0;
};

// Checks that every qrel resolves and every training query has one, then
// pairs each query with its first relevant passage and
// negatives_per_positive non-relevant passages drawn uniformly.
std::vector<TrainingTriple> make_training_triples(
    const std::vector<Query>& queries, const std::vector<Passage>& passages,
    const Qrels& qrels, std::size_t negatives_per_positive, std::uint64_t seed);

// In-batch softmax cross-entropy over inner products, candidates being the
// batch's positives plus its explicit negatives. Plain SGD on the batch mean.
// When initial_query is given the query tower starts from it.
TrainResult train_baseline(const std::vector<Query>& queries,
                           const std::vector<Passage>& passages,
                           const Qrels& qrels, const TrainConfig& config,
                           const EncoderParams* initial_query = nullptr);

// Baseline training on queries plus noised queries; each noised query
// inherits its anchor's positive and negatives.
TrainResult train_data_augmentation(const std::vector<Query>& queries,
                                    const std::vector<NoisedQuery>& noised,
                                    const std::vector<Passage>& passages,
                                    const Qrels& qrels,
                                    const TrainConfig& config);

// One triple per noised query; the negative is uniform over the other
// queries. Requires at least two distinct anchors.
std::vector<AlignmentTriple> sample_alignment_triples(
    const std::vector<Query>& queries, const std::vector<NoisedQuery>& noised,
    std::uint64_t seed);

struct AlignResult {
  EncoderParams query;
  EncoderParams frozen_anchor;  // the clone the run was anchored to
  std::vector<LossBreakdown> epoch_loss;  // summed over the epoch's triples
  std::size_t triples_per_epoch = 0;
};

// Trains a copy of query_params on the summed alignment loss while a frozen
// clone supplies the anchor embeddings. Triples are re-sampled every epoch.
// Document parameters are not an input.
AlignResult align_capot(const EncoderParams& query_params,
                        const std::vector<Query>& queries,
                        const std::vector<NoisedQuery>& noised,
                        const TrainConfig& config);

// Same, over a fixed triple list shuffled every epoch.
AlignResult align_capot(const EncoderParams& query_params,
                        const std::vector<AlignmentTriple>& triples,
                        const TrainConfig& config);

struct PretrainResult {
  EncoderParams stage1_query;
  AlignResult stage1;
  TrainResult stage2;
};

// Stage 1 aligns a freshly initialized query encoder on noised external
// queries; stage 2 is baseline training starting from that encoder.
// align_config drives stage 1 and config drives stage 2.
PretrainResult pretrain_align(const std::vector<Query>& external_queries,
                              const std::vector<NoisedQuery>& external_noised,
                              const std::vector<Query>& queries,
                              const std::vector<Passage>& passages,
                              const Qrels& qrels, const TrainConfig& align_config,
                              const TrainConfig& config);

// Initial towers for a seed, as used by training.
EncoderParams initial_query_params(const TrainConfig& config);
EncoderParams initial_document_params(const TrainConfig& config);

// Encodes every query with the query tower and searches the index.
ResultsById search_queries(const EncoderParams& query_params,
                           const DocumentIndex& index,
                           const std::vector<Query>& queries, std::size_t k,
                           std::size_t max_tokens = kDefaultMaxTokens);

}  // namespace capot

#endif  // CAPOT_TRAINING_HPP_
