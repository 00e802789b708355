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

#ifndef CAPOT_EXPERIMENT_HPP_
#define CAPOT_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "capot/evaluation.hpp"
#include "capot/noise.hpp"
#include "capot/synthetic.hpp"
#include "capot/training.hpp"

namespace capot {

// Regime labels used in experiment reports.
inline constexpr std::string_view kRegularRun = "regular";
inline constexpr std::string_view kDataAugmentationRun = "da";
inline constexpr std::string_view kPretrainAlignRun = "pt";
inline constexpr std::string_view kCapotRun = "capot";
inline constexpr std::string_view kCrossCapotRun = "capot-cross";

// Cross-validated noise-robustness experiment on synthetic corpora. Fold f
// evaluates queries i % folds == f and trains on the rest; accuracies are
// pooled over folds and noise draws.
struct ExperimentOptions {
  SyntheticOptions corpus;
  // The cross corpus excludes the main corpus's vocabulary.
  SyntheticOptions cross_corpus;
  TrainConfig train;
  TrainConfig align;
  std::vector<NoiseType> noise_types{kTypoNoiseTypes.begin(), kTypoNoiseTypes.end()};
  std::vector<std::size_t> depths = kDefaultDepths;
  std::size_t folds = 5;
  // Independent noise draws of every evaluation query.
  std::size_t eval_noise_draws = 3;
  // Noised copies of every training query used for alignment and DA.
  std::size_t train_noise_draws = 3;
  std::uint64_t seed = 0;
  bool run_data_augmentation = false;
  bool run_pretrain_align = false;
  bool run_cross_alignment = false;

  ExperimentOptions();
};

struct ExperimentResult {
  // Keyed by regime label; rows are "none", the noise types and aggregates.
  std::map<std::string, EvalReport> reports;
  std::size_t clean_queries = 0;
  std::size_t noisy_queries = 0;
  double seconds = 0.0;
};

ExperimentResult run_experiment(const ExperimentOptions& options);

// Copies of queries with one noised record per (query, type, draw), ids
// "<anchor>#<type>#<draw>".
std::vector<NoisedQuery> noise_draws(const QueryNoiser& noiser,
                                     const std::vector<Query>& queries,
                                     const std::vector<NoiseType>& types,
                                     std::size_t draws, std::uint64_t seed);

}  // namespace capot

#endif  // CAPOT_EXPERIMENT_HPP_
