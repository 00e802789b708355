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

#include "capot/experiment.hpp"

#include <chrono>

#include "capot/errors.hpp"
#include "capot/index.hpp"
#include "capot/random.hpp"
#include "capot/text_resources.hpp"

namespace capot {
namespace {

using Clock = std::chrono::steady_clock;

// Sums of accuracy times query count, per row and depth.
struct Pool {
  std::map<std::size_t, double> clean;
  std::map<std::string, std::map<std::size_t, double>> noisy;
  std::size_t clean_n = 0;
  std::map<std::string, std::size_t> noisy_n;

  EvalReport report(const std::string& regime, std::uint64_t seed,
                    const std::vector<std::size_t>& depths) const {
    AccuracyByDepth c;
    for (const auto& [k, v] : clean) c[k] = v / static_cast<double>(clean_n);
    std::map<std::string, AccuracyByDepth> n;
    for (const auto& [type, by_k] : noisy) {
      for (const auto& [k, v] : by_k) n[type][k] = v / static_cast<double>(noisy_n.at(type));
    }
    EvalReport r = degradation_report(c, n, depths);
    r.regime = regime;
    r.seed = seed;
    return r;
  }
};

std::string draw_label(std::size_t fold, std::size_t draw) {
  return std::to_string(fold) + "/" + std::to_string(draw);
}

}  // namespace

ExperimentOptions::ExperimentOptions() {
  cross_corpus.seed = 13;
  train.shared_init = true;
  train.seed = 7;
  align = train;
  align.regime = Regime::kCapot;
  align.learning_rate = kDefaultAlignLearningRate;
  align.epochs = kDefaultAlignEpochs;
}

std::vector<NoisedQuery> noise_draws(const QueryNoiser& noiser, const std::vector<Query>& queries,
                                     const std::vector<NoiseType>& types, std::size_t draws,
                                     std::uint64_t seed) {
  std::vector<NoisedQuery> out;
  for (std::size_t d = 0; d < draws; ++d) {
    NoiseConfig config;
    config.enabled_types = types;
    config.master_seed = derive_seed(seed, "draw", std::to_string(d));
    for (NoisedQuery& nq : noiser.noise_dataset(queries, config)) out.push_back(std::move(nq));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentOptions& o) {
  const auto start = Clock::now();
  if (o.folds < 2) throw UsageError("folds must be at least 2");
  if (o.eval_noise_draws == 0 || o.train_noise_draws == 0) {
    throw UsageError("noise draws must be positive");
  }
  if (o.depths.empty()) throw UsageError("no depths");
  o.train.validate();
  o.align.validate();
  const SyntheticCorpus corpus = generate_synthetic_corpus(o.corpus);
  SyntheticCorpus cross;
  if (o.run_cross_alignment || o.run_pretrain_align) {
    SyntheticOptions co = o.cross_corpus;
    co.excluded_words.insert(corpus.vocabulary.begin(), corpus.vocabulary.end());
    cross = generate_synthetic_corpus(co);
  }
  const QueryNoiser noiser(TextResources::bundled());
  const std::size_t max_k = o.depths.back();

  std::map<std::string, Pool> pools;
  ExperimentResult result;
  for (std::size_t f = 0; f < o.folds; ++f) {
    std::vector<Query> train, test;
    for (std::size_t i = 0; i < corpus.queries.size(); ++i) {
      (i % o.folds == f ? test : train).push_back(corpus.queries[i]);
    }
    const std::string fold = std::to_string(f);
    std::vector<std::vector<NoisedQuery>> test_noise;
    for (std::size_t d = 0; d < o.eval_noise_draws; ++d) {
      NoiseConfig config;
      config.enabled_types = o.noise_types;
      config.master_seed = derive_seed(o.seed, "eval-noise", draw_label(f, d));
      test_noise.push_back(noiser.noise_dataset(test, config));
    }
    const auto train_noise = noise_draws(noiser, train, o.noise_types, o.train_noise_draws,
                                         derive_seed(o.seed, "train-noise", fold));
    result.clean_queries += test.size();
    for (const auto& draw : test_noise) result.noisy_queries += draw.size();

    const TrainResult base = train_baseline(train, corpus.passages, corpus.qrels, o.train);
    const DocumentIndex index = build_index(base.encoders.document, corpus.passages,
                                            o.train.max_passage_tokens);

    auto evaluate = [&](std::string_view regime, const EncoderParams& query_tower,
                        const DocumentIndex& idx) {
      Pool& pool = pools[std::string(regime)];
      const auto clean = search_queries(query_tower, idx, test, max_k, o.train.max_tokens);
      for (std::size_t k : o.depths) {
        pool.clean[k] += retrieval_accuracy(clean, corpus.qrels, k) * test.size();
      }
      pool.clean_n += test.size();
      for (const auto& draw : test_noise) {
        for (NoiseType t : o.noise_types) {
          std::vector<Query> noisy;
          for (const NoisedQuery& nq : draw) {
            if (nq.noise_type == t) noisy.push_back({nq.anchor_id, nq.text});
          }
          const auto results = search_queries(query_tower, idx, noisy, max_k, o.train.max_tokens);
          const std::string name(to_string(t));
          for (std::size_t k : o.depths) {
            pool.noisy[name][k] += retrieval_accuracy(results, corpus.qrels, k) * noisy.size();
          }
          pool.noisy_n[name] += noisy.size();
        }
      }
    };

    evaluate(kRegularRun, base.encoders.query, index);
    TrainConfig align = o.align;
    align.seed = derive_seed(o.align.seed, "fold", fold);
    evaluate(kCapotRun, align_capot(base.encoders.query, train, train_noise, align).query, index);

    if (o.run_cross_alignment) {
      const std::size_t n = cross.queries.size() - cross.queries.size() / o.folds;
      const std::vector<Query> external(cross.queries.begin(),
                                        cross.queries.begin() + static_cast<std::ptrdiff_t>(n));
      const auto external_noise = noise_draws(noiser, external, o.noise_types,
                                              o.train_noise_draws,
                                              derive_seed(o.seed, "cross-noise", fold));
      evaluate(kCrossCapotRun,
               align_capot(base.encoders.query, external, external_noise, align).query, index);
    }
    if (o.run_data_augmentation) {
      const TrainResult da = train_data_augmentation(train, train_noise, corpus.passages,
                                                     corpus.qrels, o.train);
      evaluate(kDataAugmentationRun, da.encoders.query,
               build_index(da.encoders.document, corpus.passages, o.train.max_passage_tokens));
    }
    if (o.run_pretrain_align) {
      const auto external_noise = noise_draws(noiser, cross.queries, o.noise_types,
                                              o.train_noise_draws,
                                              derive_seed(o.seed, "pretrain-noise", fold));
      const PretrainResult pt = pretrain_align(cross.queries, external_noise, train,
                                               corpus.passages, corpus.qrels, align, o.train);
      evaluate(kPretrainAlignRun, pt.stage2.encoders.query,
               build_index(pt.stage2.encoders.document, corpus.passages,
                           o.train.max_passage_tokens));
    }
  }
  for (const auto& [regime, pool] : pools) {
    result.reports[regime] = pool.report(regime, o.seed, o.depths);
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace capot
