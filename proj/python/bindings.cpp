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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "capot/encoder.hpp"
#include "capot/errors.hpp"
#include "capot/evaluation.hpp"
#include "capot/experiment.hpp"
#include "capot/index.hpp"
#include "capot/io.hpp"
#include "capot/losses.hpp"
#include "capot/noise.hpp"
#include "capot/synthetic.hpp"
#include "capot/text_resources.hpp"
#include "capot/text.hpp"
#include "capot/training.hpp"

namespace py = pybind11;

namespace capot {
namespace {

using Vec = std::vector<double>;

void bind_errors(py::module_& m) {
  static py::exception<DataError> data_error(m, "DataError", PyExc_RuntimeError);
  static py::exception<UsageError> usage_error(m, "UsageError", PyExc_ValueError);
  static py::exception<BackendError> backend_error(m, "BackendError", PyExc_RuntimeError);
  static py::exception<FrozenParamsError> frozen_error(m, "FrozenParamsError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const UsageError& e) {
      py::set_error(usage_error, e.what());
    } catch (const BackendError& e) {
      py::set_error(backend_error, e.what());
    } catch (const FrozenParamsError& e) {
      py::set_error(frozen_error, e.what());
    }
  });
}

void bind_text(py::module_& m) {
  const auto& res = TextResources::bundled();
  m.def("stem", [&res](const std::string& w) { return res.stem(w); }, py::arg("word"));
  m.def("lemmatize", [&res](const std::string& w) { return res.lemmatize(w); }, py::arg("word"));
  m.def("synonyms_of", [&res](const std::string& w) { return res.synonyms_of(w); },
        py::arg("word"));
  m.def(
      "keyboard_neighbors",
      [&res](const std::string& c) {
        const std::u32string cs = text::to_u32(c);
        if (cs.size() != 1) throw UsageError("expected a single character");
        std::vector<std::string> out;
        for (char32_t n : res.keyboard_neighbors(cs[0])) out.push_back(text::to_utf8(n));
        return out;
      },
      py::arg("character"));
}

void bind_noise(py::module_& m) {
  py::enum_<NoiseType> types(m, "NoiseType");
  for (NoiseType t : kAllNoiseTypes) types.value(std::string(to_string(t)).c_str(), t);

  py::class_<Query>(m, "Query")
      .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("text"))
      .def_readwrite("id", &Query::id)
      .def_readwrite("text", &Query::text)
      .def("__repr__", [](const Query& q) { return "Query(" + q.id + ", " + q.text + ")"; });
  py::class_<NoisedQuery>(m, "NoisedQuery")
      .def(py::init<>())
      .def_readwrite("anchor_id", &NoisedQuery::anchor_id)
      .def_readwrite("noise_type", &NoisedQuery::noise_type)
      .def_readwrite("text", &NoisedQuery::text)
      .def_readwrite("seed", &NoisedQuery::seed);
  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("enabled_types", &NoiseConfig::enabled_types)
      .def_readwrite("master_seed", &NoiseConfig::master_seed)
      .def_readwrite("max_stem_lemma_words", &NoiseConfig::max_stem_lemma_words);

  m.def(
      "apply_noise",
      [](const Query& q, NoiseType type, const NoiseConfig& config) {
        return QueryNoiser(TextResources::bundled()).apply(q, type, config);
      },
      py::arg("query"), py::arg("noise_type"), py::arg("config") = NoiseConfig{});
  m.def(
      "noise_dataset",
      [](const std::vector<Query>& queries, const NoiseConfig& config) {
        return QueryNoiser(TextResources::bundled()).noise_dataset(queries, config);
      },
      py::arg("queries"), py::arg("config") = NoiseConfig{});
  m.def("noised_to_jsonl", &io::noised_to_jsonl, py::arg("noised"));
}

void bind_encoder(py::module_& m) {
  py::class_<FeatureVector>(m, "FeatureVector")
      .def_readonly("indices", &FeatureVector::indices)
      .def_readonly("values", &FeatureVector::values)
      .def("__len__", &FeatureVector::size);
  py::class_<EncoderParams>(m, "EncoderParams")
      .def_property_readonly("embedding_dim", &EncoderParams::embedding_dim)
      .def_property_readonly("num_buckets", &EncoderParams::num_buckets)
      .def_property_readonly("frozen", &EncoderParams::frozen)
      .def("at", &EncoderParams::at, py::arg("row"), py::arg("bucket"))
      .def("__eq__", [](const EncoderParams& a, const EncoderParams& b) { return a == b; });
  m.def("featurize", &featurize, py::arg("text"), py::arg("num_buckets") = kDefaultNumBuckets,
        py::arg("max_tokens") = kDefaultMaxTokens);
  m.def("init_params", &init_params, py::arg("embedding_dim") = kDefaultEmbeddingDim,
        py::arg("num_buckets") = kDefaultNumBuckets, py::arg("seed") = 0);
  m.def("clone_frozen", &clone_frozen, py::arg("params"));
  m.def("embed", &embed, py::arg("params"), py::arg("features"));
  m.def("encode_text",
        [](const EncoderParams& p, const std::string& text, std::size_t max_tokens) {
          return embed(p, featurize(text, p.num_buckets(), max_tokens));
        },
        py::arg("params"), py::arg("text"), py::arg("max_tokens") = kDefaultMaxTokens);
  m.def("save_params", &save_params, py::arg("params"), py::arg("path"));
  m.def("load_params", &load_params, py::arg("path"));
}

void bind_losses(py::module_& m) {
  py::class_<LossWeights>(m, "LossWeights")
      .def(py::init<>())
      .def_readwrite("tau_positive", &LossWeights::tau_positive)
      .def_readwrite("tau_negative", &LossWeights::tau_negative)
      .def_readwrite("tau_anchor", &LossWeights::tau_anchor)
      .def_readwrite("tau_ranking", &LossWeights::tau_ranking)
      .def_readwrite("tau_contrastive", &LossWeights::tau_contrastive)
      .def_readwrite("eps_contrastive", &LossWeights::eps_contrastive)
      .def_readwrite("eps_anchor", &LossWeights::eps_anchor)
      .def_readwrite("eps_ranking", &LossWeights::eps_ranking);
  py::class_<LossBreakdown>(m, "LossBreakdown")
      .def_readonly("contrastive", &LossBreakdown::contrastive)
      .def_readonly("anchor", &LossBreakdown::anchor)
      .def_readonly("ranking", &LossBreakdown::ranking)
      .def_readonly("total", &LossBreakdown::total);
  py::class_<CapotTerm>(m, "CapotTerm")
      .def_readonly("breakdown", &CapotTerm::breakdown)
      .def_readonly("grad_x", &CapotTerm::grad_x)
      .def_readonly("grad_pos", &CapotTerm::grad_pos)
      .def_readonly("grad_neg", &CapotTerm::grad_neg);
  m.def(
      "capot_loss",
      [](const Vec& x, const Vec& pos, const Vec& neg, const Vec& frozen, const LossWeights& w) {
        return capot_loss(x, pos, neg, frozen, w);
      },
      py::arg("x"), py::arg("pos"), py::arg("neg"), py::arg("x_frozen"),
      py::arg("weights") = LossWeights{});
}

void bind_training(py::module_& m) {
  py::class_<Passage>(m, "Passage")
      .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("text"))
      .def_readwrite("id", &Passage::id)
      .def_readwrite("text", &Passage::text);
  py::enum_<Regime>(m, "Regime")
      .value("baseline", Regime::kBaseline)
      .value("da", Regime::kDataAugmentation)
      .value("pt", Regime::kPretrainAlign)
      .value("capot", Regime::kCapot);
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("negatives_per_positive", &TrainConfig::negatives_per_positive)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("temperature", &TrainConfig::temperature)
      .def_readwrite("embedding_dim", &TrainConfig::embedding_dim)
      .def_readwrite("num_buckets", &TrainConfig::num_buckets)
      .def_readwrite("max_tokens", &TrainConfig::max_tokens)
      .def_readwrite("max_passage_tokens", &TrainConfig::max_passage_tokens)
      .def_readwrite("shared_init", &TrainConfig::shared_init)
      .def_readwrite("loss_weights", &TrainConfig::loss_weights);
  py::class_<EncoderPair>(m, "EncoderPair")
      .def_readonly("query", &EncoderPair::query)
      .def_readonly("document", &EncoderPair::document);
  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("encoders", &TrainResult::encoders)
      .def_readonly("epoch_loss", &TrainResult::epoch_loss)
      .def_readonly("examples_per_epoch", &TrainResult::examples_per_epoch);
  py::class_<AlignResult>(m, "AlignResult")
      .def_readonly("query", &AlignResult::query)
      .def_readonly("frozen_anchor", &AlignResult::frozen_anchor)
      .def_readonly("epoch_loss", &AlignResult::epoch_loss)
      .def_readonly("triples_per_epoch", &AlignResult::triples_per_epoch);

  m.def("train_baseline",
        [](const std::vector<Query>& q, const std::vector<Passage>& p, const Qrels& r,
           const TrainConfig& c) { return train_baseline(q, p, r, c); },
        py::arg("queries"), py::arg("passages"), py::arg("qrels"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("train_data_augmentation", &train_data_augmentation, py::arg("queries"),
        py::arg("noised"), py::arg("passages"), py::arg("qrels"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("align_capot",
        py::overload_cast<const EncoderParams&, const std::vector<Query>&,
                          const std::vector<NoisedQuery>&, const TrainConfig&>(&align_capot),
        py::arg("query_params"), py::arg("queries"), py::arg("noised"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}

void bind_index(py::module_& m) {
  py::class_<SearchHit>(m, "SearchHit")
      .def_readonly("id", &SearchHit::id)
      .def_readonly("score", &SearchHit::score)
      .def_readonly("doc", &SearchHit::doc);
  py::class_<DocumentIndex>(m, "DocumentIndex")
      .def(py::init<std::vector<std::string>, std::vector<float>, std::size_t>(), py::arg("ids"),
           py::arg("vectors"), py::arg("dim"))
      .def("__len__", &DocumentIndex::size)
      .def_property_readonly("dim", &DocumentIndex::dim)
      .def_property_readonly("ids", &DocumentIndex::ids)
      .def("search_exact",
           [](const DocumentIndex& i, const Vec& q, std::size_t k) { return i.search_exact(q, k); },
           py::arg("query"), py::arg("k"))
      .def("search_ivf",
           [](const DocumentIndex& i, const Vec& q, std::size_t k, std::size_t nprobe) {
             return i.search_ivf(q, k, nprobe);
           },
           py::arg("query"), py::arg("k"), py::arg("nprobe"))
      .def("with_ivf", &DocumentIndex::with_ivf, py::arg("num_centroids"), py::arg("seed") = 0);
  m.def("build_index", &build_index, py::arg("document_params"), py::arg("passages"),
        py::arg("max_tokens") = kDefaultMaxPassageTokens);
  m.def("save_index", &save_index, py::arg("index"), py::arg("path"));
  m.def("load_index", &load_index, py::arg("path"));
  m.def("search_queries", &search_queries, py::arg("query_params"), py::arg("index"),
        py::arg("queries"), py::arg("k"), py::arg("max_tokens") = kDefaultMaxTokens);
}

void bind_evaluation(py::module_& m) {
  py::class_<ReportCell>(m, "ReportCell")
      .def_readonly("accuracy", &ReportCell::accuracy)
      .def_readonly("relative_loss", &ReportCell::relative_loss);
  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("regime", &EvalReport::regime)
      .def_readonly("depths", &EvalReport::depths)
      .def("cell", &EvalReport::cell, py::arg("row"), py::arg("k"))
      .def("row_names",
           [](const EvalReport& r) {
             std::vector<std::string> out;
             for (const ReportRow& row : r.rows) out.push_back(row.name);
             return out;
           })
      .def("to_csv", &report_to_csv)
      .def("to_json", &report_to_json);
  m.def("retrieval_accuracy", &retrieval_accuracy, py::arg("results"), py::arg("qrels"),
        py::arg("k"));
  m.def("mrr_at_k", &mrr_at_k, py::arg("results"), py::arg("qrels"), py::arg("k") = 10);
  m.def("degradation_report", &degradation_report, py::arg("clean"), py::arg("noisy"),
        py::arg("depths"));
  m.def("compare_reports",
        [](const std::vector<EvalReport>& reports) {
          return comparison_to_csv(compare_runs(reports));
        },
        py::arg("reports"));
}

void bind_synthetic(py::module_& m) {
  py::class_<SyntheticOptions>(m, "SyntheticOptions")
      .def(py::init<>())
      .def_readwrite("num_queries", &SyntheticOptions::num_queries)
      .def_readwrite("vocab_size", &SyntheticOptions::vocab_size)
      .def_readwrite("seed", &SyntheticOptions::seed)
      .def_readwrite("excluded_words", &SyntheticOptions::excluded_words);
  py::class_<SyntheticCorpus>(m, "SyntheticCorpus")
      .def_readonly("vocabulary", &SyntheticCorpus::vocabulary)
      .def_readonly("queries", &SyntheticCorpus::queries)
      .def_readonly("passages", &SyntheticCorpus::passages)
      .def_readonly("qrels", &SyntheticCorpus::qrels);
  m.def("generate_synthetic_corpus", &generate_synthetic_corpus,
        py::arg("options") = SyntheticOptions{});

  py::class_<ExperimentOptions>(m, "ExperimentOptions")
      .def(py::init<>())
      .def_readwrite("corpus", &ExperimentOptions::corpus)
      .def_readwrite("cross_corpus", &ExperimentOptions::cross_corpus)
      .def_readwrite("train", &ExperimentOptions::train)
      .def_readwrite("align", &ExperimentOptions::align)
      .def_readwrite("folds", &ExperimentOptions::folds)
      .def_readwrite("eval_noise_draws", &ExperimentOptions::eval_noise_draws)
      .def_readwrite("train_noise_draws", &ExperimentOptions::train_noise_draws)
      .def_readwrite("seed", &ExperimentOptions::seed)
      .def_readwrite("run_data_augmentation", &ExperimentOptions::run_data_augmentation)
      .def_readwrite("run_pretrain_align", &ExperimentOptions::run_pretrain_align)
      .def_readwrite("run_cross_alignment", &ExperimentOptions::run_cross_alignment);
  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("reports", &ExperimentResult::reports)
      .def_readonly("clean_queries", &ExperimentResult::clean_queries)
      .def_readonly("noisy_queries", &ExperimentResult::noisy_queries)
      .def_readonly("seconds", &ExperimentResult::seconds);
  m.def("run_experiment", &run_experiment, py::arg("options") = ExperimentOptions{},
        py::call_guard<py::gil_scoped_release>());
}

void bind_config(py::module_& m) {
  py::class_<io::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("from_text", &io::RunConfig::from_text, py::arg("text"))
      .def("set", &io::RunConfig::set, py::arg("key"), py::arg("value"))
      .def("get", &io::RunConfig::get, py::arg("key"))
      .def("train_config", &io::RunConfig::train_config)
      .def("align_config", &io::RunConfig::align_config)
      .def("noise_config", &io::RunConfig::noise_config)
      .def("canonical", &io::RunConfig::canonical)
      .def("hash", &io::RunConfig::hash)
      .def_static("keys", &io::RunConfig::keys);
}

}  // namespace
}  // namespace capot

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noise-robust dense retrieval: noising, training, alignment, search, evaluation";
  capot::bind_errors(m);
  capot::bind_text(m);
  capot::bind_noise(m);
  capot::bind_encoder(m);
  capot::bind_losses(m);
  capot::bind_training(m);
  capot::bind_index(m);
  capot::bind_evaluation(m);
  capot::bind_synthetic(m);
  capot::bind_config(m);
}
