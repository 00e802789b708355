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

// Command-line driver: synth, noise, train, index, align, search, eval,
// compare. Exit codes: 0 success, 1 usage, 2 data, 3 backend. Failures print
// one JSON line on stderr.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capot/binary_io.hpp"
#include "capot/encoder.hpp"
#include "capot/errors.hpp"
#include "capot/evaluation.hpp"
#include "capot/index.hpp"
#include "capot/io.hpp"
#include "capot/noise.hpp"
#include "capot/rewrite.hpp"
#include "capot/synthetic.hpp"
#include "capot/text_resources.hpp"
#include "capot/training.hpp"
#include "json.hpp"

namespace capot {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

int fail(int code, std::string_view kind, std::string_view message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << std::endl;
  return code;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared by every subcommand: --config FILE and repeatable --set key=value.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> assignments;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key=value configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", assignments, "override one key, e.g. --set train.epochs=5");
  }
  io::RunConfig load() const {
    io::RunConfig c = file.empty() ? io::RunConfig() : io::RunConfig::from_file(file);
    for (const std::string& a : assignments) c.set_assignment(a);
    return c;
  }
};

void add_model_fields(io::Manifest& m, const EncoderParams& p) {
  m.add_number("embedding_dim", static_cast<double>(p.embedding_dim()));
  m.add_number("num_buckets", static_cast<double>(p.num_buckets()));
}

struct SynthArgs {
  ConfigFlags config;
  std::string out_dir;
};

int run_synth(const SynthArgs& a) {
  const auto start = Clock::now();
  const io::RunConfig config = a.config.load();
  const SyntheticOptions options = config.synthetic_options();
  const SyntheticCorpus corpus = generate_synthetic_corpus(options);
  const fs::path dir(a.out_dir);
  const fs::path queries = dir / "queries.jsonl";
  const fs::path passages = dir / "passages.jsonl";
  const fs::path qrels = dir / "qrels.tsv";
  io::write_queries(queries, corpus.queries);
  io::write_passages(passages, corpus.passages);
  io::write_qrels(qrels, corpus.qrels);
  for (const fs::path& artifact : {queries, passages, qrels}) {
    io::Manifest m("synth");
    m.set_config(config);
    m.add_seed("synth", options.seed);
    m.add_output("artifact", artifact);
    m.set_wall_clock(seconds_since(start));
    m.write_beside(artifact);
  }
  print_summary({{"command", "synth"},
                 {"queries", corpus.queries.size()},
                 {"passages", corpus.passages.size()},
                 {"out_dir", dir.string()}});
  return 0;
}

struct NoiseArgs {
  ConfigFlags config;
  std::string queries, out;
  std::vector<std::string> types;
  std::optional<std::uint64_t> seed;
  std::string synonyms, lemma_exceptions, lemma_rules, keyboard, determiners, stopwords,
      backtranslation;
};

int run_noise(const NoiseArgs& a) {
  const auto start = Clock::now();
  io::RunConfig config = a.config.load();
  if (!a.types.empty()) {
    std::string joined;
    for (const std::string& t : a.types) joined += (joined.empty() ? "" : ",") + t;
    config.set("noise.types", joined);
  }
  if (a.seed) config.set("noise.seed", std::to_string(*a.seed));
  const NoiseConfig noise = config.noise_config();

  ResourcePaths paths;
  auto opt = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<fs::path>(s);
  };
  paths.synonyms = opt(a.synonyms);
  paths.lemma_exceptions = opt(a.lemma_exceptions);
  paths.lemma_rules = opt(a.lemma_rules);
  paths.keyboard = opt(a.keyboard);
  paths.determiners = opt(a.determiners);
  paths.stopwords = opt(a.stopwords);
  paths.backtranslation = opt(a.backtranslation);
  const TextResources resources = TextResources::load(paths);

  bool needs_rewriter = false;
  for (NoiseType t : noise.enabled_types) {
    needs_rewriter |= t == NoiseType::kBt || t == NoiseType::kParaphrase;
  }
  std::shared_ptr<RewriteBackend> rewriter;
  if (needs_rewriter) {
    const char* env_dir = std::getenv("CAPOT_CACHE_DIR");
    fs::path cache_dir = config.get("paths.cache_dir");
    if (cache_dir.empty() && env_dir && *env_dir) cache_dir = env_dir;
    rewriter = make_rewrite_backend(config.get("noise.rewrite_backend"), resources, cache_dir);
  }
  const auto queries = io::read_queries(a.queries);
  if (queries.empty()) throw DataError("no queries");
  const auto noised = QueryNoiser(resources, rewriter).noise_dataset(queries, noise);
  io::write_noised(a.out, noised);

  io::Manifest m("noise");
  m.set_config(config);
  m.add_seed("noise", noise.master_seed);
  m.add_input("queries", a.queries);
  m.add_output("noised", a.out);
  if (rewriter) m.add_field("rewrite_backend", rewriter->label());
  m.set_wall_clock(seconds_since(start));
  m.write_beside(a.out);
  print_summary({{"command", "noise"}, {"records", noised.size()}, {"out", a.out}});
  return 0;
}

struct TrainArgs {
  ConfigFlags config;
  std::string queries, passages, qrels, noised, external_queries, external_noised, out_dir;
  std::string regime;
};

int run_train(const TrainArgs& a) {
  const auto start = Clock::now();
  io::RunConfig config = a.config.load();
  if (!a.regime.empty()) config.set("train.regime", a.regime);
  const TrainConfig train = config.train_config();
  const auto queries = io::read_queries(a.queries);
  const auto passages = io::read_passages(a.passages);
  const Qrels qrels = io::read_qrels(a.qrels);
  if (queries.empty()) throw DataError("no queries");

  io::Manifest m("train");
  m.add_input("queries", a.queries);
  m.add_input("passages", a.passages);
  m.add_input("qrels", a.qrels);
  TrainResult result;
  switch (train.regime) {
    case Regime::kBaseline:
      result = train_baseline(queries, passages, qrels, train);
      break;
    case Regime::kDataAugmentation: {
      if (a.noised.empty()) throw UsageError("regime da needs --noised");
      m.add_input("noised", a.noised);
      result = train_data_augmentation(queries, io::read_noised(a.noised), passages, qrels,
                                       train);
      break;
    }
    case Regime::kPretrainAlign: {
      if (a.external_queries.empty() || a.external_noised.empty()) {
        throw UsageError("regime pt needs --external-queries and --external-noised");
      }
      m.add_input("external_queries", a.external_queries);
      m.add_input("external_noised", a.external_noised);
      const TrainConfig align = config.align_config();
      m.add_seed("align", align.seed);
      PretrainResult pt = pretrain_align(io::read_queries(a.external_queries),
                                         io::read_noised(a.external_noised), queries, passages,
                                         qrels, align, train);
      const fs::path stage1 = fs::path(a.out_dir) / "stage1_query.bin";
      ensure_parent(stage1);
      save_params(pt.stage1.query, stage1);
      m.add_output("stage1_query", stage1);
      result = std::move(pt.stage2);
      break;
    }
    case Regime::kCapot:
      throw UsageError("capot models come from the align subcommand");
  }
  const fs::path query_path = fs::path(a.out_dir) / "query.bin";
  const fs::path document_path = fs::path(a.out_dir) / "document.bin";
  ensure_parent(query_path);
  save_params(result.encoders.query, query_path);
  ensure_parent(document_path);
  save_params(result.encoders.document, document_path);
  m.set_config(config);
  m.add_field("regime", std::string(to_string(train.regime)));
  m.add_seed("train", train.seed);
  add_model_fields(m, result.encoders.query);
  m.add_output("query", query_path);
  m.add_output("document", document_path);
  m.add_number("examples_per_epoch", static_cast<double>(result.examples_per_epoch));
  if (!result.epoch_loss.empty()) m.add_number("final_epoch_loss", result.epoch_loss.back());
  m.set_wall_clock(seconds_since(start));
  m.write_beside(query_path);
  m.write_beside(document_path);
  print_summary({{"command", "train"},
                 {"regime", to_string(train.regime)},
                 {"epochs", result.epoch_loss.size()},
                 {"epoch_loss", result.epoch_loss},
                 {"out_dir", a.out_dir}});
  return 0;
}

struct IndexArgs {
  ConfigFlags config;
  std::string model, passages, out;
  std::optional<std::size_t> centroids;
};

int run_index(const IndexArgs& a) {
  const auto start = Clock::now();
  io::RunConfig config = a.config.load();
  if (a.centroids) config.set("index.centroids", std::to_string(*a.centroids));
  const EncoderParams document = load_params(a.model);
  const auto passages = io::read_passages(a.passages);
  if (passages.empty()) throw DataError("no passages");
  DocumentIndex index = build_index(document, passages, config.count("encoder.max_passage_tokens"));
  const std::size_t centroids = config.count("index.centroids");
  if (centroids > 0) index = index.with_ivf(centroids, config.seed("index.seed"));
  ensure_parent(a.out);
  save_index(index, a.out);

  io::Manifest m("index");
  m.set_config(config);
  if (centroids > 0) m.add_seed("index", config.seed("index.seed"));
  m.add_input("document", a.model);
  m.add_input("passages", a.passages);
  m.add_output("index", a.out);
  m.set_wall_clock(seconds_since(start));
  m.write_beside(a.out);
  print_summary({{"command", "index"},
                 {"documents", index.size()},
                 {"centroids", centroids},
                 {"checksum", binary::file_checksum(a.out)}});
  return 0;
}

struct AlignArgs {
  ConfigFlags config;
  std::string model, queries, noised, index, document, out;
};

int run_align(const AlignArgs& a) {
  const auto start = Clock::now();
  const io::RunConfig config = a.config.load();
  const TrainConfig align = config.align_config();
  // The index is only read: its dimension is checked against the model and
  // its checksum is taken before and after alignment.
  const std::string index_before = binary::file_checksum(a.index);
  const std::string document_before =
      a.document.empty() ? std::string() : binary::file_checksum(a.document);
  const EncoderParams query = load_params(a.model);
  if (load_index(a.index).dim() != query.embedding_dim()) {
    throw DataError("index dimension does not match the query encoder");
  }
  const auto queries = io::read_queries(a.queries);
  if (queries.empty()) throw DataError("no queries");
  const AlignResult result = align_capot(query, queries, io::read_noised(a.noised), align);
  ensure_parent(a.out);
  save_params(result.query, a.out);
  const std::string index_after = binary::file_checksum(a.index);
  const std::string document_after =
      a.document.empty() ? std::string() : binary::file_checksum(a.document);
  if (index_after != index_before || document_after != document_before) {
    throw DataError("frozen index or document checkpoint changed during alignment");
  }

  io::Manifest m("align");
  m.set_config(config);
  m.add_seed("align", align.seed);
  m.add_input("query", a.model);
  m.add_input("queries", a.queries);
  m.add_input("noised", a.noised);
  m.add_input("index", a.index);
  if (!a.document.empty()) m.add_input("document", a.document);
  m.add_output("aligned_query", a.out);
  m.add_field("index_checksum_before", index_before);
  m.add_field("index_checksum_after", index_after);
  m.add_number("triples_per_epoch", static_cast<double>(result.triples_per_epoch));
  m.set_wall_clock(seconds_since(start));
  m.write_beside(a.out);
  json summary = {{"command", "align"},
                  {"index_checksum_before", index_before},
                  {"index_checksum_after", index_after},
                  {"index_unchanged", true}};
  if (!a.document.empty()) {
    summary["document_checksum_before"] = document_before;
    summary["document_checksum_after"] = document_after;
  }
  json losses = json::array();
  for (const LossBreakdown& l : result.epoch_loss) losses.push_back(l.total);
  summary["epoch_loss"] = losses;
  print_summary(summary);
  return 0;
}

// Query texts of one noise type, listed under their anchor ids.
std::map<std::string, std::vector<Query>> noisy_by_type(const std::vector<NoisedQuery>& noised) {
  std::map<std::string, std::vector<Query>> out;
  for (const NoisedQuery& nq : noised) {
    out[std::string(to_string(nq.noise_type))].push_back({nq.anchor_id, nq.text});
  }
  return out;
}

io::RankedRun rank(const EncoderParams& query, const DocumentIndex& index,
                   const std::vector<Query>& queries, const std::vector<NoisedQuery>& noised,
                   std::size_t k, std::size_t nprobe, std::size_t max_tokens) {
  auto search = [&](const std::vector<Query>& qs) {
    if (nprobe == 0) return search_queries(query, index, qs, k, max_tokens);
    ResultsById out;
    for (const Query& q : qs) {
      out[q.id] = index.search_ivf(embed(query, featurize(q.text, query.num_buckets(), max_tokens)),
                                   k, nprobe);
    }
    return out;
  };
  io::RankedRun run;
  run.clean = search(queries);
  for (const auto& [type, qs] : noisy_by_type(noised)) {
    std::set<std::string> ids;
    for (const Query& q : qs) {
      if (!ids.insert(q.id).second) {
        throw DataError("noised file has more than one " + type + " record for query '" + q.id +
                        "'");
      }
    }
    run.noisy[type] = search(qs);
  }
  return run;
}

struct SearchArgs {
  ConfigFlags config;
  std::string model, index, queries, noised, out;
  std::optional<std::size_t> k;
};

int run_search(const SearchArgs& a) {
  const auto start = Clock::now();
  io::RunConfig config = a.config.load();
  if (a.k) config.set("search.k", std::to_string(*a.k));
  const auto queries = io::read_queries(a.queries);
  if (queries.empty()) throw DataError("no queries");
  const std::vector<NoisedQuery> noised =
      a.noised.empty() ? std::vector<NoisedQuery>{} : io::read_noised(a.noised);
  const io::RankedRun run =
      rank(load_params(a.model), load_index(a.index), queries, noised, config.count("search.k"),
           config.count("search.nprobe"), config.count("encoder.max_query_tokens"));
  io::write_ranked(a.out, run);

  io::Manifest m("search");
  m.set_config(config);
  m.add_input("query", a.model);
  m.add_input("index", a.index);
  m.add_input("queries", a.queries);
  if (!a.noised.empty()) m.add_input("noised", a.noised);
  m.add_output("ranked", a.out);
  m.set_wall_clock(seconds_since(start));
  m.write_beside(a.out);
  print_summary({{"command", "search"}, {"queries", queries.size()}, {"out", a.out}});
  return 0;
}

struct EvalArgs {
  ConfigFlags config;
  std::string model, index, queries, noised, qrels, ranked, out, json_out, regime;
};

int run_eval(const EvalArgs& a) {
  const auto start = Clock::now();
  const io::RunConfig config = a.config.load();
  const std::vector<std::size_t> depths = config.depths();
  const Qrels qrels = io::read_qrels(a.qrels);
  io::Manifest m("eval");
  io::RankedRun run;
  if (!a.ranked.empty()) {
    run = io::read_ranked(a.ranked);
    m.add_input("ranked", a.ranked);
  } else {
    if (a.model.empty() || a.index.empty() || a.queries.empty()) {
      throw UsageError("eval needs --ranked, or --model, --index and --queries");
    }
    const auto queries = io::read_queries(a.queries);
    if (queries.empty()) throw DataError("no queries");
    const std::vector<NoisedQuery> noised =
        a.noised.empty() ? std::vector<NoisedQuery>{} : io::read_noised(a.noised);
    run = rank(load_params(a.model), load_index(a.index), queries, noised, depths.back(),
               config.count("search.nprobe"), config.count("encoder.max_query_tokens"));
    m.add_input("query", a.model);
    m.add_input("index", a.index);
    m.add_input("queries", a.queries);
    if (!a.noised.empty()) m.add_input("noised", a.noised);
  }
  if (run.clean.empty()) throw DataError("no queries");
  EvalReport report = evaluate_runs(run.clean, run.noisy, qrels, depths);
  report.regime = a.regime;
  report.seed = config.seed("noise.seed");
  report.dataset_hash = binary::file_checksum(a.qrels);
  io::write_text(a.out, report_to_csv(report));
  if (!a.json_out.empty()) io::write_text(a.json_out, report_to_json(report));

  m.set_config(config);
  m.add_input("qrels", a.qrels);
  m.add_output("report", a.out);
  m.add_number("mrr_at_10", mrr_at_k(run.clean, qrels, 10));
  m.set_wall_clock(seconds_since(start));
  m.write_beside(a.out);
  json cells = json::object();
  for (const ReportRow& row : report.rows) {
    for (const auto& [k, cell] : row.cells) {
      cells[row.name][std::to_string(k)] = {{"accuracy", cell.accuracy},
                                            {"relative_loss", cell.relative_loss}};
    }
  }
  print_summary({{"command", "eval"}, {"regime", a.regime}, {"report", cells}});
  return 0;
}

struct CompareArgs {
  std::vector<std::string> reports;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  std::vector<EvalReport> reports;
  for (const std::string& path : a.reports) reports.push_back(load_report(path));
  const ComparisonTable table = compare_runs(reports);
  io::write_text(a.out, comparison_to_csv(table));
  io::Manifest m("compare");
  for (const std::string& path : a.reports) m.add_input("report", path);
  m.add_output("comparison", a.out);
  m.write_beside(a.out);
  print_summary({{"command", "compare"}, {"regimes", table.regimes}, {"out", a.out}});
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Noise-robust dense retrieval toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth.config.attach(synth_cmd);
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")->required();

  NoiseArgs noise;
  CLI::App* noise_cmd = app.add_subcommand("noise", "Write noised variants of queries");
  noise.config.attach(noise_cmd);
  noise_cmd->add_option("--queries", noise.queries, "queries JSONL or TSV")->required();
  noise_cmd->add_option("--out", noise.out, "noised JSONL")->required();
  noise_cmd->add_option("--types", noise.types, "noise types, e.g. rcs kcs cd");
  noise_cmd->add_option("--seed", noise.seed, "master noise seed");
  noise_cmd->add_option("--synonyms", noise.synonyms, "synonym TSV");
  noise_cmd->add_option("--lemma-exceptions", noise.lemma_exceptions, "lemma exceptions TSV");
  noise_cmd->add_option("--lemma-rules", noise.lemma_rules, "lemma suffix rules TSV");
  noise_cmd->add_option("--keyboard", noise.keyboard, "keyboard layout TSV");
  noise_cmd->add_option("--determiners", noise.determiners, "determiner list");
  noise_cmd->add_option("--stopwords", noise.stopwords, "stopword list");
  noise_cmd->add_option("--backtranslation", noise.backtranslation, "round-trip table TSV");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a query and document encoder");
  train.config.attach(train_cmd);
  train_cmd->add_option("--queries", train.queries, "training queries")->required();
  train_cmd->add_option("--passages", train.passages, "passages")->required();
  train_cmd->add_option("--qrels", train.qrels, "qrels TSV")->required();
  train_cmd->add_option("--regime", train.regime, "baseline, da or pt");
  train_cmd->add_option("--noised", train.noised, "noised training queries (da)");
  train_cmd->add_option("--external-queries", train.external_queries, "alignment queries (pt)");
  train_cmd->add_option("--external-noised", train.external_noised, "their noised variants (pt)");
  train_cmd->add_option("--out-dir", train.out_dir, "checkpoint directory")->required();

  IndexArgs index;
  CLI::App* index_cmd = app.add_subcommand("index", "Embed passages into an index file");
  index.config.attach(index_cmd);
  index_cmd->add_option("--model", index.model, "document encoder")->required();
  index_cmd->add_option("--passages", index.passages, "passages")->required();
  index_cmd->add_option("--out", index.out, "index file")->required();
  index_cmd->add_option("--centroids", index.centroids, "IVF centroids (0 for exact only)");

  AlignArgs align;
  CLI::App* align_cmd = app.add_subcommand("align", "Align the query encoder to noised queries");
  align.config.attach(align_cmd);
  align_cmd->add_option("--model", align.model, "query encoder")->required();
  align_cmd->add_option("--queries", align.queries, "clean queries")->required();
  align_cmd->add_option("--noised", align.noised, "noised queries")->required();
  align_cmd->add_option("--index", align.index, "frozen index file, read only")->required();
  align_cmd->add_option("--document", align.document, "document encoder to verify unchanged");
  align_cmd->add_option("--out", align.out, "aligned query encoder")->required();

  SearchArgs search;
  CLI::App* search_cmd = app.add_subcommand("search", "Rank passages for queries");
  search.config.attach(search_cmd);
  search_cmd->add_option("--model", search.model, "query encoder")->required();
  search_cmd->add_option("--index", search.index, "index file")->required();
  search_cmd->add_option("--queries", search.queries, "queries")->required();
  search_cmd->add_option("--noised", search.noised, "noised queries");
  search_cmd->add_option("-k,--k", search.k, "results per query");
  search_cmd->add_option("--out", search.out, "ranked TSV")->required();

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Write a degradation report");
  eval.config.attach(eval_cmd);
  eval_cmd->add_option("--model", eval.model, "query encoder");
  eval_cmd->add_option("--index", eval.index, "index file");
  eval_cmd->add_option("--queries", eval.queries, "clean queries");
  eval_cmd->add_option("--noised", eval.noised, "noised queries");
  eval_cmd->add_option("--ranked", eval.ranked, "ranked TSV instead of searching");
  eval_cmd->add_option("--qrels", eval.qrels, "qrels TSV")->required();
  eval_cmd->add_option("--regime", eval.regime, "label stored in the report")
      ->default_val("regular");
  eval_cmd->add_option("--out", eval.out, "report CSV")->required();
  eval_cmd->add_option("--json", eval.json_out, "full-precision report JSON");

  CompareArgs compare;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Tabulate reports side by side");
  compare_cmd->add_option("--reports", compare.reports, "report CSV or JSON files, reference first")
      ->required();
  compare_cmd->add_option("--out", compare.out, "comparison CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, "usage", e.what());
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (noise_cmd->parsed()) return run_noise(noise);
    if (train_cmd->parsed()) return run_train(train);
    if (index_cmd->parsed()) return run_index(index);
    if (align_cmd->parsed()) return run_align(align);
    if (search_cmd->parsed()) return run_search(search);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (compare_cmd->parsed()) return run_compare(compare);
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const FrozenParamsError& e) {
    return fail(kExitUsage, "usage", e.what());
  } catch (const BackendError& e) {
    return fail(kExitBackend, "backend", e.what());
  } catch (const DataError& e) {
    return fail(kExitData, "data", e.what());
  } catch (const std::exception& e) {
    return fail(kExitData, "data", e.what());
  }
  return fail(kExitUsage, "usage", "no subcommand");
}

}  // namespace
}  // namespace capot

int main(int argc, char** argv) { return capot::run(argc, argv); }
