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

#include "capot/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "capot/binary_io.hpp"
#include "capot/errors.hpp"
#include "capot/random.hpp"
#include "capot/text.hpp"
#include "json.hpp"

namespace capot::io {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line + 1);
}

json parse_json_line(const fs::path& path, std::size_t i, const std::string& line) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw DataError(where(path, i) + ": expected a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw DataError(where(path, i) + ": malformed JSON");
  }
}

std::string string_field(const json& j, const char* name, const fs::path& path,
                         std::size_t i) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    throw DataError(where(path, i) + ": missing string field '" + name + "'");
  }
  return it->get<std::string>();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

template <typename Record>
std::vector<Record> read_id_text(const fs::path& path) {
  const bool tsv = path.extension() == ".tsv";
  std::vector<Record> out;
  std::set<std::string> seen;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    Record r;
    if (tsv) {
      const auto fields = split_tabs(lines[i]);
      if (fields.size() != 2) throw DataError(where(path, i) + ": expected id TAB text");
      r.id = fields[0];
      r.text = fields[1];
    } else {
      const json j = parse_json_line(path, i, lines[i]);
      r.id = string_field(j, "id", path, i);
      r.text = string_field(j, "text", path, i);
    }
    if (r.id.empty()) throw DataError(where(path, i) + ": empty id");
    if (!seen.insert(r.id).second) throw DataError(where(path, i) + ": duplicate id '" + r.id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

template <typename Record>
void write_id_text(const fs::path& path, const std::vector<Record>& records) {
  std::string out;
  for (const Record& r : records) {
    json j;
    j["id"] = r.id;
    j["text"] = r.text;
    out += j.dump() + "\n";
  }
  write_text(path, out);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const std::vector<std::pair<std::string, std::string>>& default_values() {
  static const auto values = [] {
    std::vector<std::string> offline;
    for (NoiseType t : kOfflineNoiseTypes) offline.emplace_back(to_string(t));
    const LossWeights w;
    const TrainConfig t;
    const SyntheticOptions s;
    const PlacementProbabilities p;
    return std::vector<std::pair<std::string, std::string>>{
        {"seed", "0"},
        {"noise.types", join(offline, ',')},
        {"noise.seed", "auto"},
        {"noise.max_stem_lemma_words", "5"},
        {"noise.placement_left", format_double(p.left)},
        {"noise.placement_right", format_double(p.right)},
        {"noise.placement_at", format_double(p.at)},
        {"noise.rewrite_backend", ""},
        {"paths.cache_dir", ""},
        {"encoder.dim", std::to_string(kDefaultEmbeddingDim)},
        {"encoder.buckets", std::to_string(kDefaultNumBuckets)},
        {"encoder.max_query_tokens", std::to_string(kDefaultMaxTokens)},
        {"encoder.max_passage_tokens", std::to_string(kDefaultMaxPassageTokens)},
        {"train.regime", std::string(to_string(t.regime))},
        {"train.batch_size", std::to_string(t.batch_size)},
        {"train.learning_rate", format_double(t.learning_rate)},
        {"train.epochs", std::to_string(t.epochs)},
        {"train.negatives", std::to_string(t.negatives_per_positive)},
        {"train.temperature", format_double(t.temperature)},
        {"train.shared_init", "false"},
        {"train.seed", "auto"},
        {"align.batch_size", "32"},
        {"align.learning_rate", format_double(kDefaultAlignLearningRate)},
        {"align.epochs", std::to_string(kDefaultAlignEpochs)},
        {"align.seed", "auto"},
        {"loss.tau_positive", format_double(w.tau_positive)},
        {"loss.tau_negative", format_double(w.tau_negative)},
        {"loss.tau_anchor", format_double(w.tau_anchor)},
        {"loss.tau_ranking", format_double(w.tau_ranking)},
        {"loss.tau_contrastive", format_double(w.tau_contrastive)},
        {"loss.eps_contrastive", format_double(w.eps_contrastive)},
        {"loss.eps_anchor", format_double(w.eps_anchor)},
        {"loss.eps_ranking", format_double(w.eps_ranking)},
        {"index.centroids", "0"},
        {"index.seed", "auto"},
        {"search.k", "200"},
        {"search.nprobe", "0"},
        {"eval.depths", "20,100,200"},
        {"synth.num_queries", std::to_string(s.num_queries)},
        {"synth.vocab_size", std::to_string(s.vocab_size)},
        {"synth.seed", std::to_string(s.seed)},
    };
  }();
  return values;
}

}  // namespace

std::vector<Query> read_queries(const fs::path& path) { return read_id_text<Query>(path); }
void write_queries(const fs::path& path, const std::vector<Query>& queries) {
  write_id_text(path, queries);
}
std::vector<Passage> read_passages(const fs::path& path) {
  return read_id_text<Passage>(path);
}
void write_passages(const fs::path& path, const std::vector<Passage>& passages) {
  write_id_text(path, passages);
}

Qrels read_qrels(const fs::path& path) {
  Qrels qrels;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(where(path, i) + ": expected query_id TAB passage_id");
    }
    qrels[fields[0]].insert(fields[1]);
  }
  return qrels;
}

void write_qrels(const fs::path& path, const Qrels& qrels) {
  std::string out;
  for (const auto& [q, ps] : qrels) {
    for (const std::string& p : ps) out += q + "\t" + p + "\n";
  }
  write_text(path, out);
}

std::string noised_to_jsonl(const std::vector<NoisedQuery>& noised) {
  std::string out;
  for (const NoisedQuery& nq : noised) {
    json j;
    j["anchor_id"] = nq.anchor_id;
    j["noise_type"] = to_string(nq.noise_type);
    j["text"] = nq.text;
    j["seed"] = nq.seed;
    out += j.dump() + "\n";
  }
  return out;
}

void write_noised(const fs::path& path, const std::vector<NoisedQuery>& noised) {
  write_text(path, noised_to_jsonl(noised));
}

std::vector<NoisedQuery> read_noised(const fs::path& path) {
  std::vector<NoisedQuery> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    const json j = parse_json_line(path, i, lines[i]);
    NoisedQuery nq;
    nq.anchor_id = string_field(j, "anchor_id", path, i);
    const std::string type = string_field(j, "noise_type", path, i);
    const auto parsed = parse_noise_type(type);
    if (!parsed) throw DataError(where(path, i) + ": unknown noise type '" + type + "'");
    nq.noise_type = *parsed;
    nq.text = string_field(j, "text", path, i);
    auto seed = j.find("seed");
    if (seed == j.end() || !seed->is_number_unsigned()) {
      throw DataError(where(path, i) + ": missing unsigned field 'seed'");
    }
    nq.seed = seed->get<std::uint64_t>();
    out.push_back(std::move(nq));
  }
  return out;
}

void write_ranked(const fs::path& path, const RankedRun& run) {
  std::string out = "query_id\tnoise_type\trank\tpassage_id\tscore\n";
  auto emit = [&](std::string_view type, const ResultsById& results) {
    for (const auto& [id, hits] : results) {
      for (std::size_t r = 0; r < hits.size(); ++r) {
        out += id + "\t" + std::string(type) + "\t" + std::to_string(r + 1) + "\t" + hits[r].id +
               "\t" + format_double(hits[r].score) + "\n";
      }
    }
  };
  emit(kCleanRow, run.clean);
  for (NoiseType t : kAllNoiseTypes) {
    auto it = run.noisy.find(std::string(to_string(t)));
    if (it != run.noisy.end()) emit(it->first, it->second);
  }
  write_text(path, out);
}

RankedRun read_ranked(const fs::path& path) {
  RankedRun run;
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "query_id\tnoise_type\trank\tpassage_id\tscore") {
    throw DataError(path.string() + ": missing ranked TSV header");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_tabs(lines[i]);
    if (f.size() != 5) throw DataError(where(path, i) + ": expected 5 columns");
    ResultsById& target = f[1] == kCleanRow ? run.clean : run.noisy[f[1]];
    if (f[1] != kCleanRow && !parse_noise_type(f[1])) {
      throw DataError(where(path, i) + ": unknown noise type '" + f[1] + "'");
    }
    SearchResult& hits = target[f[0]];
    std::size_t rank = 0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), rank);
    if (ec != std::errc() || p != f[2].data() + f[2].size() || rank != hits.size() + 1) {
      throw DataError(where(path, i) + ": ranks must run 1, 2, ... per query");
    }
    char* end = nullptr;
    const double score = std::strtod(f[4].c_str(), &end);
    if (end != f[4].c_str() + f[4].size()) throw DataError(where(path, i) + ": bad score");
    hits.push_back({f[3], score, 0});
  }
  return run;
}

void write_text(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : default_values()) values_[k] = v;
}

const std::vector<std::string>& RunConfig::keys() {
  static const auto keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : default_values()) out.push_back(k);
    return out;
  }();
  return keys;
}

RunConfig RunConfig::from_text(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    c.set_assignment(t);
  }
  return c;
}

RunConfig RunConfig::from_file(const fs::path& path) { return from_text(read_text(path)); }

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  it->second = text::trim(value);
  explicit_[std::string(key)] = true;
}

void RunConfig::set_assignment(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw UsageError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(text::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

bool RunConfig::is_set_explicitly(std::string_view key) const {
  get(key);
  return explicit_.count(key) > 0;
}

double RunConfig::number(std::string_view key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
    throw UsageError(std::string(key) + " must be a finite number, got '" + v + "'");
  }
  return x;
}

std::size_t RunConfig::count(std::string_view key) const {
  const std::string& v = get(key);
  std::size_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw UsageError(std::string(key) + " must be a nonnegative integer, got '" + v + "'");
  }
  return x;
}

std::uint64_t RunConfig::seed(std::string_view key) const {
  if (get(key) == "auto") {
    const std::string_view module = key.substr(0, key.find('.'));
    return derive_seed(count("seed"), module);
  }
  return count(key);
}

bool RunConfig::flag(std::string_view key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError(std::string(key) + " must be true or false, got '" + v + "'");
}

std::vector<std::string> RunConfig::list(std::string_view key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

NoiseConfig RunConfig::noise_config() const {
  NoiseConfig c;
  c.enabled_types.clear();
  for (const std::string& name : list("noise.types")) {
    const auto t = parse_noise_type(name);
    if (!t) throw UsageError("unknown noise type '" + name + "'");
    c.enabled_types.push_back(*t);
  }
  c.master_seed = seed("noise.seed");
  c.max_stem_lemma_words = count("noise.max_stem_lemma_words");
  c.placement = {number("noise.placement_left"), number("noise.placement_right"),
                 number("noise.placement_at")};
  c.validate();
  return c;
}

LossWeights RunConfig::loss_weights() const {
  LossWeights w;
  w.tau_positive = number("loss.tau_positive");
  w.tau_negative = number("loss.tau_negative");
  w.tau_anchor = number("loss.tau_anchor");
  w.tau_ranking = number("loss.tau_ranking");
  w.tau_contrastive = number("loss.tau_contrastive");
  w.eps_contrastive = number("loss.eps_contrastive");
  w.eps_anchor = number("loss.eps_anchor");
  w.eps_ranking = number("loss.eps_ranking");
  w.validate();
  return w;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig c;
  const auto regime = parse_regime(get("train.regime"));
  if (!regime) throw UsageError("unknown regime '" + get("train.regime") + "'");
  c.regime = *regime;
  c.batch_size = count("train.batch_size");
  c.learning_rate = number("train.learning_rate");
  c.epochs = count("train.epochs");
  c.negatives_per_positive = count("train.negatives");
  c.seed = seed("train.seed");
  c.temperature = number("train.temperature");
  c.embedding_dim = count("encoder.dim");
  c.num_buckets = count("encoder.buckets");
  c.max_tokens = count("encoder.max_query_tokens");
  c.max_passage_tokens = count("encoder.max_passage_tokens");
  c.shared_init = flag("train.shared_init");
  c.loss_weights = loss_weights();
  c.validate();
  return c;
}

TrainConfig RunConfig::align_config() const {
  TrainConfig c = train_config();
  c.regime = Regime::kCapot;
  c.batch_size = count("align.batch_size");
  c.learning_rate = number("align.learning_rate");
  c.epochs = count("align.epochs");
  c.seed = seed("align.seed");
  c.validate();
  return c;
}

SyntheticOptions RunConfig::synthetic_options() const {
  SyntheticOptions o;
  o.num_queries = count("synth.num_queries");
  o.vocab_size = count("synth.vocab_size");
  o.seed = seed("synth.seed");
  return o;
}

std::vector<std::size_t> RunConfig::depths() const {
  std::vector<std::size_t> out;
  for (const std::string& item : list("eval.depths")) {
    std::size_t k = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc() || p != item.data() + item.size() || k == 0) {
      throw UsageError("eval.depths must be positive integers, got '" + item + "'");
    }
    out.push_back(k);
  }
  if (out.empty()) throw UsageError("eval.depths is empty");
  if (!std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw UsageError("eval.depths must be strictly increasing");
  }
  return out;
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = fnv1a64(canonical());
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
  return out;
}

Manifest::Manifest(std::string command) : command_(std::move(command)) {}

void Manifest::set_config(const RunConfig& config) {
  config_hash_ = config.hash();
  config_.clear();
  for (const auto& [k, v] : config.values()) config_[k] = v;
}

void Manifest::add_seed(const std::string& name, std::uint64_t value) {
  seeds_.emplace_back(name, value);
}

void Manifest::add_input(const std::string& role, const fs::path& path) {
  inputs_.push_back({role, path.string(), binary::file_checksum(path)});
}

void Manifest::add_output(const std::string& role, const fs::path& path) {
  outputs_.push_back({role, path.string(), binary::file_checksum(path)});
}

void Manifest::add_field(const std::string& name, const std::string& value) {
  fields_.emplace_back(name, value);
}

void Manifest::add_number(const std::string& name, double value) {
  numbers_.emplace_back(name, value);
}

std::string Manifest::to_json() const {
  json j;
  j["command"] = command_;
  j["config_hash"] = config_hash_;
  json cfg = json::object();
  for (const auto& [k, v] : config_) cfg[k] = v;
  j["config"] = cfg;
  json seeds = json::object();
  for (const auto& [k, v] : seeds_) seeds[k] = v;
  j["seeds"] = seeds;
  auto files = [](const std::vector<FileEntry>& entries) {
    json arr = json::array();
    for (const FileEntry& e : entries) {
      arr.push_back({{"role", e.role}, {"path", e.path}, {"checksum", e.checksum}});
    }
    return arr;
  };
  j["inputs"] = files(inputs_);
  j["outputs"] = files(outputs_);
  for (const auto& [k, v] : fields_) j[k] = v;
  for (const auto& [k, v] : numbers_) j[k] = v;
  if (wall_clock_seconds_ >= 0) j["wall_clock_seconds"] = wall_clock_seconds_;
  return j.dump(2) + "\n";
}

fs::path manifest_path(const fs::path& artifact) {
  return fs::path(artifact.string() + ".manifest.json");
}

fs::path Manifest::write_beside(const fs::path& artifact) const {
  const fs::path path = manifest_path(artifact);
  write_text(path, to_json());
  return path;
}

}  // namespace capot::io
