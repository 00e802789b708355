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

#ifndef CAPOT_IO_HPP_
#define CAPOT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "capot/evaluation.hpp"
#include "capot/index.hpp"
#include "capot/noise.hpp"
#include "capot/synthetic.hpp"
#include "capot/training.hpp"

namespace capot::io {

// Queries and passages: JSONL objects {"id", "text"}; files ending in .tsv
// are read as id TAB text instead. Writers always emit JSONL.
std::vector<Query> read_queries(const std::filesystem::path& path);
void write_queries(const std::filesystem::path& path, const std::vector<Query>& queries);
std::vector<Passage> read_passages(const std::filesystem::path& path);
void write_passages(const std::filesystem::path& path, const std::vector<Passage>& passages);

// query_id TAB passage_id, one pair per line.
Qrels read_qrels(const std::filesystem::path& path);
void write_qrels(const std::filesystem::path& path, const Qrels& qrels);

// JSONL with fields anchor_id, noise_type, text, seed in that order.
std::vector<NoisedQuery> read_noised(const std::filesystem::path& path);
void write_noised(const std::filesystem::path& path, const std::vector<NoisedQuery>& noised);
std::string noised_to_jsonl(const std::vector<NoisedQuery>& noised);

// Ranked TSV: query_id, noise_type, rank, passage_id, score. Clean queries
// carry noise type "none"; noised queries are listed under their anchor id.
struct RankedRun {
  ResultsById clean;
  std::map<std::string, ResultsById> noisy;  // by noise type name
};
void write_ranked(const std::filesystem::path& path, const RankedRun& run);
RankedRun read_ranked(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, std::string_view contents);
std::string read_text(const std::filesystem::path& path);

// Flat key=value configuration. Every key has a default; unknown keys are
// rejected. Values are validated when converted into module configs.
class RunConfig {
 public:
  RunConfig();

  // Lines of key=value; blank lines and lines starting with '#' are skipped.
  static RunConfig from_text(std::string_view text);
  static RunConfig from_file(const std::filesystem::path& path);

  void set(std::string_view key, std::string_view value);
  // Accepts "key=value".
  void set_assignment(std::string_view assignment);
  const std::string& get(std::string_view key) const;
  bool is_set_explicitly(std::string_view key) const;

  double number(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  std::uint64_t seed(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::vector<std::string> list(std::string_view key) const;

  NoiseConfig noise_config() const;
  LossWeights loss_weights() const;
  TrainConfig train_config() const;
  TrainConfig align_config() const;
  SyntheticOptions synthetic_options() const;
  std::vector<std::size_t> depths() const;

  static const std::vector<std::string>& keys();
  // Sorted key=value lines.
  std::string canonical() const;
  std::string hash() const;
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, bool, std::less<>> explicit_;
};

// Provenance written next to an artifact as <artifact>.manifest.json. The
// artifact bytes depend only on the recorded inputs, config and seeds.
class Manifest {
 public:
  explicit Manifest(std::string command);

  void set_config(const RunConfig& config);
  void add_seed(const std::string& name, std::uint64_t value);
  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_output(const std::string& role, const std::filesystem::path& path);
  void add_field(const std::string& name, const std::string& value);
  void add_number(const std::string& name, double value);
  void set_wall_clock(double seconds) { wall_clock_seconds_ = seconds; }

  std::string to_json() const;
  // Writes <artifact>.manifest.json and returns its path.
  std::filesystem::path write_beside(const std::filesystem::path& artifact) const;

 private:
  struct FileEntry {
    std::string role;
    std::string path;
    std::string checksum;
  };
  std::string command_;
  std::string config_hash_;
  std::map<std::string, std::string, std::less<>> config_;
  std::vector<std::pair<std::string, std::uint64_t>> seeds_;
  std::vector<FileEntry> inputs_, outputs_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<std::pair<std::string, double>> numbers_;
  double wall_clock_seconds_ = -1;
};

std::filesystem::path manifest_path(const std::filesystem::path& artifact);

}  // namespace capot::io

#endif  // CAPOT_IO_HPP_
