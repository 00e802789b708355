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

#include <filesystem>

#include "capot/binary_io.hpp"
#include "capot/errors.hpp"
#include "capot/io.hpp"
#include "doctest.h"
#include "json.hpp"

namespace capot {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "capot_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST_CASE("queries and passages round trip through JSONL") {
  const std::vector<Query> queries = {{"q1", "who sang \"waiting\"\tab"}, {"q2", "café naïve"}};
  io::write_queries(scratch("q.jsonl"), queries);
  const auto back = io::read_queries(scratch("q.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == queries[0].text);
  CHECK(back[1].id == "q2");
  CHECK(io::read_text(scratch("q.jsonl")).rfind("{\"id\":\"q1\",\"text\":", 0) == 0);

  const std::vector<Passage> passages = {{"p1", "a b c"}};
  io::write_passages(scratch("p.jsonl"), passages);
  CHECK(io::read_passages(scratch("p.jsonl"))[0].text == "a b c");
}

TEST_CASE("TSV queries and malformed inputs") {
  io::write_text(scratch("q.tsv"), "q1\thello world\r\n\nq2\tbye\n");
  const auto q = io::read_queries(scratch("q.tsv"));
  REQUIRE(q.size() == 2);
  CHECK(q[0].text == "hello world");
  io::write_text(scratch("bad.tsv"), "q1 no tab\n");
  CHECK_THROWS_AS(io::read_queries(scratch("bad.tsv")), DataError);
  io::write_text(scratch("bad.jsonl"), "{\"id\": \"q1\"}\n");
  CHECK_THROWS_WITH_AS(io::read_queries(scratch("bad.jsonl")),
                       doctest::Contains("missing string field 'text'"), DataError);
  io::write_text(scratch("bad2.jsonl"), "not json\n");
  CHECK_THROWS_AS(io::read_queries(scratch("bad2.jsonl")), DataError);
  io::write_text(scratch("dup.jsonl"), "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
  CHECK_THROWS_WITH_AS(io::read_queries(scratch("dup.jsonl")),
                       doctest::Contains("duplicate id"), DataError);
  CHECK_THROWS_AS(io::read_queries(scratch("missing.jsonl")), DataError);
  io::write_text(scratch("empty.jsonl"), "");
  CHECK(io::read_queries(scratch("empty.jsonl")).empty());
}

TEST_CASE("qrels round trip") {
  Qrels qrels;
  qrels["q1"] = {"p1", "p2"};
  qrels["q2"] = {"p3"};
  io::write_qrels(scratch("qrels.tsv"), qrels);
  CHECK(io::read_text(scratch("qrels.tsv")) == "q1\tp1\nq1\tp2\nq2\tp3\n");
  CHECK(io::read_qrels(scratch("qrels.tsv")) == qrels);
  io::write_text(scratch("bad_qrels.tsv"), "q1\tp1\textra\n");
  CHECK_THROWS_AS(io::read_qrels(scratch("bad_qrels.tsv")), DataError);
}

TEST_CASE("noised records keep their field order") {
  const std::vector<NoisedQuery> noised = {{"q1", NoiseType::kKcs, "hellp", 18446744073709551615ULL},
                                           {"q2", NoiseType::kRw, "b a", 3}};
  const std::string jsonl = io::noised_to_jsonl(noised);
  CHECK(jsonl.substr(0, jsonl.find('\n')) ==
        "{\"anchor_id\":\"q1\",\"noise_type\":\"kcs\",\"text\":\"hellp\",\"seed\":18446744073709551615}");
  io::write_noised(scratch("n.jsonl"), noised);
  const auto back = io::read_noised(scratch("n.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].seed == noised[0].seed);
  CHECK(back[1].noise_type == NoiseType::kRw);
  io::write_text(scratch("bad_n.jsonl"),
                 "{\"anchor_id\":\"q\",\"noise_type\":\"zzz\",\"text\":\"x\",\"seed\":1}\n");
  CHECK_THROWS_AS(io::read_noised(scratch("bad_n.jsonl")), DataError);
}

TEST_CASE("ranked TSV round trip") {
  io::RankedRun run;
  run.clean["q1"] = {{"p1", 0.5, 0}, {"p2", 0.25, 0}};
  run.noisy["cd"]["q1"] = {{"p2", 0.125, 0}};
  io::write_ranked(scratch("r.tsv"), run);
  const auto back = io::read_ranked(scratch("r.tsv"));
  REQUIRE(back.clean.at("q1").size() == 2);
  CHECK(back.clean.at("q1")[1].id == "p2");
  CHECK(back.clean.at("q1")[1].score == 0.25);
  CHECK(back.noisy.at("cd").at("q1")[0].id == "p2");
  io::write_text(scratch("r_bad.tsv"),
                 "query_id\tnoise_type\trank\tpassage_id\tscore\nq1\tnone\t2\tp\t1\n");
  CHECK_THROWS_AS(io::read_ranked(scratch("r_bad.tsv")), DataError);
}

TEST_CASE("run config defaults, overrides and validation") {
  io::RunConfig c;
  CHECK(c.train_config().learning_rate == TrainConfig{}.learning_rate);
  CHECK(c.align_config().learning_rate == kDefaultAlignLearningRate);
  CHECK(c.align_config().epochs == kDefaultAlignEpochs);
  CHECK(c.depths() == kDefaultDepths);
  CHECK(c.noise_config().enabled_types.size() == kOfflineNoiseTypes.size());
  CHECK(c.synthetic_options().seed == 7);
  CHECK_FALSE(c.train_config().shared_init);

  const auto parsed = io::RunConfig::from_text(
      "# comment\n\ntrain.epochs = 3\nloss.tau_anchor=0.5\ntrain.shared_init=true\n"
      "noise.types=rcs, cd\n");
  CHECK(parsed.train_config().epochs == 3);
  CHECK(parsed.train_config().shared_init);
  CHECK(parsed.align_config().loss_weights.tau_anchor == 0.5);
  CHECK(parsed.noise_config().enabled_types ==
        std::vector<NoiseType>{NoiseType::kRcs, NoiseType::kCd});
  CHECK(parsed.is_set_explicitly("train.epochs"));
  CHECK_FALSE(parsed.is_set_explicitly("train.batch_size"));
  CHECK(parsed.hash() != c.hash());
  CHECK(io::RunConfig::from_text(parsed.canonical()).hash() == parsed.hash());

  CHECK_THROWS_WITH_AS(io::RunConfig::from_text("bogus=1"), "unknown config key 'bogus'",
                       UsageError);
  CHECK_THROWS_AS(io::RunConfig::from_text("no equals sign"), UsageError);
  io::RunConfig bad;
  bad.set("train.epochs", "-1");
  CHECK_THROWS_AS(bad.train_config(), UsageError);
  bad = io::RunConfig();
  bad.set("train.learning_rate", "0");
  CHECK_THROWS_AS(bad.train_config(), UsageError);
  bad = io::RunConfig();
  bad.set("loss.eps_ranking", "-0.1");
  CHECK_THROWS_AS(bad.loss_weights(), UsageError);
  bad = io::RunConfig();
  bad.set("noise.types", "rcs,nope");
  CHECK_THROWS_AS(bad.noise_config(), UsageError);
  bad = io::RunConfig();
  bad.set("eval.depths", "100,20");
  CHECK_THROWS_AS(bad.depths(), UsageError);
  bad = io::RunConfig();
  bad.set("train.shared_init", "maybe");
  CHECK_THROWS_AS(bad.train_config(), UsageError);
  bad = io::RunConfig();
  bad.set("train.regime", "capot2");
  CHECK_THROWS_AS(bad.train_config(), UsageError);
}

TEST_CASE("module seeds derive from the master seed unless set") {
  io::RunConfig c;
  const auto noise0 = c.seed("noise.seed");
  CHECK(noise0 != c.seed("train.seed"));
  c.set("seed", "5");
  CHECK(c.seed("noise.seed") != noise0);
  c.set("noise.seed", "42");
  CHECK(c.seed("noise.seed") == 42);
  CHECK(c.noise_config().master_seed == 42);
}

TEST_CASE("manifests record provenance beside the artifact") {
  io::write_text(scratch("artifact.bin"), "abc");
  io::write_text(scratch("input.txt"), "xyz");
  io::Manifest m("train");
  io::RunConfig c;
  m.set_config(c);
  m.add_seed("train", 9);
  m.add_input("queries", scratch("input.txt"));
  m.add_output("model", scratch("artifact.bin"));
  m.add_field("regime", "baseline");
  const fs::path path = m.write_beside(scratch("artifact.bin"));
  CHECK(path == io::manifest_path(scratch("artifact.bin")));
  CHECK(path.filename() == "artifact.bin.manifest.json");
  const auto j = nlohmann::json::parse(io::read_text(path));
  CHECK(j["command"] == "train");
  CHECK(j["config_hash"] == c.hash());
  CHECK(j["seeds"]["train"] == 9);
  CHECK(j["inputs"][0]["checksum"] == binary::file_checksum(scratch("input.txt")));
  CHECK(j["outputs"][0]["role"] == "model");
  CHECK(j["regime"] == "baseline");
  CHECK(j["config"]["train.epochs"] == "50");
  CHECK_FALSE(j.contains("wall_clock_seconds"));
  fs::remove_all(scratch("").parent_path());
}

}  // namespace
}  // namespace capot
