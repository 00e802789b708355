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

#ifndef CAPOT_REWRITE_HPP_
#define CAPOT_REWRITE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace capot {

class TextResources;

enum class RewriteMode { kBackTranslation, kParaphrase };

std::string_view to_string(RewriteMode mode);
std::optional<RewriteMode> parse_rewrite_mode(std::string_view name);

struct RewriteRequest {
  std::string text;
  RewriteMode mode = RewriteMode::kBackTranslation;
};

struct RewriteResponse {
  std::string text;
  std::string backend;
};

class RewriteBackend {
 public:
  virtual ~RewriteBackend() = default;
  // Throws BackendError when the rewrite cannot be produced.
  virtual RewriteResponse rewrite(const RewriteRequest& request) = 0;
  virtual std::string label() const = 0;
};

// Offline, deterministic stand-in for translation and paraphrase models.
// Back-translation substitutes words through a closed round-trip table and
// restores the original casing. Paraphrase replaces each word that has
// synonyms with its first synonym and normalizes indefinite articles to
// "the".
class StubRewriteBackend : public RewriteBackend {
 public:
  explicit StubRewriteBackend(const TextResources& resources);
  RewriteResponse rewrite(const RewriteRequest& request) override;
  std::string label() const override { return "stub"; }

 private:
  const TextResources& resources_;
};

// Append-only JSONL store of rewrite responses keyed by (mode, text). Writes
// hold an exclusive lock on the file.
class RewriteCache {
 public:
  explicit RewriteCache(std::filesystem::path file);

  std::optional<RewriteResponse> find(const RewriteRequest& request) const;
  void store(const RewriteRequest& request, const RewriteResponse& response);
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, RewriteResponse> entries_;
};

// POSTs {"text", "mode"} as JSON to an endpoint and expects {"text"} back.
// Responses are cached so reruns replay without the network.
class HttpRewriteBackend : public RewriteBackend {
 public:
  // url: "http://host:port/path". cache_file may be empty to disable caching.
  HttpRewriteBackend(std::string url, std::filesystem::path cache_file,
                     double timeout_seconds = 30.0);
  RewriteResponse rewrite(const RewriteRequest& request) override;
  std::string label() const override { return "http:" + url_; }

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string path_;
  double timeout_seconds_;
  std::unique_ptr<RewriteCache> cache_;
};

// "stub" or an http:// URL. When url is empty the CAPOT_REWRITE_URL
// environment variable is consulted, then the stub is used. The cache file
// defaults to $CAPOT_REWRITE_CACHE or <cache_dir>/rewrite_cache.jsonl.
std::shared_ptr<RewriteBackend> make_rewrite_backend(
    std::string_view spec, const TextResources& resources,
    const std::filesystem::path& cache_dir = {});

}  // namespace capot

#endif  // CAPOT_REWRITE_HPP_
