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

#include "capot/rewrite.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <functional>
#include <fstream>

#include "capot/errors.hpp"
#include "capot/text.hpp"
#include "capot/text_resources.hpp"
#include "httplib.h"
#include "json.hpp"

namespace capot {
namespace {

using json = nlohmann::json;

// Holds an exclusive advisory lock for the lifetime of the guard.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& path)
      : fd_(::open(path.c_str(), O_RDWR | O_CREAT, 0644)) {
    if (fd_ < 0) throw BackendError("cannot open cache " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw BackendError("cannot lock cache " + path.string());
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

std::string rewrite_tokens(
    std::string_view input,
    const std::function<std::string(const std::string&)>& replace_core) {
  auto tokens = text::split_whitespace(input);
  for (std::string& tok : tokens) {
    text::TokenParts parts = text::split_token(tok);
    if (parts.core.empty()) continue;
    std::string replacement = replace_core(text::lower(parts.core));
    if (replacement.empty()) continue;
    parts.core = text::match_case(parts.core, replacement);
    tok = parts.joined();
  }
  return text::join(tokens);
}

}  // namespace

std::string_view to_string(RewriteMode mode) {
  return mode == RewriteMode::kBackTranslation ? "bt" : "paraphrase";
}

std::optional<RewriteMode> parse_rewrite_mode(std::string_view name) {
  if (name == "bt") return RewriteMode::kBackTranslation;
  if (name == "paraphrase") return RewriteMode::kParaphrase;
  return std::nullopt;
}

StubRewriteBackend::StubRewriteBackend(const TextResources& resources)
    : resources_(resources) {}

RewriteResponse StubRewriteBackend::rewrite(const RewriteRequest& request) {
  std::string out;
  if (request.mode == RewriteMode::kBackTranslation) {
    const auto& table = resources_.backtranslation();
    out = rewrite_tokens(request.text, [&](const std::string& w) {
      auto it = table.find(w);
      return it == table.end() ? std::string() : it->second;
    });
  } else {
    out = rewrite_tokens(request.text, [&](const std::string& w) {
      if (w == "a" || w == "an") return std::string("the");
      const auto& syns = resources_.synonyms_of(w);
      return syns.empty() ? std::string() : syns.front();
    });
  }
  return RewriteResponse{std::move(out), label()};
}

RewriteCache::RewriteCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) {
    std::filesystem::create_directories(file_.parent_path());
  }
  std::ifstream in(file_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      entries_[{j.at("mode").get<std::string>(), j.at("input").get<std::string>()}] =
          RewriteResponse{j.at("text").get<std::string>(),
                          j.value("backend", std::string())};
    } catch (const json::exception& e) {
      throw DataError("rewrite cache " + file_.string() + " line " +
                      std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::optional<RewriteResponse> RewriteCache::find(
    const RewriteRequest& request) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find({std::string(to_string(request.mode)), request.text});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RewriteCache::store(const RewriteRequest& request,
                         const RewriteResponse& response) {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::pair<std::string, std::string> key{
      std::string(to_string(request.mode)), request.text};
  if (entries_.count(key)) return;
  entries_[key] = response;
  json j;
  j["mode"] = key.first;
  j["input"] = request.text;
  j["text"] = response.text;
  j["backend"] = response.backend;
  FileLock file_lock(file_);
  std::ofstream out(file_, std::ios::app);
  out << j.dump() << '\n';
  if (!out) throw BackendError("cannot write cache " + file_.string());
}

HttpRewriteBackend::HttpRewriteBackend(std::string url,
                                       std::filesystem::path cache_file,
                                       double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {
  constexpr std::string_view kScheme = "http://";
  if (url_.rfind(kScheme, 0) != 0) {
    throw UsageError("rewrite url must start with http://: " + url_);
  }
  std::string rest = url_.substr(kScheme.size());
  const std::size_t slash = rest.find('/');
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  std::string authority = rest.substr(0, slash);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos) {
    try {
      port_ = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("bad port in rewrite url: " + url_);
    }
    authority.resize(colon);
  }
  if (authority.empty()) throw UsageError("missing host in rewrite url");
  host_ = authority;
  if (!cache_file.empty()) cache_ = std::make_unique<RewriteCache>(cache_file);
}

RewriteResponse HttpRewriteBackend::rewrite(const RewriteRequest& request) {
  if (cache_) {
    if (auto hit = cache_->find(request)) return *hit;
  }
  httplib::Client client(host_, port_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs =
      static_cast<time_t>((timeout_seconds_ - double(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  json body;
  body["text"] = request.text;
  body["mode"] = to_string(request.mode);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw BackendError("rewrite request to " + url_ + " failed: " +
                       httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("rewrite request to " + url_ + " returned HTTP " +
                       std::to_string(res->status));
  }
  std::string text_out;
  try {
    text_out = json::parse(res->body).at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError("malformed rewrite response: " + std::string(e.what()));
  }
  if (text::trim(text_out).empty()) {
    throw BackendError("empty rewrite response from " + url_);
  }
  RewriteResponse response{std::move(text_out), label()};
  if (cache_) cache_->store(request, response);
  return response;
}

std::shared_ptr<RewriteBackend> make_rewrite_backend(
    std::string_view spec, const TextResources& resources,
    const std::filesystem::path& cache_dir) {
  std::string choice(spec);
  if (choice.empty()) {
    const char* env = std::getenv("CAPOT_REWRITE_URL");
    choice = env && *env ? env : "stub";
  }
  if (choice == "stub") return std::make_shared<StubRewriteBackend>(resources);
  std::filesystem::path cache;
  if (const char* env = std::getenv("CAPOT_REWRITE_CACHE"); env && *env) {
    cache = env;
  } else if (!cache_dir.empty()) {
    cache = cache_dir / "rewrite_cache.jsonl";
  }
  return std::make_shared<HttpRewriteBackend>(choice, cache);
}

}  // namespace capot
