// Copyright 2026 The Evalscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cctype>
#include <fstream>

#include "evalscope/error.h"
#include "evalscope/http.h"
#include "evalscope/predictor.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kFileScheme = "file://";

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::string url_basename(const std::string& url) {
  std::string path = url.substr(0, url.find_first_of("?#"));
  while (!path.empty() && path.back() == '/') path.pop_back();
  const auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (base.empty() || base == "." || base == "..") base = "asset";
  return base;
}

fs::path url_index_file(const fs::path& root, const std::string& key) {
  return root / ".urls" / sha256_hex(key);
}

}  // namespace

std::string normalize_checksum(const std::string& checksum) {
  std::string c = checksum;
  for (char& ch : c) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (starts_with(c, "sha256:")) c = c.substr(7);
  const bool hex64 = c.size() == 64 && std::all_of(c.begin(), c.end(), [](char ch) {
                       return std::isxdigit(static_cast<unsigned char>(ch));
                     });
  if (!hex64) throw Error(ErrorCode::kInvalidArgument, "malformed sha256 checksum '" + checksum + "'");
  return c;
}

std::string resolve_asset_url(const std::string& path, const std::optional<std::string>& base_url,
                              const fs::path& manifest_dir) {
  if (path.find("://") != std::string::npos) return path;
  if (base_url && !base_url->empty()) {
    std::string base = *base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    std::string rel = path;
    while (!rel.empty() && rel.front() == '/') rel.erase(0, 1);
    return resolve_asset_url(base + "/" + rel, std::nullopt, manifest_dir);
  }
  fs::path p(path);
  if (p.is_relative()) p = manifest_dir / p;
  return std::string(kFileScheme) + fs::absolute(p).lexically_normal().string();
}

AssetCache::AssetCache(fs::path root, HttpFetcher http) : root_(std::move(root)), http_(std::move(http)) {
  if (!http_) http_ = [](const std::string& url) { return http_get(url); };
  fs::create_directories(root_);
}

fs::path AssetCache::lookup(const std::string& key, const std::string& url,
                            const std::optional<std::string>& checksum) const {
  if (checksum) {
    fs::path p = root_ / *checksum / url_basename(url);
    return fs::exists(p) ? p : fs::path();
  }
  const fs::path index = url_index_file(root_, key);
  if (!fs::exists(index)) return {};
  fs::path p = root_ / read_file_text(index);
  return fs::exists(p) ? p : fs::path();
}

fs::path AssetCache::download(const std::string& key, const std::string& url,
                              const std::optional<std::string>& checksum) {
  std::string body;
  if (starts_with(url, kFileScheme)) {
    const fs::path src(url.substr(kFileScheme.size()));
    std::ifstream in(src, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read asset " + src.string());
    body.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else if (starts_with(url, "http://") || starts_with(url, "https://")) {
    body = http_(url);
  } else {
    throw Error(ErrorCode::kUnsupported, "unsupported asset URL scheme in '" + url + "'");
  }
  ++downloads_;
  const std::string digest = sha256_hex(body);
  if (checksum && digest != *checksum) {
    throw Error(ErrorCode::kChecksumMismatch,
                "checksum mismatch for " + url + ": expected " + *checksum + ", got " + digest);
  }
  const fs::path rel = fs::path(digest) / url_basename(url);
  write_file_atomic(root_ / rel, body);
  if (!checksum) write_file_atomic(url_index_file(root_, key), rel.string());
  return root_ / rel;
}

fs::path AssetCache::fetch(const std::string& url, const std::optional<std::string>& checksum) {
  std::optional<std::string> want;
  if (checksum) want = normalize_checksum(*checksum);
  const std::string key = url + "\n" + want.value_or("");

  std::promise<fs::path> promise;
  {
    std::unique_lock lock(mu_);
    if (auto it = inflight_.find(key); it != inflight_.end()) {
      auto shared = it->second;
      lock.unlock();
      return shared.get();
    }
    if (fs::path hit = lookup(key, url, want); !hit.empty()) return hit;
    inflight_.emplace(key, promise.get_future().share());
  }
  try {
    fs::path p = download(key, url, want);
    promise.set_value(p);
    std::lock_guard lock(mu_);
    inflight_.erase(key);
    return p;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    inflight_.erase(key);
    throw;
  }
}

void AssetCache::purge() {
  std::lock_guard lock(mu_);
  for (const auto& entry : fs::directory_iterator(root_)) fs::remove_all(entry.path());
}

}  // namespace evalscope
