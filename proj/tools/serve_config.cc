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

#include "serve_config.h"

#include <cctype>
#include <cstdlib>

#include "evalscope/error.h"
#include "evalscope/util.h"
#include "evalscope/yaml_subset.h"

namespace evalscope::cli {

namespace {

std::string env_name(const std::string& key) {
  std::string out = "EVALSCOPE_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.erase(0, 1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.pop_back();
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

ServeConfig ServeConfig::load(const std::filesystem::path& file, const std::set<std::string>& keys) {
  ServeConfig cfg;
  cfg.dir_ = std::filesystem::absolute(file).parent_path();
  yaml::Node root = yaml::parse(read_file_text(file));
  if (!root.is_null() && !root.is_mapping()) {
    throw Error(ErrorCode::kInvalidArgument, "config must be a mapping");
  }
  for (size_t i = 0; i < root.size(); ++i) {
    const std::string& key = root.keys()[i];
    const yaml::Node& v = root.values()[i];
    if (keys.count(key) == 0) throw Error(ErrorCode::kInvalidArgument, "unknown config key: " + key);
    std::vector<std::string> items;
    if (v.is_scalar()) {
      items.push_back(v.value());
    } else if (v.is_sequence()) {
      for (const auto& item : v.items()) {
        if (!item.is_scalar()) {
          throw Error(ErrorCode::kInvalidArgument, "config key " + key + " must hold scalars");
        }
        items.push_back(item.value());
      }
    } else if (v.is_mapping()) {
      throw Error(ErrorCode::kInvalidArgument, "config key " + key + " must not be a mapping");
    }
    cfg.values_[key] = std::move(items);
  }
  for (const auto& key : keys) {
    if (const char* env = std::getenv(env_name(key).c_str())) cfg.values_[key] = split_commas(env);
  }
  return cfg;
}

std::string ServeConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return fallback;
  if (it->second.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "config key " + key + " must be a single value");
  }
  return it->second.front();
}

int64_t ServeConfig::integer(const std::string& key, int64_t fallback) const {
  std::string text = str(key);
  if (text.empty()) return fallback;
  size_t used = 0;
  int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "config key " + key + " must be an integer: " + text);
  }
  return v;
}

std::vector<std::string> ServeConfig::list(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::vector<std::string>{} : it->second;
}

std::filesystem::path ServeConfig::path(const std::string& key) const {
  std::string text = str(key);
  if (text.empty()) return {};
  std::filesystem::path p(text);
  return p.is_absolute() ? p : dir_ / p;
}

std::vector<std::filesystem::path> ServeConfig::paths(const std::string& key) const {
  std::vector<std::filesystem::path> out;
  for (const auto& text : list(key)) {
    std::filesystem::path p(text);
    out.push_back(p.is_absolute() ? p : dir_ / p);
  }
  return out;
}

}  // namespace evalscope::cli
