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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace evalscope::cli {

/// Flat key/value configuration for the `serve` commands. Values come from
/// a YAML file (top-level mapping of scalars and scalar lists) and are
/// overridden by EVALSCOPE_<KEY> environment variables; list values in the
/// environment are comma-separated.
class ServeConfig {
 public:
  /// Throws Error(kInvalidArgument) for unknown keys or nested values.
  static ServeConfig load(const std::filesystem::path& file, const std::set<std::string>& keys);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string str(const std::string& key, const std::string& fallback = "") const;
  int64_t integer(const std::string& key, int64_t fallback) const;
  std::vector<std::string> list(const std::string& key) const;
  /// Relative paths resolve against the config file's directory.
  std::filesystem::path path(const std::string& key) const;
  std::vector<std::filesystem::path> paths(const std::string& key) const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::vector<std::string>> values_;
};

}  // namespace evalscope::cli
