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

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evalscope/evaluation.h"
#include "evalscope/registry.h"

namespace evalscope {

struct StoreQuery {
  std::optional<std::string> model_name;
  VersionConstraint model_constraint;
  std::optional<std::string> framework_name;
  VersionConstraint framework_constraint;
  HardwareFilter hardware;
  std::optional<std::string> variant;

  bool matches(const AgentResult& r) const;
};

/// Append-only JSON-lines store, one file per UTC day
/// (`evaluations-YYYY-MM-DD.jsonl`), indexed in memory by
/// (evaluation_id, agent_id). The index is rebuilt by scanning on open.
class EvalStore {
 public:
  /// An empty directory path keeps records in memory only.
  explicit EvalStore(std::filesystem::path dir);

  /// Throws Error(kAlreadyExists) when the key exists with different
  /// content, Error(kInvalidArgument) for results that are not done.
  void put(const AgentResult& r);
  std::optional<AgentResult> get(const std::string& evaluation_id, const std::string& agent_id) const;
  std::vector<AgentResult> by_evaluation(const std::string& evaluation_id) const;
  /// In insertion order.
  std::vector<AgentResult> query(const StoreQuery& q) const;
  std::vector<AgentResult> all() const;
  size_t size() const;

  /// Lines that failed to parse on open (a torn final write, for example).
  size_t skipped_lines() const { return skipped_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::vector<std::pair<AgentResult, std::string>> records_;  // with canonical line
  std::map<std::pair<std::string, std::string>, size_t> index_;
  size_t skipped_ = 0;
};

struct SummaryRow {
  std::string model;    // "name version"
  std::string variant;  // request variant, "default" when unset
  size_t evaluations = 0;
  size_t n_samples = 0;
  std::string top1;  // 4-decimal fraction, "-" without labels
  std::string top5;
  std::string latency_ms;  // mean per-evaluation latency
  bool operator==(const SummaryRow&) const = default;
};

/// Rows per (model, variant) in order of first appearance. Accuracy is
/// pooled over samples.
std::vector<SummaryRow> summary_table(const std::vector<AgentResult>& records);
nlohmann::json to_json(const std::vector<SummaryRow>& rows);

}  // namespace evalscope
