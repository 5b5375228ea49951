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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/pipeline.h"
#include "evalscope/postprocess.h"
#include "evalscope/registry.h"
#include "evalscope/semver.h"
#include "evalscope/tracing.h"

namespace evalscope {

enum class DispatchMode { kOne, kAll };
enum class EvaluationState { kPending, kRunning, kDone, kFailed };

std::string_view to_string(DispatchMode m);
std::string_view to_string(EvaluationState s);

struct RequestInput {
  std::string id;
  std::optional<std::string> data;  // base64
  std::optional<std::string> url;
  std::optional<int64_t> label;
  bool operator==(const RequestInput&) const = default;
};

struct DatasetSelector {
  std::string name;
  std::string version;
  bool operator==(const DatasetSelector&) const = default;
};

struct EvaluationRequest {
  std::string model_name;
  VersionConstraint model_constraint;
  std::string framework_name;
  VersionConstraint framework_constraint;
  HardwareFilter hardware;
  std::optional<DatasetSelector> dataset;
  std::vector<RequestInput> inputs;
  DispatchMode mode = DispatchMode::kOne;
  TraceLevel trace_level = TraceLevel::kNone;
  PipelineOverrides overrides;
  int top_k = 5;
  // Free-form label for summary tables, e.g. "color layout pitfall".
  std::string variant;

  nlohmann::json to_json() const;
  /// Throws Error(kInvalidArgument) when fields are missing, constraints do
  /// not parse, or there is neither a dataset nor inline inputs.
  static EvaluationRequest from_json(const nlohmann::json& j);
  /// Digest of the inputs (or dataset reference); part of the cache key.
  std::string inputs_digest() const;
  bool operator==(const EvaluationRequest&) const = default;
};

/// One agent's outcome within an evaluation. Done results are what the
/// evaluation store keeps.
struct AgentResult {
  std::string evaluation_id;
  EvaluationRequest request;
  std::string agent_id;
  NamedVersion model;
  NamedVersion framework;
  HardwareSpec hardware;
  std::string container;
  EvaluationState state = EvaluationState::kDone;  // kDone or kFailed
  std::string error;
  nlohmann::json outputs = nlohmann::json::array();  // per-input results with provenance
  std::optional<AccuracyReport> metrics;
  std::vector<TraceSpan> trace;
  int64_t started_ms = 0;
  int64_t finished_ms = 0;
  uint64_t latency_ns = 0;
  bool cached = false;

  nlohmann::json to_json() const;
  static AgentResult from_json(const nlohmann::json& j);
  bool operator==(const AgentResult&) const = default;
};

struct Evaluation {
  std::string evaluation_id;
  EvaluationRequest request;
  EvaluationState state = EvaluationState::kPending;
  std::string reason;  // failure reason
  std::vector<AgentResult> results;
  bool cached = false;
  std::string cached_from;  // evaluation id the cached results came from
  int64_t submitted_ms = 0;
  int64_t updated_ms = 0;

  nlohmann::json to_json() const;
  static Evaluation from_json(const nlohmann::json& j);
};

}  // namespace evalscope
