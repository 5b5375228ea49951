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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/pipeline.h"
#include "evalscope/postprocess.h"
#include "evalscope/predictor.h"
#include "evalscope/registry.h"
#include "evalscope/tracing.h"

namespace evalscope {

class HttpServer;

struct EvalInput {
  std::string id;
  std::vector<uint8_t> data;
  std::optional<int64_t> label;  // ground truth class index
};

struct RunOptions {
  TraceLevel trace_level = TraceLevel::kNone;
  PipelineOverrides overrides;
  int top_k = 5;
  std::string jpeg_decoder = kDefaultJpegDecoder;
};

struct InputResult {
  std::string input_id;
  std::vector<Prediction> predictions;
  std::vector<DetectionFeature> detections;
  PipelineProvenance provenance;
};

struct RunResult {
  std::vector<InputResult> results;
  std::optional<AccuracyReport> metrics;  // set when every input has a label
  std::vector<TraceSpan> trace;

  /// Deterministic for a given session and inputs; "trace" and "summary"
  /// appear only when spans were collected.
  nlohmann::json to_json() const;
};

/// Runs every input through the session's manifest pipeline (with
/// overrides merged in), the backend, and post-processing. Any input
/// failure fails the run.
RunResult run_evaluation(PredictorSession& session, const std::vector<EvalInput>& inputs,
                         const RunOptions& opts);

struct AgentConfig {
  std::string agent_id;
  std::string host = "127.0.0.1";
  int port = 0;
  std::string advertise_host = "127.0.0.1";
  std::string registry_url;  // empty: do not publish
  int64_t heartbeat_interval_ms = 1000;
  HardwareSpec hardware{"amd64", {"cpu"}, std::nullopt, {}};
  std::string device = "cpu";
  NamedVersion framework;
  std::vector<std::filesystem::path> manifests;
  std::filesystem::path cache_dir = "evalscope-cache";
  std::string jpeg_decoder = kDefaultJpegDecoder;
  // Evaluations admitted per session at once; further requests wait.
  int queue_depth = 1;
  // Sleeps before each evaluation. Used by tests to hold an agent mid-run.
  int64_t artificial_delay_ms = 0;
};

/// A predictor agent: serves POST /predict for the models it was configured
/// with and keeps its registry record alive.
class Agent {
 public:
  Agent(AgentConfig config, BackendRegistry backends);
  ~Agent();

  const AgentConfig& config() const { return config_; }
  AgentRecord record(int port) const;

  /// Request: {model?: {name, version}, manifest?: text, inputs: [{id,
  /// data (base64) | url, label?}], trace_level, overrides, top_k}.
  nlohmann::json handle_predict(const nlohmann::json& request);
  nlohmann::json stats() const;
  size_t predict_calls() const { return predict_calls_.load(); }

  void mount(HttpServer& server);
  /// Publishes and starts heartbeats; re-publishes when the registry has
  /// forgotten the agent.
  void start_heartbeats(int port);
  /// Stops heartbeats and deregisters.
  void shutdown();

 private:
  struct LocalModel {
    ModelManifest manifest;
    std::filesystem::path dir;
  };
  struct SessionSlot {
    std::shared_ptr<PredictorSession> session;
    std::mutex mu;
    std::condition_variable cv;
    int running = 0;
  };

  SessionSlot& session_for(const ModelManifest& manifest, const std::filesystem::path& dir);

  AgentConfig config_;
  BackendRegistry backends_;
  AssetCache cache_;
  std::vector<LocalModel> models_;
  std::mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<SessionSlot>> sessions_;
  std::atomic<size_t> predict_calls_{0};
  std::atomic<size_t> requests_{0};

  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex hb_mu_;
  std::condition_variable hb_cv_;
  std::thread heartbeat_;
};

}  // namespace evalscope
