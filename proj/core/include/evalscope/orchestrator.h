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

#include "evalscope/evalstore.h"
#include "evalscope/evaluation.h"
#include "evalscope/manifest.h"
#include "evalscope/registry.h"

namespace evalscope {

class HttpServer;

/// Sends one predict request to an agent. Throws Error on transport
/// failures, timeouts (kTimeout) and agent-side errors.
class AgentDispatcher {
 public:
  virtual ~AgentDispatcher() = default;
  virtual nlohmann::json predict(const AgentRecord& agent, const nlohmann::json& request,
                                 int64_t timeout_ms) = 0;
};

/// POST http://<address>/predict.
class HttpAgentDispatcher : public AgentDispatcher {
 public:
  nlohmann::json predict(const AgentRecord& agent, const nlohmann::json& request,
                         int64_t timeout_ms) override;
};

/// Model manifests known to the orchestrator, keyed by (name, version).
/// Loaded from every *.yml / *.yaml file in a directory; unparsable files
/// are skipped.
class ManifestLibrary {
 public:
  ManifestLibrary() = default;
  explicit ManifestLibrary(const std::filesystem::path& dir);

  void add(ModelManifest m, std::string text);
  /// Manifest text for (name, version), if present.
  const std::pair<ModelManifest, std::string>* find(const std::string& name, const SemVer& v) const;
  size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<ModelManifest, std::string>> entries_;
};

struct OrchestratorConfig {
  std::filesystem::path state_dir;     // journal + evaluation store; empty = memory only
  std::filesystem::path manifests_dir; // optional manifest library
  std::filesystem::path datasets_dir;  // `<dir>/<name>/<version>/index.txt`
  int64_t dispatch_timeout_ms = 60000;
};

/// Accepts evaluation requests, resolves agents through the registry,
/// dispatches, and persists results. Each evaluation runs on its own
/// thread; states move pending -> running -> done | failed and every
/// transition is appended to `<state_dir>/evaluations.state.jsonl`.
///
/// In mode one, candidates are tried most-recent-heartbeat first and each
/// agent at most once; the first success wins. In mode all, every matching
/// agent is dispatched in parallel and results appear as they arrive; the
/// evaluation is done when at least one agent succeeded.
class Orchestrator {
 public:
  Orchestrator(OrchestratorConfig config, std::shared_ptr<RegistryView> registry,
               std::shared_ptr<AgentDispatcher> dispatcher);
  ~Orchestrator();

  /// Validates and persists the request and returns its id. A cache hit is
  /// completed before returning.
  std::string submit(const EvaluationRequest& req);
  /// Throws Error(kNotFound).
  Evaluation get(const std::string& evaluation_id) const;
  std::vector<Evaluation> list() const;
  /// A prior done evaluation whose stored versions satisfy the request and
  /// whose inputs, overrides, trace level, top_k and mode are identical.
  std::optional<Evaluation> check_cache(const EvaluationRequest& req) const;
  /// Blocks until the evaluation is done or failed. Returns false on
  /// timeout.
  bool wait(const std::string& evaluation_id, int64_t timeout_ms) const;

  EvalStore& store() { return *store_; }
  size_t dispatch_count() const { return dispatches_.load(); }

  void mount(HttpServer& server);
  void shutdown();

 private:
  struct Candidate {
    AgentRecord agent;
    NamedVersion model;
    const std::pair<ModelManifest, std::string>* manifest = nullptr;
  };

  void run(std::string id);
  std::vector<Candidate> candidates(const EvaluationRequest& req) const;
  nlohmann::json agent_request(const EvaluationRequest& req, const Candidate& c,
                               const nlohmann::json& inputs) const;
  nlohmann::json resolve_inputs(const EvaluationRequest& req) const;
  AgentResult dispatch_one(const std::string& id, const EvaluationRequest& req, const Candidate& c,
                           const nlohmann::json& inputs);
  void update(const std::string& id, const std::function<void(Evaluation&)>& fn);
  void journal(const Evaluation& e);
  void recover();

  OrchestratorConfig config_;
  std::shared_ptr<RegistryView> registry_;
  std::shared_ptr<AgentDispatcher> dispatcher_;
  std::unique_ptr<EvalStore> store_;
  ManifestLibrary library_;
  std::atomic<size_t> dispatches_{0};

  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::map<std::string, Evaluation> evaluations_;
  std::vector<std::string> order_;
  std::mutex journal_mu_;
  std::vector<std::thread> workers_;
  std::atomic<bool> stopping_{false};
};

}  // namespace evalscope
