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

#include "evalscope/orchestrator.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "evalscope/error.h"
#include "evalscope/http.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

namespace fs = std::filesystem;

const char* kJournalName = "evaluations.state.jsonl";

std::optional<std::string> param(const HttpRequest& req, const char* key) {
  auto it = req.params.find(key);
  if (it == req.params.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

StoreQuery store_query_from(const HttpRequest& req) {
  StoreQuery q;
  q.model_name = param(req, "model");
  if (auto c = param(req, "model_constraint")) q.model_constraint = VersionConstraint::parse(*c);
  q.framework_name = param(req, "framework");
  if (auto c = param(req, "framework_constraint")) {
    q.framework_constraint = VersionConstraint::parse(*c);
  }
  q.hardware.architecture = param(req, "arch");
  q.hardware.device = param(req, "device");
  q.hardware.interconnect = param(req, "interconnect");
  q.variant = param(req, "variant");
  return q;
}

bool result_satisfies(const EvaluationRequest& req, const AgentResult& r) {
  if (!names_equal(req.model_name, r.model.name)) return false;
  if (!req.model_constraint.satisfied_by(r.model.version)) return false;
  if (!req.framework_name.empty() && !names_equal(req.framework_name, r.framework.name)) return false;
  if (!req.framework_constraint.satisfied_by(r.framework.version)) return false;
  return req.hardware.matches(r.hardware);
}

}  // namespace

nlohmann::json HttpAgentDispatcher::predict(const AgentRecord& agent, const nlohmann::json& request,
                                            int64_t timeout_ms) {
  return expect_json(http_request("POST", "http://" + agent.address, "/predict", request.dump(),
                                  static_cast<int>(timeout_ms)));
}

ManifestLibrary::ManifestLibrary(const fs::path& dir) {
  if (dir.empty() || !fs::exists(dir)) return;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".yml" || ext == ".yaml")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string text = read_file_text(f);
    try {
      add(parse_manifest(text), std::move(text));
    } catch (const Error&) {
      // Not a manifest (or a broken one); the library only serves valid ones.
    }
  }
}

void ManifestLibrary::add(ModelManifest m, std::string text) {
  entries_.emplace_back(std::move(m), std::move(text));
}

const std::pair<ModelManifest, std::string>* ManifestLibrary::find(const std::string& name,
                                                                    const SemVer& v) const {
  for (const auto& e : entries_) {
    if (names_equal(e.first.name, name) && e.first.version == v) return &e;
  }
  return nullptr;
}

Orchestrator::Orchestrator(OrchestratorConfig config, std::shared_ptr<RegistryView> registry,
                           std::shared_ptr<AgentDispatcher> dispatcher)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      dispatcher_(std::move(dispatcher)),
      store_(std::make_unique<EvalStore>(config_.state_dir.empty() ? fs::path()
                                                                   : config_.state_dir / "store")),
      library_(config_.manifests_dir) {
  if (!dispatcher_) dispatcher_ = std::make_shared<HttpAgentDispatcher>();
  recover();
}

Orchestrator::~Orchestrator() { shutdown(); }

void Orchestrator::shutdown() {
  if (stopping_.exchange(true)) return;
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& t : workers) {
    if (t.joinable()) t.join();
  }
}

void Orchestrator::journal(const Evaluation& e) {
  if (config_.state_dir.empty()) return;
  std::lock_guard lock(journal_mu_);
  fs::create_directories(config_.state_dir);
  std::ofstream out(config_.state_dir / kJournalName, std::ios::app | std::ios::binary);
  const std::string line = e.to_json().dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot append to the evaluation journal");
}

void Orchestrator::recover() {
  if (config_.state_dir.empty()) return;
  const fs::path path = config_.state_dir / kJournalName;
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    try {
      Evaluation e = Evaluation::from_json(j);
      if (!evaluations_.count(e.evaluation_id)) order_.push_back(e.evaluation_id);
      evaluations_[e.evaluation_id] = std::move(e);
    } catch (const Error&) {
    }
  }
  for (auto& [id, e] : evaluations_) {
    if (e.state == EvaluationState::kPending || e.state == EvaluationState::kRunning) {
      e.state = EvaluationState::kFailed;
      e.reason = "restart";
      e.updated_ms = unix_millis();
      journal(e);
    }
  }
}

void Orchestrator::update(const std::string& id, const std::function<void(Evaluation&)>& fn) {
  Evaluation snapshot;
  {
    std::lock_guard lock(mu_);
    Evaluation& e = evaluations_.at(id);
    fn(e);
    e.updated_ms = unix_millis();
    snapshot = e;
  }
  journal(snapshot);
  changed_.notify_all();
}

std::optional<Evaluation> Orchestrator::check_cache(const EvaluationRequest& req) const {
  const std::string digest = req.inputs_digest();
  std::lock_guard lock(mu_);
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    const Evaluation& e = evaluations_.at(*it);
    if (e.state != EvaluationState::kDone || e.cached) continue;
    const EvaluationRequest& prev = e.request;
    if (prev.mode != req.mode || prev.trace_level != req.trace_level ||
        prev.overrides != req.overrides || prev.top_k != req.top_k ||
        prev.inputs_digest() != digest) {
      continue;
    }
    size_t done = 0;
    bool all_ok = true;
    for (const auto& r : e.results) {
      if (r.state != EvaluationState::kDone) continue;
      ++done;
      all_ok = all_ok && result_satisfies(req, r);
    }
    if (done > 0 && all_ok) return e;
  }
  return std::nullopt;
}

std::string Orchestrator::submit(const EvaluationRequest& raw) {
  if (stopping_) throw Error(ErrorCode::kFailedPrecondition, "orchestrator is shutting down");
  // Round trip through JSON so programmatic requests get the same checks.
  const EvaluationRequest req = EvaluationRequest::from_json(raw.to_json());
  Evaluation e;
  e.evaluation_id = random_id();
  e.request = req;
  e.submitted_ms = e.updated_ms = unix_millis();

  if (auto hit = check_cache(req)) {
    e.state = EvaluationState::kDone;
    e.cached = true;
    e.cached_from = hit->evaluation_id;
    for (auto r : hit->results) {
      if (r.state != EvaluationState::kDone) continue;
      r.evaluation_id = e.evaluation_id;
      r.request = req;
      r.cached = true;
      e.results.push_back(std::move(r));
    }
    {
      std::lock_guard lock(mu_);
      evaluations_[e.evaluation_id] = e;
      order_.push_back(e.evaluation_id);
    }
    journal(e);
    changed_.notify_all();
    return e.evaluation_id;
  }

  {
    std::lock_guard lock(mu_);
    evaluations_[e.evaluation_id] = e;
    order_.push_back(e.evaluation_id);
  }
  journal(e);
  std::lock_guard lock(mu_);
  workers_.emplace_back([this, id = e.evaluation_id] { run(id); });
  return e.evaluation_id;
}

Evaluation Orchestrator::get(const std::string& evaluation_id) const {
  std::lock_guard lock(mu_);
  auto it = evaluations_.find(evaluation_id);
  if (it == evaluations_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown evaluation '" + evaluation_id + "'");
  }
  return it->second;
}

std::vector<Evaluation> Orchestrator::list() const {
  std::lock_guard lock(mu_);
  std::vector<Evaluation> out;
  for (const auto& id : order_) out.push_back(evaluations_.at(id));
  return out;
}

bool Orchestrator::wait(const std::string& evaluation_id, int64_t timeout_ms) const {
  std::unique_lock lock(mu_);
  return changed_.wait_for(lock, std::chrono::milliseconds(timeout_ms), [&] {
    auto it = evaluations_.find(evaluation_id);
    return it != evaluations_.end() && (it->second.state == EvaluationState::kDone ||
                                        it->second.state == EvaluationState::kFailed);
  });
}

std::vector<Orchestrator::Candidate> Orchestrator::candidates(const EvaluationRequest& req) const {
  AgentQuery q;
  q.model_name = req.model_name;
  q.model_constraint = req.model_constraint;
  if (!req.framework_name.empty()) q.framework_name = req.framework_name;
  q.framework_constraint = req.framework_constraint;
  q.hardware = req.hardware;

  std::vector<Candidate> out;
  for (auto& agent : registry_->query(q)) {
    // A remote registry cannot filter on free-form hardware attributes.
    if (!req.hardware.matches(agent.hardware)) continue;
    // The registry guarantees some entry matches; pick the newest model
    // version the request allows.
    std::optional<NamedVersion> model;
    for (const auto& m : agent.models) {
      if (!names_equal(m.name, req.model_name) || !req.model_constraint.satisfied_by(m.version)) continue;
      if (!model || model->version < m.version) model = m;
    }
    if (!model) continue;
    Candidate c{agent, *model, library_.find(model->name, model->version)};
    if (c.manifest != nullptr) {
      const FrameworkSpec& need = c.manifest->first.framework;
      const bool ok = std::any_of(agent.frameworks.begin(), agent.frameworks.end(), [&](const NamedVersion& f) {
        return names_equal(f.name, need.name) && need.version_constraint.satisfied_by(f.version) &&
               (req.framework_name.empty() || names_equal(f.name, req.framework_name)) &&
               req.framework_constraint.satisfied_by(f.version);
      });
      if (!ok) continue;
    }
    out.push_back(std::move(c));
  }
  return out;
}

nlohmann::json Orchestrator::resolve_inputs(const EvaluationRequest& req) const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& in : req.inputs) {
    nlohmann::json j = {{"id", in.id}};
    if (in.data) j["data"] = *in.data;
    if (in.url) j["url"] = *in.url;
    if (in.label) j["label"] = *in.label;
    out.push_back(std::move(j));
  }
  if (!req.dataset) return out;
  const fs::path dir = config_.datasets_dir / req.dataset->name / req.dataset->version;
  const fs::path index = dir / "index.txt";
  if (!fs::exists(index)) {
    throw Error(ErrorCode::kNotFound, "dataset " + req.dataset->name + " " + req.dataset->version +
                                          " not found");
  }
  std::istringstream lines(read_file_text(index));
  for (std::string line; std::getline(lines, line);) {
    std::istringstream fields(line);
    std::string file;
    if (!(fields >> file) || file.front() == '#') continue;
    nlohmann::json j = {{"id", file}, {"data", base64_encode(read_file_bytes(dir / file))}};
    int64_t label = 0;
    if (fields >> label) j["label"] = label;
    out.push_back(std::move(j));
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset has no inputs");
  return out;
}

nlohmann::json Orchestrator::agent_request(const EvaluationRequest& req, const Candidate& c,
                                           const nlohmann::json& inputs) const {
  nlohmann::json j = {{"model", {{"name", c.model.name}, {"version", c.model.version.to_string()}}},
                      {"inputs", inputs},
                      {"trace_level", to_string(req.trace_level)},
                      {"overrides", req.overrides},
                      {"top_k", req.top_k}};
  if (c.manifest != nullptr) j["manifest"] = c.manifest->second;
  return j;
}

AgentResult Orchestrator::dispatch_one(const std::string& id, const EvaluationRequest& req,
                                       const Candidate& c, const nlohmann::json& inputs) {
  AgentResult r;
  r.evaluation_id = id;
  r.request = req;
  r.agent_id = c.agent.agent_id;
  r.model = c.model;
  r.hardware = c.agent.hardware;
  if (!c.agent.frameworks.empty()) r.framework = c.agent.frameworks.front();
  r.started_ms = unix_millis();
  ++dispatches_;
  try {
    const auto resp = dispatcher_->predict(c.agent, agent_request(req, c, inputs), config_.dispatch_timeout_ms);
    r.framework = NamedVersion{resp.at("framework").at("name").get<std::string>(),
                               SemVer::parse(resp.at("framework").at("version").get<std::string>())};
    r.container = resp.value("container", "");
    r.outputs = resp.value("results", nlohmann::json::array());
    if (resp.contains("metrics") && !resp.at("metrics").is_null()) {
      const auto& m = resp.at("metrics");
      r.metrics = AccuracyReport{m.at("n_samples").get<size_t>(), m.at("top1").get<double>(),
                                 m.at("top5").get<double>()};
    }
    if (resp.contains("trace")) r.trace = spans_from_json(resp.at("trace"));
    r.latency_ns = resp.value("latency_ns", uint64_t{0});
    r.state = EvaluationState::kDone;
  } catch (const Error& e) {
    r.state = EvaluationState::kFailed;
    r.error = e.code() == ErrorCode::kTimeout ? "timeout: " + std::string(e.what()) : e.what();
  } catch (const nlohmann::json::exception& e) {
    r.state = EvaluationState::kFailed;
    r.error = std::string("malformed agent response: ") + e.what();
  }
  r.finished_ms = unix_millis();
  return r;
}

void Orchestrator::run(std::string id) {
  update(id, [](Evaluation& e) { e.state = EvaluationState::kRunning; });
  const EvaluationRequest req = get(id).request;
  try {
    const nlohmann::json inputs = resolve_inputs(req);
    const auto cands = candidates(req);
    if (cands.empty()) {
      update(id, [](Evaluation& e) {
        e.state = EvaluationState::kFailed;
        e.reason = "no-matching-agent";
      });
      return;
    }
    auto record = [&](AgentResult r) {
      if (r.state == EvaluationState::kDone) store_->put(r);
      update(id, [&](Evaluation& e) { e.results.push_back(r); });
    };
    if (req.mode == DispatchMode::kOne) {
      for (const auto& c : cands) {
        if (stopping_) break;
        AgentResult r = dispatch_one(id, req, c, inputs);
        const bool ok = r.state == EvaluationState::kDone;
        record(std::move(r));
        if (ok) break;
      }
    } else {
      std::vector<std::thread> threads;
      for (const auto& c : cands) {
        threads.emplace_back([&, c] { record(dispatch_one(id, req, c, inputs)); });
      }
      for (auto& t : threads) t.join();
    }
    update(id, [](Evaluation& e) {
      const bool any = std::any_of(e.results.begin(), e.results.end(), [](const AgentResult& r) {
        return r.state == EvaluationState::kDone;
      });
      e.state = any ? EvaluationState::kDone : EvaluationState::kFailed;
      if (!any) {
        std::string why;
        for (const auto& r : e.results) why += (why.empty() ? "" : "; ") + r.agent_id + ": " + r.error;
        e.reason = "all matching agents failed: " + why;
      }
    });
  } catch (const std::exception& ex) {
    const std::string why = ex.what();
    update(id, [&](Evaluation& e) {
      e.state = EvaluationState::kFailed;
      e.reason = why;
    });
  }
}

void Orchestrator::mount(HttpServer& server) {
  server.route("POST", "/evaluations", [this](const HttpRequest& req) {
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "request body is not JSON");
    const std::string id = submit(EvaluationRequest::from_json(j));
    const Evaluation e = get(id);
    return json_response({{"evaluation_id", id}, {"state", to_string(e.state)}, {"cached", e.cached}},
                         202);
  });
  server.route("GET", "/evaluations/summary", [this](const HttpRequest& req) {
    return json_response(to_json(summary_table(store_->query(store_query_from(req)))));
  });
  server.route("GET", "/evaluations/compare", [this](const HttpRequest& req) {
    auto pick = [&](const char* key) {
      auto id = param(req, key);
      if (!id) throw Error(ErrorCode::kInvalidArgument, std::string("missing parameter ") + key);
      const Evaluation e = get(*id);
      for (const auto& r : e.results) {
        if (r.state == EvaluationState::kDone) return summarize(r.trace);
      }
      throw Error(ErrorCode::kFailedPrecondition, "evaluation " + *id + " has no completed result");
    };
    const auto a = pick("a");
    const auto b = pick("b");
    return json_response({{"a", a.to_json()}, {"b", b.to_json()}, {"rows", to_json(compare(a, b))}});
  });
  server.route("GET", "/evaluations/([^/]+)", [this](const HttpRequest& req) {
    return json_response(get(req.captures.at(0)).to_json());
  });
  server.route("GET", "/evaluations", [this](const HttpRequest& req) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : store_->query(store_query_from(req))) out.push_back(r.to_json());
    return json_response(out);
  });
  server.route("GET", "/health", [](const HttpRequest&) { return json_response({{"status", "ok"}}); });
}

}  // namespace evalscope
