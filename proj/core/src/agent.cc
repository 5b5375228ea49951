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

#include "evalscope/agent.h"

#include <algorithm>
#include <chrono>
#include <iostream>

#include "evalscope/error.h"
#include "evalscope/http.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

std::vector<std::string> labels_or_indices(const PredictorSession& s, int64_t classes) {
  std::vector<std::string> labels = s.labels();
  if (static_cast<int64_t>(labels.size()) == classes) return labels;
  labels.clear();
  for (int64_t i = 0; i < classes; ++i) labels.push_back("class_" + std::to_string(i));
  return labels;
}

const Tensor* output_of_type(const PredictorSession& s, const std::map<std::string, Tensor>& outs,
                             OutputType type) {
  const auto names = s.output_layers();
  const auto& specs = s.manifest().outputs;
  for (size_t i = 0; i < specs.size() && i < names.size(); ++i) {
    if (specs[i].type != type) continue;
    if (auto it = outs.find(names[i]); it != outs.end()) return &it->second;
  }
  return nullptr;
}

std::vector<uint8_t> input_bytes(const nlohmann::json& in) {
  if (in.contains("data")) return base64_decode(in.at("data").get<std::string>());
  if (in.contains("url")) {
    const std::string url = in.at("url").get<std::string>();
    if (url.rfind("file://", 0) == 0) return read_file_bytes(url.substr(7));
    const std::string body = http_get(url);
    return {body.begin(), body.end()};
  }
  throw Error(ErrorCode::kInvalidArgument, "input needs 'data' or 'url'");
}

}  // namespace

RunResult run_evaluation(PredictorSession& session, const std::vector<EvalInput>& inputs,
                         const RunOptions& opts) {
  const ModelManifest& m = session.manifest();
  if (inputs.empty()) throw Error(ErrorCode::kInvalidArgument, "no inputs to evaluate");
  if (opts.top_k < 1) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  const InputSpec spec = apply_overrides(m.inputs.front(), opts.overrides);

  TraceCollector collector(opts.trace_level);
  RunResult run;
  std::vector<std::vector<Prediction>> top5;
  {
    ScopedSpan app(&collector, TraceLevel::kApplication, "evaluate");
    app.tag("model", m.name + "@" + m.version.to_string());
    for (const auto& input : inputs) {
      try {
        ScopedSpan model_span(&collector, TraceLevel::kModel, m.name, app.id());
        model_span.tag("input_id", input.id);
        PipelineResult pre;
        {
          ScopedSpan span(&collector, TraceLevel::kFramework, "preprocess", model_span.id());
          pre = run_pipeline(spec, input.data, PipelineOptions{opts.jpeg_decoder});
        }
        const auto outs = session.predict(pre.tensor, &collector, model_span.id());

        InputResult r;
        r.input_id = input.id;
        r.provenance = std::move(pre.provenance);
        if (m.task == Task::kClassification) {
          const Tensor* probs = output_of_type(session, outs, OutputType::kProbability);
          if (probs == nullptr) throw Error(ErrorCode::kInternal, "backend produced no probabilities");
          const int64_t classes = probs->dims.back();
          const auto labels = labels_or_indices(session, classes);
          r.predictions =
              top_k(*probs, static_cast<int>(std::min<int64_t>(opts.top_k, classes)), labels).front();
          top5.push_back(top_k(*probs, static_cast<int>(std::min<int64_t>(5, classes)), labels).front());
        } else {
          const Tensor* boxes = output_of_type(session, outs, OutputType::kBox);
          const Tensor* scores = output_of_type(session, outs, OutputType::kProbability);
          const Tensor* classes = output_of_type(session, outs, OutputType::kClass);
          const Tensor* masks = output_of_type(session, outs, OutputType::kMask);
          if (boxes == nullptr || scores == nullptr || classes == nullptr) {
            throw Error(ErrorCode::kInternal, "backend produced incomplete detection outputs");
          }
          r.detections = assemble_detections(
              *boxes, *scores, *classes, masks ? std::optional<Tensor>(*masks) : std::nullopt);
        }
        run.results.push_back(std::move(r));
      } catch (const Error& e) {
        throw Error(e.code(), "input " + input.id + ": " + e.what());
      }
    }
  }
  const bool labelled = std::all_of(inputs.begin(), inputs.end(),
                                    [](const EvalInput& i) { return i.label.has_value(); });
  if (labelled && m.task == Task::kClassification) {
    std::vector<int64_t> truth;
    for (const auto& i : inputs) truth.push_back(*i.label);
    run.metrics = score_accuracy(top5, truth);
  }
  run.trace = collector.spans();
  return run;
}

nlohmann::json RunResult::to_json() const {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j = {{"input_id", r.input_id}};
    if (!r.detections.empty() || r.predictions.empty()) {
      nlohmann::json d = nlohmann::json::array();
      for (const auto& f : r.detections) d.push_back(evalscope::to_json(f));
      j["detections"] = std::move(d);
    } else {
      nlohmann::json p = nlohmann::json::array();
      for (const auto& pred : r.predictions) p.push_back(evalscope::to_json(pred));
      j["predictions"] = std::move(p);
    }
    j["provenance"] = r.provenance.to_json();
    items.push_back(std::move(j));
  }
  nlohmann::json out = {{"results", std::move(items)}};
  if (metrics) out["metrics"] = evalscope::to_json(*metrics);
  if (!trace.empty()) {
    out["trace"] = spans_to_json(trace);
    out["summary"] = summarize(trace).to_json();
  }
  return out;
}

Agent::Agent(AgentConfig config, BackendRegistry backends)
    : config_(std::move(config)), backends_(std::move(backends)), cache_(config_.cache_dir) {
  if (config_.agent_id.empty()) config_.agent_id = "agent-" + random_id().substr(0, 12);
  if (config_.queue_depth < 1) throw Error(ErrorCode::kInvalidArgument, "queue_depth must be >= 1");
  for (const auto& path : config_.manifests) {
    ModelManifest m = parse_manifest(read_file_text(path));
    if (!names_equal(m.framework.name, config_.framework.name) ||
        !m.framework.version_constraint.satisfied_by(config_.framework.version)) {
      throw Error(ErrorCode::kFailedPrecondition,
                  "manifest " + path.string() + " needs " + m.framework.name + " " +
                      m.framework.version_constraint.to_string() + ", agent runs " +
                      config_.framework.name + " " + config_.framework.version.to_string());
    }
    models_.push_back(LocalModel{std::move(m), std::filesystem::absolute(path).parent_path()});
  }
}

Agent::~Agent() { shutdown(); }

AgentRecord Agent::record(int port) const {
  AgentRecord r;
  r.agent_id = config_.agent_id;
  r.address = config_.advertise_host + ":" + std::to_string(port);
  r.hardware = config_.hardware;
  r.frameworks = {config_.framework};
  for (const auto& m : models_) r.models.push_back(NamedVersion{m.manifest.name, m.manifest.version});
  return r;
}

Agent::SessionSlot& Agent::session_for(const ModelManifest& manifest,
                                       const std::filesystem::path& dir) {
  const std::string key = sha256_hex(serialize_manifest(manifest) + "\n" + dir.string());
  std::lock_guard lock(sessions_mu_);
  auto& slot = sessions_[key];
  if (!slot) {
    auto fresh = std::make_unique<SessionSlot>();
    LoadOptions opts;
    opts.architecture = config_.hardware.architecture;
    opts.device = config_.device;
    opts.manifest_dir = dir;
    fresh->session = load_model(manifest, backends_, cache_, opts);
    slot = std::move(fresh);
  }
  return *slot;
}

nlohmann::json Agent::handle_predict(const nlohmann::json& req) {
  ++requests_;
  const auto started = TraceCollector::now_ns();
  if (!req.is_object()) throw Error(ErrorCode::kInvalidArgument, "request must be a JSON object");

  std::optional<ModelManifest> manifest;
  std::filesystem::path dir = std::filesystem::current_path();
  const LocalModel* local = nullptr;
  if (req.contains("manifest") && req.at("manifest").is_string()) {
    manifest = parse_manifest(req.at("manifest").get<std::string>());
    for (const auto& lm : models_) {
      if (names_equal(lm.manifest.name, manifest->name) && lm.manifest.version == manifest->version) {
        local = &lm;
      }
    }
  } else if (req.contains("model")) {
    const auto name = req.at("model").at("name").get<std::string>();
    std::optional<SemVer> version;
    if (req.at("model").contains("version")) {
      version = SemVer::parse(req.at("model").at("version").get<std::string>());
    }
    for (const auto& lm : models_) {
      if (!names_equal(lm.manifest.name, name) || (version && lm.manifest.version != *version)) continue;
      if (local == nullptr || local->manifest.version < lm.manifest.version) local = &lm;
    }
    if (local == nullptr) throw Error(ErrorCode::kNotFound, "agent does not serve model " + name);
    manifest = local->manifest;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "request needs 'manifest' or 'model'");
  }
  if (local != nullptr) dir = local->dir;
  if (!names_equal(manifest->framework.name, config_.framework.name) ||
      !manifest->framework.version_constraint.satisfied_by(config_.framework.version)) {
    throw Error(ErrorCode::kFailedPrecondition,
                "manifest requires " + manifest->framework.name + " " +
                    manifest->framework.version_constraint.to_string() + "; agent runs " +
                    config_.framework.name + " " + config_.framework.version.to_string());
  }

  RunOptions opts;
  opts.jpeg_decoder = req.value("jpeg_decoder", config_.jpeg_decoder);
  opts.top_k = req.value("top_k", 5);
  if (req.contains("trace_level")) {
    auto level = parse_trace_level(req.at("trace_level").get<std::string>());
    if (!level) throw Error(ErrorCode::kInvalidArgument, "unknown trace_level");
    opts.trace_level = *level;
  }
  if (req.contains("overrides")) {
    for (const auto& [k, v] : req.at("overrides").items()) {
      opts.overrides[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  std::vector<EvalInput> inputs;
  for (const auto& in : req.value("inputs", nlohmann::json::array())) {
    EvalInput e;
    e.id = in.value("id", "input" + std::to_string(inputs.size()));
    e.data = input_bytes(in);
    if (in.contains("label") && !in.at("label").is_null()) e.label = in.at("label").get<int64_t>();
    inputs.push_back(std::move(e));
  }

  SessionSlot& slot = session_for(*manifest, dir);
  {
    std::unique_lock lock(slot.mu);
    slot.cv.wait(lock, [&] { return slot.running < config_.queue_depth; });
    ++slot.running;
  }
  struct Release {
    SessionSlot& s;
    ~Release() {
      {
        std::lock_guard lock(s.mu);
        --s.running;
      }
      s.cv.notify_one();
    }
  } release{slot};

  ++predict_calls_;
  if (config_.artificial_delay_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(config_.artificial_delay_ms));
  }
  RunResult run = run_evaluation(*slot.session, inputs, opts);

  nlohmann::json out = run.to_json();
  out["agent_id"] = config_.agent_id;
  out["model"] = {{"name", manifest->name}, {"version", manifest->version.to_string()}};
  out["framework"] = {{"name", config_.framework.name},
                      {"version", config_.framework.version.to_string()}};
  out["hardware"] = to_json(config_.hardware);
  out["container"] = slot.session->container();
  out["backend"] = slot.session->backend_kind();
  out["environment"] = slot.session->environment();
  out["latency_ns"] = TraceCollector::now_ns() - started;
  return out;
}

nlohmann::json Agent::stats() const {
  return {{"agent_id", config_.agent_id},
          {"predict_calls", predict_calls_.load()},
          {"requests", requests_.load()},
          {"downloads", cache_.download_count()}};
}

void Agent::mount(HttpServer& server) {
  server.route("POST", "/predict", [this](const HttpRequest& req) {
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "request body is not JSON");
    return json_response(handle_predict(j));
  });
  server.route("GET", "/stats", [this](const HttpRequest&) { return json_response(stats()); });
  server.route("GET", "/health", [](const HttpRequest&) { return json_response({{"status", "ok"}}); });
  server.route("GET", "/record", [this](const HttpRequest&) {
    return json_response(to_json(record(port_)));
  });
}

void Agent::start_heartbeats(int port) {
  port_ = port;
  if (config_.registry_url.empty() || heartbeat_.joinable()) return;
  heartbeat_ = std::thread([this] {
    RegistryClient client(config_.registry_url);
    bool published = false;
    std::unique_lock lock(hb_mu_);
    while (!stopping_) {
      lock.unlock();
      try {
        if (published) {
          client.heartbeat(config_.agent_id);
        } else {
          client.publish(record(port_));
          published = true;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kNotFound) {
          published = false;
          try {
            client.publish(record(port_));
            published = true;
          } catch (const Error&) {
          }
        } else {
          std::cerr << "agent " << config_.agent_id << ": registry unreachable: " << e.what() << "\n";
        }
      }
      lock.lock();
      hb_cv_.wait_for(lock, std::chrono::milliseconds(config_.heartbeat_interval_ms),
                      [this] { return stopping_.load(); });
    }
  });
}

void Agent::shutdown() {
  if (stopping_.exchange(true)) return;
  hb_cv_.notify_all();
  if (heartbeat_.joinable()) {
    heartbeat_.join();
    try {
      RegistryClient(config_.registry_url, 2000).deregister(config_.agent_id);
    } catch (const Error&) {
      // Expiry removes the record anyway.
    }
  }
}

}  // namespace evalscope
