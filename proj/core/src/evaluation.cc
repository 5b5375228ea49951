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

#include "evalscope/evaluation.h"

#include "evalscope/error.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

[[noreturn]] void bad_request(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, "invalid evaluation request: " + msg);
}

VersionConstraint constraint_field(const nlohmann::json& obj, const char* what) {
  if (!obj.contains("constraint") || obj.at("constraint").is_null()) return {};
  const auto text = obj.at("constraint").get<std::string>();
  if (text.empty()) return {};
  try {
    return VersionConstraint::parse(text);
  } catch (const Error& e) {
    bad_request(std::string(what) + " constraint: " + e.what());
  }
}

nlohmann::json named(const NamedVersion& nv) {
  return {{"name", nv.name}, {"version", nv.version.to_string()}};
}

NamedVersion named_from(const nlohmann::json& j) {
  return NamedVersion{j.at("name").get<std::string>(), SemVer::parse(j.at("version").get<std::string>())};
}

EvaluationState state_from(const std::string& s) {
  for (auto st : {EvaluationState::kPending, EvaluationState::kRunning, EvaluationState::kDone,
                  EvaluationState::kFailed}) {
    if (s == to_string(st)) return st;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown evaluation state '" + s + "'");
}

}  // namespace

std::string_view to_string(DispatchMode m) { return m == DispatchMode::kOne ? "one" : "all"; }

std::string_view to_string(EvaluationState s) {
  switch (s) {
    case EvaluationState::kPending:
      return "pending";
    case EvaluationState::kRunning:
      return "running";
    case EvaluationState::kDone:
      return "done";
    case EvaluationState::kFailed:
      return "failed";
  }
  return "failed";
}

nlohmann::json EvaluationRequest::to_json() const {
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& in : inputs) {
    nlohmann::json j = {{"id", in.id}};
    if (in.data) j["data"] = *in.data;
    if (in.url) j["url"] = *in.url;
    if (in.label) j["label"] = *in.label;
    ins.push_back(std::move(j));
  }
  nlohmann::json j = {
      {"model", {{"name", model_name}, {"constraint", model_constraint.to_string()}}},
      {"framework", {{"name", framework_name}, {"constraint", framework_constraint.to_string()}}},
      {"hardware", hardware.to_json()},
      {"inputs", std::move(ins)},
      {"dispatch_mode", to_string(mode)},
      {"trace_level", to_string(trace_level)},
      {"overrides", overrides},
      {"top_k", top_k},
      {"variant", variant}};
  j["dataset"] = dataset ? nlohmann::json{{"name", dataset->name}, {"version", dataset->version}}
                         : nlohmann::json(nullptr);
  return j;
}

EvaluationRequest EvaluationRequest::from_json(const nlohmann::json& j) {
  if (!j.is_object()) bad_request("body must be a JSON object");
  EvaluationRequest r;
  try {
    if (!j.contains("model") || !j.at("model").is_object()) bad_request("missing model");
    r.model_name = j.at("model").value("name", "");
    if (r.model_name.empty()) bad_request("missing model.name");
    r.model_constraint = constraint_field(j.at("model"), "model");
    if (j.contains("framework") && j.at("framework").is_object()) {
      r.framework_name = j.at("framework").value("name", "");
      r.framework_constraint = constraint_field(j.at("framework"), "framework");
    }
    if (j.contains("hardware")) r.hardware = HardwareFilter::from_json(j.at("hardware"));
    if (j.contains("dataset") && !j.at("dataset").is_null()) {
      r.dataset = DatasetSelector{j.at("dataset").at("name").get<std::string>(),
                                  j.at("dataset").at("version").get<std::string>()};
    }
    for (const auto& in : j.value("inputs", nlohmann::json::array())) {
      RequestInput ri;
      ri.id = in.value("id", "input" + std::to_string(r.inputs.size()));
      if (in.contains("data")) ri.data = in.at("data").get<std::string>();
      if (in.contains("url")) ri.url = in.at("url").get<std::string>();
      if (in.contains("label") && !in.at("label").is_null()) ri.label = in.at("label").get<int64_t>();
      if (!ri.data && !ri.url) bad_request("input " + ri.id + " needs data or url");
      r.inputs.push_back(std::move(ri));
    }
    const std::string mode = j.value("dispatch_mode", "one");
    if (mode == "one") {
      r.mode = DispatchMode::kOne;
    } else if (mode == "all") {
      r.mode = DispatchMode::kAll;
    } else {
      bad_request("dispatch_mode must be one or all");
    }
    const auto level = parse_trace_level(j.value("trace_level", "none"));
    if (!level) bad_request("unknown trace_level");
    r.trace_level = *level;
    if (j.contains("overrides") && !j.at("overrides").is_null()) {
      for (const auto& [k, v] : j.at("overrides").items()) {
        r.overrides[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    r.top_k = j.value("top_k", 5);
    r.variant = j.value("variant", "");
  } catch (const nlohmann::json::exception& e) {
    bad_request(e.what());
  }
  if (r.top_k < 1) bad_request("top_k must be >= 1");
  if (!r.dataset && r.inputs.empty()) bad_request("needs a dataset or at least one inline input");
  return r;
}

std::string EvaluationRequest::inputs_digest() const {
  nlohmann::json j = to_json();
  return sha256_hex(nlohmann::json{{"dataset", j["dataset"]}, {"inputs", j["inputs"]}}.dump());
}

nlohmann::json AgentResult::to_json() const {
  nlohmann::json j = {{"evaluation_id", evaluation_id},
                      {"request", request.to_json()},
                      {"agent_id", agent_id},
                      {"model", named(model)},
                      {"framework", named(framework)},
                      {"hardware", evalscope::to_json(hardware)},
                      {"container", container},
                      {"state", to_string(state)},
                      {"error", error},
                      {"outputs", outputs},
                      {"trace", spans_to_json(trace)},
                      {"started_ms", started_ms},
                      {"finished_ms", finished_ms},
                      {"latency_ns", latency_ns},
                      {"cached", cached}};
  j["metrics"] = metrics ? evalscope::to_json(*metrics) : nlohmann::json(nullptr);
  return j;
}

AgentResult AgentResult::from_json(const nlohmann::json& j) {
  AgentResult r;
  try {
    r.evaluation_id = j.at("evaluation_id").get<std::string>();
    r.request = EvaluationRequest::from_json(j.at("request"));
    r.agent_id = j.at("agent_id").get<std::string>();
    r.model = named_from(j.at("model"));
    r.framework = named_from(j.at("framework"));
    r.hardware = hardware_from_json(j.at("hardware"));
    r.container = j.value("container", "");
    r.state = state_from(j.value("state", "done"));
    r.error = j.value("error", "");
    r.outputs = j.value("outputs", nlohmann::json::array());
    if (j.contains("metrics") && !j.at("metrics").is_null()) {
      const auto& m = j.at("metrics");
      r.metrics = AccuracyReport{m.at("n_samples").get<size_t>(), m.at("top1").get<double>(),
                                 m.at("top5").get<double>()};
    }
    r.trace = spans_from_json(j.value("trace", nlohmann::json::array()));
    r.started_ms = j.value("started_ms", int64_t{0});
    r.finished_ms = j.value("finished_ms", int64_t{0});
    r.latency_ns = j.value("latency_ns", uint64_t{0});
    r.cached = j.value("cached", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed agent result: ") + e.what());
  }
  return r;
}

nlohmann::json Evaluation::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : results) rs.push_back(r.to_json());
  return {{"evaluation_id", evaluation_id},
          {"request", request.to_json()},
          {"state", to_string(state)},
          {"reason", reason},
          {"results", std::move(rs)},
          {"cached", cached},
          {"cached_from", cached_from},
          {"submitted_ms", submitted_ms},
          {"updated_ms", updated_ms}};
}

Evaluation Evaluation::from_json(const nlohmann::json& j) {
  Evaluation e;
  try {
    e.evaluation_id = j.at("evaluation_id").get<std::string>();
    e.request = EvaluationRequest::from_json(j.at("request"));
    e.state = state_from(j.at("state").get<std::string>());
    e.reason = j.value("reason", "");
    for (const auto& r : j.value("results", nlohmann::json::array())) {
      e.results.push_back(AgentResult::from_json(r));
    }
    e.cached = j.value("cached", false);
    e.cached_from = j.value("cached_from", "");
    e.submitted_ms = j.value("submitted_ms", int64_t{0});
    e.updated_ms = j.value("updated_ms", int64_t{0});
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed evaluation: ") + ex.what());
  }
  return e;
}

}  // namespace evalscope
