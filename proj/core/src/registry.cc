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

#include "evalscope/registry.h"

#include <algorithm>
#include <chrono>
#include <regex>

#include "evalscope/error.h"
#include "evalscope/http.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

const std::set<std::string> kDeviceClasses = {"cpu", "gpu", "fpga"};

[[noreturn]] void bad_record(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, "malformed agent record: " + msg);
}

nlohmann::json versions_json(const std::vector<NamedVersion>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& nv : v) out.push_back({{"name", nv.name}, {"version", nv.version.to_string()}});
  return out;
}

std::vector<NamedVersion> versions_from_json(const nlohmann::json& j) {
  std::vector<NamedVersion> out;
  for (const auto& e : j) {
    auto v = SemVer::try_parse(e.at("version").get<std::string>());
    if (!v) bad_record("bad version " + e.at("version").dump());
    out.push_back(NamedVersion{e.at("name").get<std::string>(), *v});
  }
  return out;
}

bool any_version_matches(const std::vector<NamedVersion>& entries,
                         const std::optional<std::string>& name, const VersionConstraint& c) {
  if (!name && c.empty()) return true;
  return std::any_of(entries.begin(), entries.end(), [&](const NamedVersion& nv) {
    return (!name || names_equal(nv.name, *name)) && c.satisfied_by(nv.version);
  });
}

int64_t steady_millis() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

bool names_equal(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

nlohmann::json to_json(const HardwareSpec& h) {
  nlohmann::json j = {{"architecture", h.architecture},
                      {"device_classes", h.device_classes},
                      {"attributes", h.attributes}};
  j["interconnect"] = h.interconnect ? nlohmann::json(*h.interconnect) : nlohmann::json(nullptr);
  return j;
}

HardwareSpec hardware_from_json(const nlohmann::json& j) {
  HardwareSpec h;
  h.architecture = j.at("architecture").get<std::string>();
  if (j.contains("device_classes")) {
    h.device_classes = j.at("device_classes").get<std::set<std::string>>();
  }
  if (j.contains("interconnect") && !j.at("interconnect").is_null()) {
    h.interconnect = j.at("interconnect").get<std::string>();
  }
  if (j.contains("attributes")) {
    h.attributes = j.at("attributes").get<std::map<std::string, std::string>>();
  }
  return h;
}

nlohmann::json to_json(const AgentRecord& r) {
  return {{"agent_id", r.agent_id},
          {"address", r.address},
          {"hardware", to_json(r.hardware)},
          {"frameworks", versions_json(r.frameworks)},
          {"models", versions_json(r.models)},
          {"last_heartbeat_ms", r.last_heartbeat_ms}};
}

AgentRecord agent_record_from_json(const nlohmann::json& j) {
  AgentRecord r;
  try {
    r.agent_id = j.at("agent_id").get<std::string>();
    r.address = j.at("address").get<std::string>();
    r.hardware = hardware_from_json(j.at("hardware"));
    r.frameworks = versions_from_json(j.value("frameworks", nlohmann::json::array()));
    r.models = versions_from_json(j.value("models", nlohmann::json::array()));
    r.last_heartbeat_ms = j.value("last_heartbeat_ms", int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    bad_record(e.what());
  }
  check_agent_record(r);
  return r;
}

void check_agent_record(const AgentRecord& r) {
  if (r.agent_id.empty()) bad_record("empty agent_id");
  if (r.hardware.architecture.empty()) bad_record("empty architecture");
  static const std::regex addr(R"(^[A-Za-z0-9._\-]+:\d{1,5}$|^\[[0-9A-Fa-f:]+\]:\d{1,5}$)");
  if (!std::regex_match(r.address, addr)) bad_record("address '" + r.address + "' is not host:port");
  const int port = std::stoi(r.address.substr(r.address.rfind(':') + 1));
  if (port < 1 || port > 65535) bad_record("port out of range in '" + r.address + "'");
  for (const auto& d : r.hardware.device_classes) {
    if (!kDeviceClasses.count(d)) bad_record("unknown device class '" + d + "'");
  }
}

bool HardwareFilter::matches(const HardwareSpec& h) const {
  if (architecture && !names_equal(*architecture, h.architecture)) return false;
  if (device && !h.device_classes.count(*device)) return false;
  if (interconnect && (!h.interconnect || !names_equal(*interconnect, *h.interconnect))) {
    return false;
  }
  for (const auto& [k, v] : attributes) {
    auto it = h.attributes.find(k);
    if (it == h.attributes.end() || it->second != v) return false;
  }
  return true;
}

bool HardwareFilter::empty() const {
  return !architecture && !device && !interconnect && attributes.empty();
}

nlohmann::json HardwareFilter::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (architecture) j["architecture"] = *architecture;
  if (device) j["device"] = *device;
  if (interconnect) j["interconnect"] = *interconnect;
  if (!attributes.empty()) j["attributes"] = attributes;
  return j;
}

HardwareFilter HardwareFilter::from_json(const nlohmann::json& j) {
  HardwareFilter f;
  if (j.is_null()) return f;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "hardware filter must be an object");
  try {
    if (j.contains("architecture")) f.architecture = j.at("architecture").get<std::string>();
    if (j.contains("device")) f.device = j.at("device").get<std::string>();
    if (j.contains("interconnect")) f.interconnect = j.at("interconnect").get<std::string>();
    if (j.contains("attributes")) {
      f.attributes = j.at("attributes").get<std::map<std::string, std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("hardware filter: ") + e.what());
  }
  return f;
}

bool AgentQuery::matches(const AgentRecord& r) const {
  return any_version_matches(r.models, model_name, model_constraint) &&
         any_version_matches(r.frameworks, framework_name, framework_constraint) &&
         hardware.matches(r.hardware);
}

Registry::Registry(int64_t heartbeat_interval_ms, Clock clock)
    : interval_ms_(heartbeat_interval_ms), clock_(std::move(clock)) {
  if (interval_ms_ <= 0) throw Error(ErrorCode::kInvalidArgument, "heartbeat interval must be > 0");
  if (!clock_) clock_ = steady_millis;
}

void Registry::expire_locked() const {
  const int64_t now = clock_();
  std::erase_if(records_, [&](const auto& kv) { return now - kv.second.last_heartbeat_ms >= ttl_ms(); });
}

void Registry::publish(AgentRecord record) {
  check_agent_record(record);
  std::lock_guard lock(mu_);
  record.last_heartbeat_ms = clock_();
  records_[record.agent_id] = std::move(record);
}

void Registry::heartbeat(const std::string& agent_id) {
  std::lock_guard lock(mu_);
  expire_locked();
  auto it = records_.find(agent_id);
  if (it == records_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown agent '" + agent_id + "'; publish it first");
  }
  it->second.last_heartbeat_ms = clock_();
}

bool Registry::deregister(const std::string& agent_id) {
  std::lock_guard lock(mu_);
  return records_.erase(agent_id) > 0;
}

std::vector<AgentRecord> Registry::query(const AgentQuery& q) const {
  std::vector<AgentRecord> out;
  {
    std::lock_guard lock(mu_);
    expire_locked();
    for (const auto& [id, r] : records_) {
      if (q.matches(r)) out.push_back(r);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const AgentRecord& a, const AgentRecord& b) {
    return a.last_heartbeat_ms > b.last_heartbeat_ms;
  });
  return out;
}

std::vector<AgentRecord> Registry::all() const { return query(AgentQuery{}); }

void Registry::save_snapshot(const std::filesystem::path& path) const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : all()) j.push_back(to_json(r));
  write_file_atomic(path, j.dump(2));
}

void Registry::load_snapshot(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  auto j = nlohmann::json::parse(read_file_text(path), nullptr, false);
  if (!j.is_array()) throw Error(ErrorCode::kInvalidArgument, "registry snapshot is not a JSON array");
  for (const auto& e : j) publish(agent_record_from_json(e));
}

namespace {

AgentQuery query_from_params(const std::map<std::string, std::string>& p) {
  AgentQuery q;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = p.find(key);
    if (it == p.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  q.model_name = get("model");
  if (auto c = get("model_constraint")) q.model_constraint = VersionConstraint::parse(*c);
  q.framework_name = get("framework");
  if (auto c = get("framework_constraint")) q.framework_constraint = VersionConstraint::parse(*c);
  q.hardware.architecture = get("arch");
  q.hardware.device = get("device");
  q.hardware.interconnect = get("interconnect");
  return q;
}

std::string query_string(const AgentQuery& q) {
  std::vector<std::pair<std::string, std::string>> params;
  if (q.model_name) params.emplace_back("model", *q.model_name);
  if (!q.model_constraint.empty()) params.emplace_back("model_constraint", q.model_constraint.to_string());
  if (q.framework_name) params.emplace_back("framework", *q.framework_name);
  if (!q.framework_constraint.empty()) {
    params.emplace_back("framework_constraint", q.framework_constraint.to_string());
  }
  if (q.hardware.architecture) params.emplace_back("arch", *q.hardware.architecture);
  if (q.hardware.device) params.emplace_back("device", *q.hardware.device);
  if (q.hardware.interconnect) params.emplace_back("interconnect", *q.hardware.interconnect);
  std::string out;
  for (const auto& [k, v] : params) out += (out.empty() ? "?" : "&") + k + "=" + url_encode(v);
  return out;
}

nlohmann::json parse_body(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "request body is not JSON");
  return j;
}

}  // namespace

void mount_registry_routes(HttpServer& server, Registry& registry) {
  server.route("POST", "/agents", [&registry](const HttpRequest& req) {
    AgentRecord r = agent_record_from_json(parse_body(req.body));
    registry.publish(r);
    return json_response({{"agent_id", r.agent_id}, {"status", "published"}});
  });
  server.route("POST", "/agents/([^/]+)/heartbeat", [&registry](const HttpRequest& req) {
    registry.heartbeat(req.captures.at(0));
    return json_response({{"agent_id", req.captures.at(0)}, {"status", "ok"}});
  });
  server.route("DELETE", "/agents/([^/]+)", [&registry](const HttpRequest& req) {
    if (!registry.deregister(req.captures.at(0))) {
      throw Error(ErrorCode::kNotFound, "unknown agent '" + req.captures.at(0) + "'");
    }
    return json_response({{"agent_id", req.captures.at(0)}, {"status", "deregistered"}});
  });
  server.route("GET", "/agents", [&registry](const HttpRequest& req) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : registry.query(query_from_params(req.params))) out.push_back(to_json(r));
    return json_response(out);
  });
  server.route("GET", "/health", [](const HttpRequest&) { return json_response({{"status", "ok"}}); });
}

RegistryClient::RegistryClient(std::string base_url, int timeout_ms)
    : base_(std::move(base_url)), timeout_ms_(timeout_ms) {
  while (!base_.empty() && base_.back() == '/') base_.pop_back();
}

void RegistryClient::publish(const AgentRecord& r) {
  expect_json(http_request("POST", base_, "/agents", to_json(r).dump(), timeout_ms_));
}

void RegistryClient::heartbeat(const std::string& agent_id) {
  expect_json(http_request("POST", base_, "/agents/" + url_encode(agent_id) + "/heartbeat", "{}",
                           timeout_ms_));
}

void RegistryClient::deregister(const std::string& agent_id) {
  expect_json(http_request("DELETE", base_, "/agents/" + url_encode(agent_id), "", timeout_ms_));
}

std::vector<AgentRecord> RegistryClient::query(const AgentQuery& q) {
  auto j = expect_json(http_request("GET", base_, "/agents" + query_string(q), "", timeout_ms_));
  std::vector<AgentRecord> out;
  for (const auto& e : j) out.push_back(agent_record_from_json(e));
  return out;
}

}  // namespace evalscope
