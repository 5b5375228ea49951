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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/semver.h"

namespace evalscope {

class HttpServer;

struct HardwareSpec {
  std::string architecture;
  std::set<std::string> device_classes;  // cpu, gpu, fpga
  std::optional<std::string> interconnect;
  std::map<std::string, std::string> attributes;
  bool operator==(const HardwareSpec&) const = default;
};

struct NamedVersion {
  std::string name;
  SemVer version;
  bool operator==(const NamedVersion&) const = default;
};

struct AgentRecord {
  std::string agent_id;
  std::string address;  // host:port
  HardwareSpec hardware;
  std::vector<NamedVersion> frameworks;
  std::vector<NamedVersion> models;
  int64_t last_heartbeat_ms = 0;  // registry clock
  bool operator==(const AgentRecord&) const = default;
};

nlohmann::json to_json(const HardwareSpec& h);
HardwareSpec hardware_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgentRecord& r);
/// Throws Error(kInvalidArgument) for malformed records.
AgentRecord agent_record_from_json(const nlohmann::json& j);
/// Throws Error(kInvalidArgument): empty id, empty architecture, an address
/// that is not host:port, unknown device classes.
void check_agent_record(const AgentRecord& r);

struct HardwareFilter {
  std::optional<std::string> architecture;
  std::optional<std::string> device;
  std::optional<std::string> interconnect;
  std::map<std::string, std::string> attributes;

  bool matches(const HardwareSpec& h) const;
  bool empty() const;
  nlohmann::json to_json() const;
  static HardwareFilter from_json(const nlohmann::json& j);
  bool operator==(const HardwareFilter&) const = default;
};

/// Unset names match anything. Names compare case-insensitively; a
/// constraint applies to the entry with the matching name, or to any entry
/// when the name is unset.
struct AgentQuery {
  std::optional<std::string> model_name;
  VersionConstraint model_constraint;
  std::optional<std::string> framework_name;
  VersionConstraint framework_constraint;
  HardwareFilter hardware;

  bool matches(const AgentRecord& r) const;
};

bool names_equal(std::string_view a, std::string_view b);

/// Capability registry with heartbeat liveness. A record whose last
/// heartbeat is 3 intervals old or older is expired and removed.
class Registry {
 public:
  /// Monotonic milliseconds; injectable for tests.
  using Clock = std::function<int64_t()>;

  explicit Registry(int64_t heartbeat_interval_ms = 1000, Clock clock = {});

  /// Replaces any record with the same id. Stamps the heartbeat.
  void publish(AgentRecord record);
  /// Throws Error(kNotFound) for unknown or expired ids.
  void heartbeat(const std::string& agent_id);
  bool deregister(const std::string& agent_id);
  /// Live records satisfying `q`, most recent heartbeat first (ties by id).
  std::vector<AgentRecord> query(const AgentQuery& q) const;
  std::vector<AgentRecord> all() const;

  int64_t heartbeat_interval_ms() const { return interval_ms_; }
  int64_t ttl_ms() const { return 3 * interval_ms_; }

  void save_snapshot(const std::filesystem::path& path) const;
  /// Restored records get a fresh heartbeat so agents have one TTL to
  /// re-publish.
  void load_snapshot(const std::filesystem::path& path);

 private:
  void expire_locked() const;

  int64_t interval_ms_;
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::map<std::string, AgentRecord> records_;
};

/// POST /agents, POST /agents/{id}/heartbeat, DELETE /agents/{id},
/// GET /agents?model=&model_constraint=&framework=&framework_constraint=
/// &arch=&device=&interconnect=.
void mount_registry_routes(HttpServer& server, Registry& registry);

/// Read side used by the orchestrator.
class RegistryView {
 public:
  virtual ~RegistryView() = default;
  virtual std::vector<AgentRecord> query(const AgentQuery& q) = 0;
};

class LocalRegistryView : public RegistryView {
 public:
  explicit LocalRegistryView(const Registry& r) : registry_(r) {}
  std::vector<AgentRecord> query(const AgentQuery& q) override { return registry_.query(q); }

 private:
  const Registry& registry_;
};

class RegistryClient : public RegistryView {
 public:
  explicit RegistryClient(std::string base_url, int timeout_ms = 5000);

  void publish(const AgentRecord& r);
  void heartbeat(const std::string& agent_id);
  void deregister(const std::string& agent_id);
  std::vector<AgentRecord> query(const AgentQuery& q) override;

 private:
  std::string base_;
  int timeout_ms_;
};

}  // namespace evalscope
