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

// evalscope: command-line front end for manifests, local evaluation, the
// registry / orchestrator / agent services and the pitfall demos.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evalscope/agent.h"
#include "evalscope/error.h"
#include "evalscope/http.h"
#include "evalscope/manifest.h"
#include "evalscope/orchestrator.h"
#include "evalscope/pitfalls.h"
#include "evalscope/predictor.h"
#include "evalscope/registry.h"
#include "evalscope/tracing.h"
#include "evalscope/util.h"
#include "serve_config.h"

namespace fs = std::filesystem;
using evalscope::Error;
using evalscope::ErrorCode;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

json error_json(const Error& e) {
  return {{"error", {{"code", evalscope::error_code_name(e.code())}, {"message", e.what()}}}};
}

int manifest_validate(const fs::path& file) {
  if (!fs::is_regular_file(file)) {
    std::cerr << "evalscope: no such file: " << file.string() << "\n";
    return kExitUsage;
  }
  json out;
  try {
    evalscope::ModelManifest m = evalscope::parse_manifest(evalscope::read_file_text(file));
    out = evalscope::validate_manifest(m).to_json();
  } catch (const evalscope::SyntaxError& e) {
    out = {{"valid", false},
           {"errors", 1},
           {"warnings", 0},
           {"violations",
            {{{"path", ""},
              {"severity", "error"},
              {"line", e.line()},
              {"column", e.column()},
              {"message", e.what()}}}}};
  } catch (const evalscope::SchemaError& e) {
    out = {{"valid", false},
           {"errors", 1},
           {"warnings", 0},
           {"violations", {{{"path", e.path()}, {"severity", "error"}, {"message", e.what()}}}}};
  }
  std::cout << out.dump(2) << "\n";
  return out["valid"].get<bool>() ? kExitOk : kExitFailed;
}

int manifest_format(const fs::path& file) {
  if (!fs::is_regular_file(file)) {
    std::cerr << "evalscope: no such file: " << file.string() << "\n";
    return kExitUsage;
  }
  std::cout << evalscope::serialize_manifest(
      evalscope::parse_manifest(evalscope::read_file_text(file)));
  return kExitOk;
}

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> inputs;
  std::vector<int64_t> labels;
  std::vector<std::string> overrides;
  std::string trace_level = "none";
  int top_k = 5;
  std::string jpeg_decoder = evalscope::kDefaultJpegDecoder;
  std::string cache_dir;
  std::string device = "cpu";
  std::string architecture = "amd64";
};

int evaluate(const EvaluateArgs& a) {
  if (!fs::is_regular_file(a.manifest)) {
    std::cerr << "evalscope: no such file: " << a.manifest << "\n";
    return kExitUsage;
  }
  if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
    std::cerr << "evalscope: --label must be given once per --input\n";
    return kExitUsage;
  }
  evalscope::RunOptions opts;
  auto level = evalscope::parse_trace_level(a.trace_level);
  if (!level) {
    std::cerr << "evalscope: unknown trace level: " << a.trace_level << "\n";
    return kExitUsage;
  }
  opts.trace_level = *level;
  opts.top_k = a.top_k;
  opts.jpeg_decoder = a.jpeg_decoder;
  for (const auto& kv : a.overrides) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "evalscope: override must be key=value: " << kv << "\n";
      return kExitUsage;
    }
    opts.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  std::vector<evalscope::EvalInput> inputs;
  for (size_t i = 0; i < a.inputs.size(); ++i) {
    evalscope::EvalInput in;
    in.id = fs::path(a.inputs[i]).filename().string();
    in.data = evalscope::read_file_bytes(a.inputs[i]);
    if (!a.labels.empty()) in.label = a.labels[i];
    inputs.push_back(std::move(in));
  }

  evalscope::ModelManifest m = evalscope::parse_manifest(evalscope::read_file_text(a.manifest));
  fs::path cache_dir = a.cache_dir.empty() ? fs::temp_directory_path() / "evalscope-cache"
                                           : fs::path(a.cache_dir);
  evalscope::AssetCache cache(cache_dir);
  evalscope::LoadOptions load;
  load.architecture = a.architecture;
  load.device = a.device;
  load.manifest_dir = fs::absolute(a.manifest).parent_path();
  auto session = evalscope::load_model(m, evalscope::BackendRegistry::with_defaults(), cache, load);
  evalscope::RunResult run = evalscope::run_evaluation(*session, inputs, opts);

  json out = run.to_json();
  out["model"] = {{"name", m.name}, {"version", m.version.to_string()}};
  out["session"] = session->describe();
  out["overrides"] = opts.overrides;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

void write_port_file(const fs::path& path, int port) {
  if (!path.empty()) evalscope::write_file_atomic(path, std::to_string(port) + "\n");
}

int serve_registry(const fs::path& config_file) {
  auto cfg = evalscope::cli::ServeConfig::load(
      config_file, {"host", "port", "port_file", "heartbeat_interval_ms", "snapshot"});
  evalscope::Registry registry(cfg.integer("heartbeat_interval_ms", 1000));
  fs::path snapshot = cfg.path("snapshot");
  if (!snapshot.empty() && fs::exists(snapshot)) registry.load_snapshot(snapshot);

  evalscope::HttpServer server;
  evalscope::mount_registry_routes(server, registry);
  int port = server.start(cfg.str("host", "127.0.0.1"), static_cast<int>(cfg.integer("port", 0)));
  write_port_file(cfg.path("port_file"), port);
  std::cerr << "registry listening on port " << port << "\n";
  wait_for_signal();
  server.stop();
  if (!snapshot.empty()) registry.save_snapshot(snapshot);
  return kExitOk;
}

int serve_orchestrator(const fs::path& config_file) {
  auto cfg = evalscope::cli::ServeConfig::load(
      config_file, {"host", "port", "port_file", "registry_url", "state_dir", "manifests_dir",
                    "datasets_dir", "dispatch_timeout_ms"});
  std::string registry_url = cfg.str("registry_url");
  if (registry_url.empty()) throw Error(ErrorCode::kInvalidArgument, "registry_url is required");
  evalscope::OrchestratorConfig oc;
  oc.state_dir = cfg.path("state_dir");
  oc.manifests_dir = cfg.path("manifests_dir");
  oc.datasets_dir = cfg.path("datasets_dir");
  oc.dispatch_timeout_ms = cfg.integer("dispatch_timeout_ms", oc.dispatch_timeout_ms);
  evalscope::Orchestrator orchestrator(oc, std::make_shared<evalscope::RegistryClient>(registry_url),
                                       std::make_shared<evalscope::HttpAgentDispatcher>());

  evalscope::HttpServer server;
  orchestrator.mount(server);
  int port = server.start(cfg.str("host", "127.0.0.1"), static_cast<int>(cfg.integer("port", 0)));
  write_port_file(cfg.path("port_file"), port);
  std::cerr << "orchestrator listening on port " << port << "\n";
  wait_for_signal();
  server.stop();
  orchestrator.shutdown();
  return kExitOk;
}

int serve_agent(const fs::path& config_file) {
  auto cfg = evalscope::cli::ServeConfig::load(
      config_file,
      {"host", "port", "port_file", "registry_url", "heartbeat_interval_ms", "agent_id",
       "advertise_host", "architecture", "devices", "interconnect", "device", "framework_name",
       "framework_version", "manifests", "cache_dir", "jpeg_decoder", "queue_depth",
       "artificial_delay_ms"});
  evalscope::AgentConfig ac;
  ac.agent_id = cfg.str("agent_id");
  ac.host = cfg.str("host", ac.host);
  ac.advertise_host = cfg.str("advertise_host", ac.host);
  ac.registry_url = cfg.str("registry_url");
  ac.heartbeat_interval_ms = cfg.integer("heartbeat_interval_ms", ac.heartbeat_interval_ms);
  ac.hardware.architecture = cfg.str("architecture", ac.hardware.architecture);
  if (cfg.has("devices")) {
    auto devices = cfg.list("devices");
    ac.hardware.device_classes = {devices.begin(), devices.end()};
  }
  if (cfg.has("interconnect")) ac.hardware.interconnect = cfg.str("interconnect");
  ac.device = cfg.str("device", ac.device);
  std::string fw_name = cfg.str("framework_name");
  std::string fw_version = cfg.str("framework_version");
  if (fw_name.empty() || fw_version.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "framework_name and framework_version are required");
  }
  ac.framework = {fw_name, evalscope::SemVer::parse(fw_version)};
  ac.manifests = cfg.paths("manifests");
  if (cfg.has("cache_dir")) ac.cache_dir = cfg.path("cache_dir");
  ac.jpeg_decoder = cfg.str("jpeg_decoder", ac.jpeg_decoder);
  ac.queue_depth = static_cast<int>(cfg.integer("queue_depth", ac.queue_depth));
  ac.artificial_delay_ms = cfg.integer("artificial_delay_ms", 0);

  evalscope::Agent agent(ac, evalscope::BackendRegistry::with_defaults());
  evalscope::HttpServer server;
  agent.mount(server);
  int port = server.start(ac.host, static_cast<int>(cfg.integer("port", 0)));
  agent.start_heartbeats(port);
  write_port_file(cfg.path("port_file"), port);
  std::cerr << "agent " << agent.config().agent_id << " listening on port " << port << "\n";
  wait_for_signal();
  agent.shutdown();
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evalscope: model evaluation toolkit"};
  app.require_subcommand(1);

  auto* manifest = app.add_subcommand("manifest", "Inspect model manifests");
  manifest->require_subcommand(1);
  std::string manifest_file;
  auto* validate = manifest->add_subcommand("validate", "Validate a manifest and print a JSON report");
  validate->add_option("file", manifest_file, "Manifest path")->required();
  auto* format = manifest->add_subcommand("format", "Print the canonical form of a manifest");
  format->add_option("file", manifest_file, "Manifest path")->required();

  EvaluateArgs eval_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a model locally over input images");
  evaluate_cmd->add_option("--manifest", eval_args.manifest, "Manifest path")->required();
  evaluate_cmd->add_option("--input", eval_args.inputs, "Input image (repeatable)")->required();
  evaluate_cmd->add_option("--label", eval_args.labels, "Ground-truth class per input");
  evaluate_cmd->add_option("--override", eval_args.overrides, "Pipeline override key=value");
  evaluate_cmd->add_option("--trace-level", eval_args.trace_level, "Trace level name or 0-6");
  evaluate_cmd->add_option("--top-k", eval_args.top_k, "Predictions per input")
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--jpeg-decoder", eval_args.jpeg_decoder, "libjpeg or libjpeg-box");
  evaluate_cmd->add_option("--cache-dir", eval_args.cache_dir, "Asset cache directory");
  evaluate_cmd->add_option("--device", eval_args.device, "Device class");
  evaluate_cmd->add_option("--architecture", eval_args.architecture, "CPU architecture");

  auto* serve = app.add_subcommand("serve", "Run a service");
  serve->require_subcommand(1);
  std::string config_file;
  auto* serve_reg = serve->add_subcommand("registry", "Agent registry");
  auto* serve_orch = serve->add_subcommand("orchestrator", "Evaluation orchestrator");
  auto* serve_agent_cmd = serve->add_subcommand("agent", "Predictor agent");
  for (auto* sub : {serve_reg, serve_orch, serve_agent_cmd}) {
    sub->add_option("--config", config_file, "YAML config file")->required();
  }

  auto* pitfall = app.add_subcommand("pitfall", "Preprocessing pitfall demonstrations");
  pitfall->require_subcommand(1);
  std::string pitfall_name;
  auto* demo = pitfall->add_subcommand("demo", "Run one pitfall demo");
  demo->add_option("name", pitfall_name, "Pitfall name")
      ->required()
      ->check(CLI::IsMember(evalscope::pitfall_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  bool serving = serve->parsed();
  try {
    if (validate->parsed()) return manifest_validate(manifest_file);
    if (format->parsed()) return manifest_format(manifest_file);
    if (evaluate_cmd->parsed()) return evaluate(eval_args);
    if (serve_reg->parsed()) return serve_registry(config_file);
    if (serve_orch->parsed()) return serve_orchestrator(config_file);
    if (serve_agent_cmd->parsed()) return serve_agent(config_file);
    if (demo->parsed()) {
      std::cout << evalscope::run_pitfall_demo(pitfall_name).dump(2) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << "\n";
    // A service that cannot start because of its configuration is a usage error.
    return serving ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "evalscope: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
