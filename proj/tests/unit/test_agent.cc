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

#include <gtest/gtest.h>

#include <future>
#include <set>
#include <thread>

#include "evalscope/agent.h"
#include "evalscope/codec.h"
#include "evalscope/error.h"
#include "evalscope/fixtures.h"
#include "evalscope/http.h"
#include "evalscope/registry.h"
#include "evalscope/util.h"
#include "temp_dir.h"

namespace evalscope {
namespace {

namespace fs = std::filesystem;

const fs::path kColorNet = fs::path(EVALSCOPE_SOURCE_DIR) / "data" / "colornet";

std::vector<EvalInput> red_blue_inputs() {
  std::vector<EvalInput> out;
  for (const auto& f : red_blue_fixtures()) out.push_back({f.id, encode_png(f.image), f.label});
  return out;
}

AgentConfig config(const testing::TempDir& tmp, const std::string& fw = "1.13.0") {
  AgentConfig c;
  c.agent_id = "agent-" + fw;
  c.framework = {"TensorFlow", SemVer::parse(fw)};
  c.manifests = {kColorNet / "colornet.yml"};
  c.cache_dir = tmp / "cache";
  return c;
}

TEST(RunEvaluation, ClassifiesFixturesWithMetrics) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  RunOptions opts;
  opts.top_k = 2;
  RunResult r = run_evaluation(*session, red_blue_inputs(), opts);
  ASSERT_EQ(r.results.size(), 8u);
  for (const auto& in : r.results) ASSERT_EQ(in.predictions.size(), 2u);
  ASSERT_TRUE(r.metrics.has_value());
  EXPECT_EQ(r.metrics->n_samples, 8u);
  EXPECT_DOUBLE_EQ(r.metrics->top1, 1.0);
  EXPECT_TRUE(r.trace.empty());
  auto j = r.to_json();
  EXPECT_FALSE(j.contains("trace"));
  EXPECT_EQ(j["results"][0]["provenance"]["steps"][0]["kind"], "decode");
}

TEST(RunEvaluation, TopKIsCappedAtClassCount) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  RunOptions opts;
  opts.top_k = 10;
  auto r = run_evaluation(*session, {red_blue_inputs()[0]}, opts);
  EXPECT_EQ(r.results[0].predictions.size(), 4u);
  EXPECT_FALSE(r.metrics.has_value() && r.metrics->n_samples == 0);
}

TEST(RunEvaluation, TraceLevelsNest) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  RunOptions opts;
  opts.trace_level = TraceLevel::kLibrary;
  auto r = run_evaluation(*session, {red_blue_inputs()[0]}, opts);
  std::set<std::string> names;
  std::set<TraceLevel> levels;
  for (const auto& s : r.trace) {
    names.insert(s.name);
    levels.insert(s.level);
  }
  for (const char* n : {"evaluate", "ColorNet", "preprocess", "predict", "features", "fc", "gemv",
                        "softmax"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
  EXPECT_FALSE(levels.count(TraceLevel::kHardware));
  auto summary = summarize(r.trace);
  EXPECT_GT(summary.total_ns, 0u);
  EXPECT_TRUE(r.to_json().contains("summary"));

  opts.trace_level = TraceLevel::kModel;
  auto coarse = run_evaluation(*session, {red_blue_inputs()[0]}, opts);
  for (const auto& s : coarse.trace) EXPECT_LE(static_cast<int>(s.level), 2);
}

TEST(RunEvaluation, InputErrorsNameTheInput) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  std::vector<EvalInput> inputs = {{"broken", {1, 2, 3}, std::nullopt}};
  try {
    run_evaluation(*session, inputs, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("input broken: ", 0), 0u) << e.what();
  }
}

TEST(Agent, RefusesManifestsItCannotRun) {
  testing::TempDir tmp;
  EXPECT_THROW(Agent(config(tmp, "1.9.0"), BackendRegistry::with_defaults()), Error);
  EXPECT_NO_THROW(Agent(config(tmp, "2.0.0"), BackendRegistry::with_defaults()));
  EXPECT_NO_THROW(Agent(config(tmp, "1.13.0"), BackendRegistry::with_defaults()));
}

TEST(Agent, PredictByModelReference) {
  testing::TempDir tmp;
  Agent agent(config(tmp), BackendRegistry::with_defaults());
  nlohmann::json req = {{"model", {{"name", "colornet"}}},
                        {"inputs", nlohmann::json::array()},
                        {"top_k", 1}};
  for (const auto& in : red_blue_inputs()) {
    req["inputs"].push_back({{"id", in.id}, {"data", base64_encode(in.data)}, {"label", *in.label}});
  }
  auto out = agent.handle_predict(req);
  EXPECT_EQ(out["agent_id"], "agent-1.13.0");
  EXPECT_EQ(out["framework"]["version"], "1.13.0");
  EXPECT_EQ(out["container"], "evalscope/reference:1.0.0-amd64-cpu");
  EXPECT_EQ(out["metrics"]["top1"], 1.0);
  EXPECT_EQ(out["results"].size(), 8u);
  EXPECT_EQ(agent.predict_calls(), 1u);

  nlohmann::json bgr = req;
  bgr["overrides"] = {{"decode.color_layout", "BGR"}};
  auto flipped = agent.handle_predict(bgr);
  EXPECT_EQ(flipped["metrics"]["top1"], 0.0);
  EXPECT_EQ(flipped["results"][0]["predictions"][0]["label"], "blue-dominant");

  EXPECT_THROW(agent.handle_predict({{"model", {{"name", "Other"}}}}), Error);
  EXPECT_THROW(agent.handle_predict({{"inputs", nlohmann::json::array()}}), Error);
}

TEST(Agent, PredictWithManifestTextAndFileUrl) {
  testing::TempDir tmp;
  Agent agent(config(tmp), BackendRegistry::with_defaults());
  write_file_atomic(tmp / "red.png",
                    std::string_view(reinterpret_cast<const char*>(red_blue_inputs()[0].data.data()),
                                     red_blue_inputs()[0].data.size()));
  nlohmann::json req = {{"manifest", read_file_text(kColorNet / "colornet.yml")},
                        {"inputs", {{{"id", "red"}, {"url", "file://" + (tmp / "red.png").string()}}}}};
  auto out = agent.handle_predict(req);
  EXPECT_EQ(out["results"][0]["predictions"][0]["label"], "red-dominant");
  EXPECT_FALSE(out.contains("metrics"));
}

TEST(Agent, QueueDepthBoundsConcurrentRuns) {
  testing::TempDir tmp;
  auto cfg = config(tmp);
  cfg.artificial_delay_ms = 100;
  cfg.queue_depth = 1;
  Agent agent(cfg, BackendRegistry::with_defaults());
  nlohmann::json req = {{"model", {{"name", "ColorNet"}}},
                        {"inputs", {{{"id", "r"}, {"data", base64_encode(red_blue_inputs()[0].data)}}}}};
  agent.handle_predict(req);  // warm the session
  const auto start = std::chrono::steady_clock::now();
  auto a = std::async(std::launch::async, [&] { return agent.handle_predict(req); });
  auto b = std::async(std::launch::async, [&] { return agent.handle_predict(req); });
  a.get();
  b.get();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_GE(elapsed, std::chrono::milliseconds(200));
  EXPECT_EQ(agent.stats()["predict_calls"], 3);
}

TEST(Agent, HttpAndHeartbeats) {
  testing::TempDir tmp;
  Registry registry(100);
  HttpServer reg_server;
  mount_registry_routes(reg_server, registry);
  const int reg_port = reg_server.start("127.0.0.1", 0);

  auto cfg = config(tmp);
  cfg.registry_url = "http://127.0.0.1:" + std::to_string(reg_port);
  cfg.heartbeat_interval_ms = 100;
  Agent agent(cfg, BackendRegistry::with_defaults());
  HttpServer server;
  agent.mount(server);
  const int port = server.start("127.0.0.1", 0);
  agent.start_heartbeats(port);

  bool seen = false;
  for (int i = 0; i < 100 && !seen; ++i) {
    seen = !registry.all().empty();
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(seen);
  // Survives several TTLs because heartbeats keep it alive.
  std::this_thread::sleep_for(std::chrono::milliseconds(700));
  ASSERT_EQ(registry.all().size(), 1u);
  EXPECT_EQ(registry.all()[0].address, "127.0.0.1:" + std::to_string(port));

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  nlohmann::json req = {{"model", {{"name", "ColorNet"}, {"version", "1.0.0"}}},
                        {"inputs", {{{"id", "r"}, {"data", base64_encode(red_blue_inputs()[0].data)}}}}};
  auto resp = http_request("POST", base, "/predict", req.dump());
  ASSERT_EQ(resp.status, 200) << resp.body;
  EXPECT_EQ(expect_json(http_request("GET", base, "/stats"))["predict_calls"], 1);
  EXPECT_EQ(http_request("POST", base, "/predict", "{\"model\": 3}").status, 400);

  agent.shutdown();
  EXPECT_TRUE(registry.all().empty());
  server.stop();
  reg_server.stop();
}

}  // namespace
}  // namespace evalscope
