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

// Runs each acceptance criterion and prints one PASS/FAIL line per
// criterion. Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/agent.h"
#include "evalscope/codec.h"
#include "evalscope/fixtures.h"
#include "evalscope/http.h"
#include "evalscope/manifest.h"
#include "evalscope/pipeline.h"
#include "evalscope/pitfalls.h"
#include "evalscope/semver.h"
#include "evalscope/tracing.h"
#include "evalscope/util.h"
#include "oracles.h"
#include "process.h"
#include "temp_dir.h"

namespace fs = std::filesystem;
using namespace evalscope;
using evalscope::testing::ChildProcess;
using evalscope::testing::TempDir;

namespace {

const fs::path kData = EVALSCOPE_TEST_DATA_DIR;
const fs::path kColorNet = fs::path(EVALSCOPE_SOURCE_DIR) / "data" / "colornet" / "colornet.yml";
const std::string kCli = EVALSCOPE_CLI_PATH;

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

std::vector<float> random_floats(std::mt19937& rng, size_t n) {
  std::uniform_real_distribution<float> d(-1000.0f, 1000.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<EvalInput> as_inputs(const std::vector<FixtureImage>& images) {
  std::vector<EvalInput> out;
  for (const auto& f : images) out.push_back({f.id, encode_png(f.image), f.label});
  return out;
}

std::vector<std::string> top1_labels(const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& in : r.results) out.push_back(in.predictions.front().label);
  return out;
}

RunResult evaluate(const std::vector<EvalInput>& inputs, const PipelineOverrides& overrides = {}) {
  auto session = reference_session(parse_manifest(read_file_text(kColorNet)));
  RunOptions opts;
  opts.overrides = overrides;
  return run_evaluation(*session, inputs, opts);
}

// ---------------------------------------------------------------------------

std::string manifest_conformance() {
  int checked = 0;
  for (const std::string name : {"inception_v3", "ssd_mobilenet_v1_coco",
                                 "mask_rcnn_resnet50_v2_atrous_coco"}) {
    ModelManifest m = parse_manifest(read_file_text(kData / "manifests" / (name + ".yml")));
    const std::string canonical = serialize_manifest(m);
    require(canonical == read_file_text(kData / "golden" / (name + ".canonical.yml")),
            name + ": canonical form differs from golden");
    auto golden = nlohmann::json::parse(read_file_text(kData / "golden" / (name + ".report.json")));
    require(validate_manifest(m).to_json() == golden, name + ": validation report differs");
    require(!validate_manifest(m).has_errors(), name + ": has errors");
    ModelManifest again = parse_manifest(canonical);
    require(serialize_manifest(again) == canonical, name + ": round trip is not stable");
    require(again.inputs.size() == m.inputs.size(), name + ": input count changed");
    for (size_t i = 0; i < m.inputs.size(); ++i) {
      require(again.inputs[i].processing == m.inputs[i].processing, name + ": step order changed");
    }
    ++checked;
  }
  return std::to_string(checked) + " manifests";
}

std::string constraint_engine() {
  size_t cases = 0;
  for (const auto& text : testing::truth_table_constraints()) {
    const VersionConstraint c = VersionConstraint::parse(text);
    for (const auto& v : testing::truth_table_versions()) {
      const bool got = c.satisfied_by(SemVer{v.major, v.minor, v.patch, ""});
      require(got == testing::constraint_oracle(text, v),
              text + " disagrees at " + std::to_string(v.major) + "." + std::to_string(v.minor) +
                  "." + std::to_string(v.patch));
      ++cases;
    }
  }
  return std::to_string(cases) + " cases agree";
}

std::string pipeline_oracles() {
  std::mt19937 rng(20260101);
  std::uniform_int_distribution<int> side(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = side(rng), w = side(rng), oh = side(rng), ow = side(rng);
    auto px = random_floats(rng, static_cast<size_t>(h) * w * 3);
    const ImageBuffer out = resize_bilinear(ImageBuffer::from_floats(w, h, 3, ColorLayout::kRGB, px), oh, ow);
    const auto got = out.floats();
    auto expect = testing::bilinear_oracle(px, h, w, 3, oh, ow);
    require(got.size() == expect.size() &&
                std::memcmp(got.data(), expect.data(), got.size() * sizeof(float)) == 0,
            "resize differs on trial " + std::to_string(trial));
  }
  int windows = 0;
  for (double p : {50.0, 87.5, 100.0}) {
    for (int w = 1; w <= 32; ++w) {
      for (int h = 1; h <= 32; ++h) {
        auto ref = testing::crop_window_oracle(w, h, p);
        if (ref.width == 0 || ref.height == 0) continue;
        require(center_crop_window(w, h, p) == CropWindow{ref.x, ref.y, ref.width, ref.height},
                "crop window " + std::to_string(w) + "x" + std::to_string(h));
        ++windows;
      }
    }
  }
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = side(rng), h = side(rng), c = side(rng) % 4 + 1;
    std::vector<uint8_t> bytes(static_cast<size_t>(w) * h * 3);
    for (auto& b : bytes) b = static_cast<uint8_t>(byte(rng));
    ImageBuffer img = ImageBuffer::from_bytes(w, h, 3, ColorLayout::kRGB, bytes);
    require(convert_color_layout(convert_color_layout(img, ColorLayout::kBGR), ColorLayout::kRGB) == img,
            "color swap is not an involution");
    Tensor t = Tensor::of_floats({1, h, w, c}, random_floats(rng, static_cast<size_t>(w) * h * c),
                                 DataLayout::kNHWC);
    require(to_layout(to_layout(t, DataLayout::kNCHW), DataLayout::kNHWC) == t,
            "NHWC/NCHW transpose is not an involution");
  }
  return "1000 resizes, " + std::to_string(windows) + " crop windows, 2x1000 involutions";
}

std::string normalization_order() {
  // Frozen golden, derived from the double-precision oracle.
  constexpr double kMaxAbsDiff = 1.0;
  constexpr int kArgmax = 255;
  constexpr int kDiffering = 255;
  constexpr double kSum = 16256.5 / 127.5;
  const auto o = testing::normalization_oracle(127.5, 127.5);
  require(o.max_abs_diff == kMaxAbsDiff && o.argmax_value == kArgmax &&
              o.differing_values == kDiffering && std::abs(o.sum_abs_diff - kSum) < 1e-12,
          "oracle drifted from the frozen golden");
  const NormalizationDiff d = normalization_order_diff(127.5, 127.5);
  require(d.max_abs_diff == kMaxAbsDiff, "max_abs_diff " + std::to_string(d.max_abs_diff));
  require(d.argmax_value == kArgmax, "argmax " + std::to_string(d.argmax_value));
  require(d.differing_values == kDiffering, "differing " + std::to_string(d.differing_values));
  require(std::abs(d.sum_abs_diff - kSum) < 1e-4, "sum " + std::to_string(d.sum_abs_diff));
  require(d.max_abs_diff > 0.0, "no difference");
  return "max_abs_diff=1 at 255, 255 values differ";
}

std::string layout_pitfalls() {
  const auto fixtures = red_blue_fixtures();
  const auto inputs = as_inputs(fixtures);
  const auto base = top1_labels(evaluate(inputs));
  const auto bgr = top1_labels(evaluate(inputs, {{"decode.color_layout", "BGR"}}));
  const auto nchw = top1_labels(evaluate(inputs, {{"decode.data_layout", "NCHW"}}));
  for (size_t i = 0; i < base.size(); ++i) {
    require(base[i] == (fixtures[i].label == 0 ? "red-dominant" : "blue-dominant"),
            fixtures[i].id + ": baseline is " + base[i]);
    require(bgr[i] == (base[i] == "red-dominant" ? "blue-dominant" : "red-dominant"),
            fixtures[i].id + ": BGR did not flip");
    require(nchw[i] != base[i], fixtures[i].id + ": NCHW mis-feed did not change top-1");
  }

  // Correct round trips: swapping channels twice, and transposing the input
  // tensor to NCHW and back before prediction.
  std::vector<EvalInput> swapped;
  for (const auto& f : fixtures) {
    ImageBuffer twice =
        convert_color_layout(convert_color_layout(f.image, ColorLayout::kBGR), ColorLayout::kRGB);
    swapped.push_back({f.id, encode_png(twice), f.label});
  }
  require(top1_labels(evaluate(swapped)) == base, "color round trip changed top-1");

  const ModelManifest m = parse_manifest(read_file_text(kColorNet));
  auto session = reference_session(m);
  for (size_t i = 0; i < inputs.size(); ++i) {
    const Tensor t = run_pipeline(m.inputs[0], inputs[i].data).tensor;
    const Tensor back = to_layout(to_layout(t, DataLayout::kNCHW), DataLayout::kNHWC);
    require(back == t, "tensor round trip changed data");
    const auto direct = session->predict(t);
    const auto rt = session->predict(back);
    require(std::ranges::equal(direct.begin()->second.floats(), rt.begin()->second.floats()),
            fixtures[i].id + ": layout round trip changed the output");
  }
  return std::to_string(base.size()) + "/" + std::to_string(base.size()) +
         " flip under BGR and change under NCHW";
}

std::string crop_pitfall() {
  const auto inputs = as_inputs(frame_border_dataset());
  require(inputs.size() == 20, "dataset has " + std::to_string(inputs.size()) + " images");
  const auto honored = top1_labels(evaluate(inputs));
  const auto again = top1_labels(evaluate(inputs));
  const auto omitted = top1_labels(evaluate(inputs, {{"crop.enabled", "false"}}));
  require(honored == again, "honoring the manifest twice disagrees");
  int changed = 0;
  for (size_t i = 0; i < honored.size(); ++i) changed += honored[i] != omitted[i] ? 1 : 0;
  require(changed >= 1, "omitting the crop changed nothing");
  return std::to_string(changed) + "/20 images change without the crop";
}

// --- distributed ------------------------------------------------------------

struct Service {
  std::unique_ptr<ChildProcess> proc;
  int port = 0;
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }
};

Service boot(const TempDir& tmp, const std::string& kind, const std::string& name,
             const std::string& config) {
  const fs::path cfg = tmp / (name + ".yml");
  const fs::path port_file = tmp / (name + ".port");
  write_file_atomic(cfg, config + "port_file: " + port_file.string() + "\n");
  Service s;
  s.proc = std::make_unique<ChildProcess>(
      std::vector<std::string>{kCli, "serve", kind, "--config", cfg.string()}, tmp / (name + ".log"));
  s.port = testing::wait_for_port_file(port_file, std::chrono::seconds(10));
  require(s.port > 0, name + " did not start; see " + (tmp / (name + ".log")).string());
  return s;
}

nlohmann::json wait_finished(const Service& orch, const std::string& id) {
  for (int i = 0; i < 400; ++i) {
    auto e = expect_json(http_request("GET", orch.base(), "/evaluations/" + id));
    if (e["state"] == "done" || e["state"] == "failed") return e;
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  throw Failed("evaluation " + id + " did not finish");
}

std::string submit(const Service& orch, const nlohmann::json& body) {
  auto resp = http_request("POST", orch.base(), "/evaluations", body.dump());
  require(resp.status == 202 || resp.status == 200, "submit returned " + std::to_string(resp.status));
  return nlohmann::json::parse(resp.body)["evaluation_id"];
}

uint64_t predict_calls(const Service& agent) {
  return expect_json(http_request("GET", agent.base(), "/stats"))["predict_calls"].get<uint64_t>();
}

std::string distributed_flow() {
  TempDir tmp;
  Service registry = boot(tmp, "registry", "registry", "heartbeat_interval_ms: 200\n");
  const std::string reg_url = "registry_url: " + registry.base() + "\n";
  auto agent_config = [&](const std::string& id, const std::string& version) {
    return reg_url + "agent_id: " + id + "\nheartbeat_interval_ms: 200\nframework_name: TensorFlow\n" +
           "framework_version: " + version + "\nmanifests:\n  - " + kColorNet.string() +
           "\ncache_dir: " + (tmp / ("cache-" + id)).string() + "\n";
  };
  Service old_agent = boot(tmp, "agent", "agent-tf113", agent_config("agent-tf113", "1.13.0"));
  Service new_agent = boot(tmp, "agent", "agent-tf200", agent_config("agent-tf200", "2.0.0"));
  Service orch = boot(tmp, "orchestrator", "orchestrator",
                      reg_url + "state_dir: " + (tmp / "state").string() + "\n");

  for (int i = 0;; ++i) {
    auto agents = expect_json(http_request("GET", registry.base(), "/agents"));
    if (agents.size() == 2) break;
    require(i < 200, "agents did not publish");
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }

  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& in : as_inputs(red_blue_fixtures())) {
    inputs.push_back({{"id", in.id}, {"data", base64_encode(in.data)}, {"label", *in.label}});
  }
  const nlohmann::json constrained = {
      {"model", {{"name", "ColorNet"}, {"constraint", "1.x"}}},
      {"framework", {{"name", "TensorFlow"}, {"constraint", ">=1.10.x and <=1.13.0"}}},
      {"inputs", inputs},
      {"dispatch_mode", "one"},
      {"top_k", 1}};

  // A constrained request reaches only the agent whose framework satisfies it.
  auto one = wait_finished(orch, submit(orch, constrained));
  require(one["state"] == "done", "constrained evaluation " + one["state"].get<std::string>() +
                                      ": " + one["reason"].get<std::string>());
  require(one["results"].size() == 1, "expected one result");
  require(one["results"][0]["agent_id"] == "agent-tf113", "routed to the wrong agent");
  require(one["results"][0]["framework"]["version"] == "1.13.0", "wrong framework version");
  require(one["results"][0]["outputs"].size() == 8, "missing per-input outputs");
  require(predict_calls(new_agent) == 0, "unsatisfying agent was called");

  // Mode all fans out to every agent that satisfies the request.
  nlohmann::json all = constrained;
  all["framework"]["constraint"] = ">=1.10.x";
  all["dispatch_mode"] = "all";
  auto both = wait_finished(orch, submit(orch, all));
  require(both["state"] == "done", "mode all " + both["state"].get<std::string>());
  std::set<std::string> ids;
  for (const auto& r : both["results"]) {
    require(r["state"] == "done", "agent " + r["agent_id"].get<std::string>() + " failed");
    ids.insert(r["agent_id"].get<std::string>());
  }
  require(ids == std::set<std::string>{"agent-tf113", "agent-tf200"}, "mode all missed an agent");

  // Resubmission is answered from the store without touching any agent.
  const uint64_t before = predict_calls(old_agent) + predict_calls(new_agent);
  const std::string again_id = submit(orch, constrained);
  auto again = wait_finished(orch, again_id);
  const uint64_t after = predict_calls(old_agent) + predict_calls(new_agent);
  require(again["cached"] == true, "resubmission was not a cache hit");
  require(again["results"][0]["outputs"] == one["results"][0]["outputs"], "cached outputs differ");
  require(after == before, "cache hit made " + std::to_string(after - before) + " agent calls");

  for (Service* s : {&orch, &new_agent, &old_agent, &registry}) s->proc->terminate();
  return "routed to agent-tf113, mode all reached 2 agents, cache hit with 0 agent calls";
}

std::string trace_aggregation() {
  auto f = testing::fused_layer_fixture();
  bool found = false;
  for (const auto& r : compare(summarize(f.fused), summarize(f.unfused))) {
    if (r.name != "conv2+relu") continue;
    found = true;
    require(r.a_ns == 1'950'000u, "fused side is not 1.95 ms");
    require(r.b_ns == 2'630'000u, "unfused side is not 2.63 ms");
    require(r.delta_ns == -680'000, "delta is not -0.68 ms");
  }
  require(found, "fused row not matched against conv2 and relu");
  require(summarize(f.fused).total_ns == 6'750'000u, "fused total");
  require(summarize(f.unfused).total_ns == 10'610'000u, "unfused total");

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    auto spans = testing::random_span_tree(rng);
    auto expect = testing::level_totals_oracle(spans);
    auto s = summarize(spans);
    for (int level = 1; level <= 6; ++level) {
      auto it = s.level_totals.find(static_cast<TraceLevel>(level));
      const uint64_t got = it == s.level_totals.end() ? 0 : it->second;
      require(got == expect[static_cast<size_t>(level)],
              "level " + std::to_string(level) + " total differs on tree " + std::to_string(trial));
    }
  }
  return "1.95 ms vs 2.63 ms, 1000 trees agree";
}

std::string determinism() {
  TempDir tmp;
  std::vector<std::string> argv = {kCli, "evaluate", "--manifest", kColorNet.string(),
                                   "--cache-dir", (tmp / "cache").string()};
  for (const auto& f : red_blue_fixtures()) {
    const fs::path p = tmp / (f.id + ".png");
    const auto bytes = encode_png(f.image);
    write_file_atomic(p, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    argv.insert(argv.end(), {"--input", p.string(), "--label", std::to_string(f.label)});
  }
  std::string first;
  for (int run = 0; run < 5; ++run) {
    auto r = testing::run_command(argv);
    require(r.exit_code == 0, "evaluate exited " + std::to_string(r.exit_code) + ": " + r.err);
    if (run == 0) first = r.out;
    require(r.out == first, "run " + std::to_string(run) + " differs from run 0");
  }
  // Results and metrics carry no host paths, so their digest is comparable
  // between machines. The golden was recorded on linux x86_64.
  auto j = nlohmann::json::parse(first);
  const std::string digest =
      sha256_hex(canonical_json({{"results", j["results"]}, {"metrics", j["metrics"]}}));
  const std::string golden = read_file_text(kData / "golden" / "evaluate.results.sha256");
  require(digest == golden.substr(0, golden.find_first_of(" \n")),
          "results digest " + digest + " differs from the recorded golden");
  return "5 runs identical, results digest " + digest.substr(0, 12);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"manifest-conformance", manifest_conformance},
      {"constraint-engine", constraint_engine},
      {"pipeline-oracles", pipeline_oracles},
      {"normalization-order-pitfall", normalization_order},
      {"color-data-layout-pitfalls", layout_pitfalls},
      {"crop-pitfall", crop_pitfall},
      {"distributed-flow", distributed_flow},
      {"trace-aggregation", trace_aggregation},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string status = "PASS";
    std::string detail;
    try {
      detail = run();
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = e.what();
      ++failed;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << status << " " << name << " (" << ms << " ms): " << detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
