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

#include <benchmark/benchmark.h>

#include <random>

#include "evalscope/agent.h"
#include "evalscope/codec.h"
#include "evalscope/fixtures.h"
#include "evalscope/manifest.h"
#include "evalscope/pipeline.h"
#include "evalscope/semver.h"
#include "evalscope/tracing.h"

namespace evalscope {
namespace {

ImageBuffer noise_image(int side) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<uint8_t> px(static_cast<size_t>(side) * side * 3);
  for (auto& p : px) p = static_cast<uint8_t>(d(rng));
  return ImageBuffer::from_bytes(side, side, 3, ColorLayout::kRGB, std::move(px));
}

void BM_ResizeBilinear(benchmark::State& state) {
  const ImageBuffer img = noise_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resize_bilinear(img, 299, 299));
  state.SetItemsProcessed(state.iterations() * 299 * 299);
}
BENCHMARK(BM_ResizeBilinear)->Arg(128)->Arg(512);

void BM_ConstraintMatch(benchmark::State& state) {
  const auto c = VersionConstraint::parse(">=1.10.x and <=1.13.0");
  std::vector<SemVer> versions;
  for (int mi = 0; mi < 16; ++mi) {
    for (int pa = 0; pa < 16; ++pa) versions.push_back({1, mi, pa, ""});
  }
  for (auto _ : state) {
    int n = 0;
    for (const auto& v : versions) n += c.satisfied_by(v) ? 1 : 0;
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(versions.size()));
}
BENCHMARK(BM_ConstraintMatch);

void BM_ConstraintParse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(VersionConstraint::parse(">=1.10.x and <=1.13.0"));
}
BENCHMARK(BM_ConstraintParse);

void BM_Summarize(benchmark::State& state) {
  // A flat model span with many layer spans, each holding one library call.
  std::vector<TraceSpan> spans;
  spans.push_back({1, std::nullopt, TraceLevel::kModel, "model", 0, 0, {}});
  uint64_t t = 0;
  uint64_t id = 2;
  for (int64_t i = 0; i < state.range(0); ++i) {
    const uint64_t layer = id++;
    spans.push_back({layer, 1, TraceLevel::kLayer, "layer" + std::to_string(i % 50), t, t + 100, {}});
    spans.push_back({id++, layer, TraceLevel::kLibrary, "kernel", t + 10, t + 90, {}});
    t += 100;
  }
  spans[0].end_ns = t;
  for (auto _ : state) benchmark::DoNotOptimize(summarize(spans));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spans.size()));
}
BENCHMARK(BM_Summarize)->Arg(100)->Arg(10000);

void BM_Pipeline(benchmark::State& state) {
  const ModelManifest m = parse_manifest(reference_manifest_text());
  const auto png = encode_png(noise_image(256));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(m.inputs[0], png));
}
BENCHMARK(BM_Pipeline);

void BM_EvaluateReference(benchmark::State& state) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  std::vector<EvalInput> inputs;
  for (const auto& f : red_blue_fixtures()) inputs.push_back({f.id, encode_png(f.image), f.label});
  for (auto _ : state) benchmark::DoNotOptimize(run_evaluation(*session, inputs, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(inputs.size()));
}
BENCHMARK(BM_EvaluateReference);

}  // namespace
}  // namespace evalscope

BENCHMARK_MAIN();
