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

#include "evalscope/pitfalls.h"

#include <cmath>
#include <cstdlib>
#include <functional>

#include "evalscope/agent.h"
#include "evalscope/codec.h"
#include "evalscope/error.h"
#include "evalscope/fixtures.h"
#include "evalscope/pipeline.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

std::vector<EvalInput> as_inputs(const std::vector<FixtureImage>& images) {
  std::vector<EvalInput> out;
  for (const auto& f : images) out.push_back(EvalInput{f.id, encode_png(f.image), f.label});
  return out;
}

nlohmann::json top1_json(const InputResult& r) {
  const Prediction& p = r.predictions.front();
  return {{"label", p.label}, {"probability", round6(p.probability)}};
}

/// Evaluates the inputs with and without `overrides` and tabulates top-1.
nlohmann::json paired_run(const std::string& name, const std::vector<EvalInput>& inputs,
                          const PipelineOverrides& overrides, const char* baseline_name,
                          const char* variant_name) {
  auto session = reference_session(parse_manifest(reference_manifest_text()));
  RunOptions base_opts;
  RunOptions variant_opts;
  variant_opts.overrides = overrides;
  const RunResult base = run_evaluation(*session, inputs, base_opts);
  const RunResult variant = run_evaluation(*session, inputs, variant_opts);

  nlohmann::json rows = nlohmann::json::array();
  int changed = 0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const bool diff = base.results[i].predictions.front().label_index !=
                      variant.results[i].predictions.front().label_index;
    changed += diff ? 1 : 0;
    rows.push_back({{"input_id", inputs[i].id},
                    {baseline_name, top1_json(base.results[i])},
                    {variant_name, top1_json(variant.results[i])},
                    {"changed", diff}});
  }
  nlohmann::json out = {{"pitfall", name},
                        {"overrides", overrides},
                        {"rows", std::move(rows)},
                        {"changed", changed},
                        {"total", inputs.size()}};
  if (base.metrics && variant.metrics) {
    out["top1"] = {{baseline_name, round6(base.metrics->top1)},
                   {variant_name, round6(variant.metrics->top1)}};
  }
  return out;
}

nlohmann::json decode_demo() {
  const ImageBuffer img = decode_fixture_image();
  const std::vector<uint8_t> jpeg = encode_jpeg(img, 90);

  auto decode_with = [&](const std::string& decoder, DctMethod dct) {
    return decode_image(jpeg, DecodeOptions{ColorLayout::kRGB, dct, decoder}).image;
  };
  auto compare = [](const ImageBuffer& a, const ImageBuffer& b) {
    int max_diff = 0;
    size_t differing = 0;
    auto pa = a.bytes();
    auto pb = b.bytes();
    for (size_t i = 0; i < pa.size(); ++i) {
      const int d = std::abs(static_cast<int>(pa[i]) - static_cast<int>(pb[i]));
      max_diff = std::max(max_diff, d);
      differing += d != 0 ? 1 : 0;
    }
    return nlohmann::json{{"max_abs_diff", max_diff}, {"differing_samples", differing},
                          {"total_samples", pa.size()}};
  };
  const ImageBuffer fancy = decode_with("libjpeg", DctMethod::kIntegerAccurate);
  const ImageBuffer box = decode_with("libjpeg-box", DctMethod::kIntegerAccurate);
  const ImageBuffer fast = decode_with("libjpeg", DctMethod::kIntegerFast);

  auto session = reference_session(parse_manifest(reference_manifest_text()));
  const std::vector<EvalInput> inputs = {EvalInput{"decode_fixture.jpg", jpeg, std::nullopt}};
  auto probs = [&](const std::string& decoder) {
    RunOptions opts;
    opts.jpeg_decoder = decoder;
    opts.top_k = 4;
    return run_evaluation(*session, inputs, opts).results.front().predictions;
  };
  const auto pf = probs("libjpeg");
  const auto pb = probs("libjpeg-box");
  double max_prob_diff = 0.0;
  for (const auto& a : pf) {
    for (const auto& b : pb) {
      if (a.label_index == b.label_index) {
        max_prob_diff = std::max(max_prob_diff, std::abs(a.probability - b.probability));
      }
    }
  }
  return {{"pitfall", "decode"},
          {"pixels", {{"libjpeg_vs_libjpeg-box", compare(fancy, box)},
                      {"integer_accurate_vs_integer_fast", compare(fancy, fast)}}},
          {"top1", {{"libjpeg", top1_json(InputResult{"", pf, {}, {}})},
                    {"libjpeg-box", top1_json(InputResult{"", pb, {}, {}})}}},
          {"max_probability_diff", round6(max_prob_diff)}};
}

}  // namespace

NormalizationDiff normalization_order_diff(double mean, double rescale) {
  std::vector<uint8_t> px(256 * 3);
  for (int v = 0; v < 256; ++v) {
    for (int c = 0; c < 3; ++c) px[static_cast<size_t>(v) * 3 + c] = static_cast<uint8_t>(v);
  }
  const ImageBuffer img = ImageBuffer::from_bytes(256, 1, 3, ColorLayout::kRGB, std::move(px));
  NormalizationParams a{{mean, mean, mean}, rescale, OrderPolicy::kConvertThenNormalize};
  NormalizationParams b{{mean, mean, mean}, rescale, OrderPolicy::kNormalizeInBytesThenConvert};
  const auto out_a = normalize_and_cast(img, a);
  const auto out_b = normalize_and_cast(img, b);
  NormalizationDiff d;
  for (int v = 0; v < 256; ++v) {
    const double diff = std::abs(static_cast<double>(out_a[static_cast<size_t>(v) * 3]) -
                                 static_cast<double>(out_b[static_cast<size_t>(v) * 3]));
    if (diff > d.max_abs_diff) {
      d.max_abs_diff = diff;
      d.argmax_value = v;
    }
    d.differing_values += diff != 0.0 ? 1 : 0;
    d.sum_abs_diff += diff;
  }
  return d;
}

std::vector<std::string> pitfall_names() {
  return {"color-layout", "data-layout", "crop", "normalization-order", "decode"};
}

nlohmann::json run_pitfall_demo(const std::string& name) {
  if (name == "color-layout") {
    return paired_run(name, as_inputs(red_blue_fixtures()), {{"decode.color_layout", "BGR"}},
                      "RGB", "BGR");
  }
  if (name == "data-layout") {
    return paired_run(name, as_inputs(red_blue_fixtures()), {{"decode.data_layout", "NCHW"}},
                      "NHWC", "NCHW");
  }
  if (name == "crop") {
    return paired_run(name, as_inputs(frame_border_dataset()), {{"crop.enabled", "false"}},
                      "crop_87.5", "no_crop");
  }
  if (name == "normalization-order") {
    nlohmann::json out = paired_run(name, as_inputs(red_blue_fixtures()),
                                    {{"cast.order_policy", "normalize_in_bytes_then_convert"}},
                                    "convert_then_normalize", "normalize_in_bytes_then_convert");
    const NormalizationDiff d = normalization_order_diff(127.5, 127.5);
    out["exhaustive"] = {{"mean", 127.5},
                         {"rescale", 127.5},
                         {"max_abs_diff", d.max_abs_diff},
                         {"argmax_value", d.argmax_value},
                         {"differing_values", d.differing_values},
                         {"sum_abs_diff", round6(d.sum_abs_diff)}};
    return out;
  }
  if (name == "decode") return decode_demo();
  std::string known;
  for (const auto& n : pitfall_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::kInvalidArgument, "unknown pitfall '" + name + "'; expected one of " + known);
}

}  // namespace evalscope
