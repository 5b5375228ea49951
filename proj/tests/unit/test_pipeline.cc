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

#include <cmath>
#include <cstring>
#include <random>

#include "evalscope/codec.h"
#include "evalscope/error.h"
#include "evalscope/fixtures.h"
#include "evalscope/pipeline.h"
#include "evalscope/pitfalls.h"
#include "oracles.h"

namespace evalscope {
namespace {

std::vector<float> random_floats(std::mt19937& rng, size_t n) {
  std::uniform_real_distribution<float> d(-1000.0f, 1000.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<uint8_t> random_bytes(std::mt19937& rng, size_t n) {
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<uint8_t> v(n);
  for (auto& x : v) x = static_cast<uint8_t>(d(rng));
  return v;
}

TEST(Resize, MatchesBruteForceOracleOnRandomImages) {
  std::mt19937 rng(20260101);
  std::uniform_int_distribution<int> side(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = side(rng), w = side(rng), oh = side(rng), ow = side(rng);
    auto px = random_floats(rng, static_cast<size_t>(h) * w * 3);
    ImageBuffer img = ImageBuffer::from_floats(w, h, 3, ColorLayout::kRGB, px);
    ImageBuffer out = resize_bilinear(img, oh, ow);
    auto expect = testing::bilinear_oracle(px, h, w, 3, oh, ow);
    ASSERT_EQ(out.height(), oh);
    ASSERT_EQ(out.width(), ow);
    auto got = out.floats();
    ASSERT_EQ(got.size(), expect.size());
    for (size_t i = 0; i < expect.size(); ++i) {
      // Bit-exact: compare representations, not values within a tolerance.
      ASSERT_EQ(std::memcmp(&got[i], &expect[i], sizeof(float)), 0)
          << "trial " << trial << " " << h << "x" << w << " -> " << oh << "x" << ow << " at " << i;
    }
  }
}

TEST(Resize, ConstantImagesStayConstant) {
  ImageBuffer img = solid_image(7, 5, 10, 200, 33);
  ImageBuffer out = resize_bilinear(img, 13, 3);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      EXPECT_EQ(out.at(x, y, 0), 10.0f);
      EXPECT_EQ(out.at(x, y, 1), 200.0f);
      EXPECT_EQ(out.at(x, y, 2), 33.0f);
    }
  }
}

TEST(Resize, HalvingAveragesPairs) {
  // With half-pixel centers a 2x downsample samples exactly between pixels.
  std::vector<float> px = {0, 10, 20, 30};  // 1 row, 4 columns, 1 channel
  ImageBuffer img = ImageBuffer::from_floats(4, 1, 1, ColorLayout::kRGB, px);
  ImageBuffer out = resize_bilinear(img, 1, 2);
  EXPECT_EQ(out.at(0, 0, 0), 5.0f);
  EXPECT_EQ(out.at(1, 0, 0), 25.0f);
}

TEST(Resize, ByteImagesRoundHalfAwayFromZero) {
  std::vector<uint8_t> px = {0, 1};
  ImageBuffer img = ImageBuffer::from_bytes(2, 1, 1, ColorLayout::kRGB, px);
  ImageBuffer out = resize_bilinear(img, 1, 1);
  EXPECT_EQ(out.bytes()[0], 1);  // 0.5 rounds up
}

TEST(Resize, KeepAspectRatioScalesThenCrops) {
  ImageBuffer img = solid_image(40, 20, 1, 2, 3);
  ImageBuffer out = resize_bilinear(img, 10, 10, true);
  EXPECT_EQ(out.width(), 10);
  EXPECT_EQ(out.height(), 10);
}

TEST(CenterCrop, MatchesReferenceWindows) {
  for (double p : {50.0, 87.5, 100.0}) {
    for (int w = 1; w <= 32; ++w) {
      for (int h = 1; h <= 32; ++h) {
        auto ref = testing::crop_window_oracle(w, h, p);
        if (ref.width == 0 || ref.height == 0) {
          EXPECT_THROW(center_crop_window(w, h, p), Error);
          continue;
        }
        CropWindow got = center_crop_window(w, h, p);
        ASSERT_EQ(got, (CropWindow{ref.x, ref.y, ref.width, ref.height}))
            << w << "x" << h << " at " << p;
      }
    }
  }
}

TEST(CenterCrop, RejectsOutOfRangePercentages) {
  EXPECT_THROW(center_crop_window(10, 10, 0.0), Error);
  EXPECT_THROW(center_crop_window(10, 10, 100.5), Error);
  EXPECT_THROW(center_crop_window(10, 10, std::nan("")), Error);
}

TEST(CenterCrop, CopiesTheWindow) {
  std::vector<uint8_t> px(4 * 4);
  for (size_t i = 0; i < px.size(); ++i) px[i] = static_cast<uint8_t>(i);
  ImageBuffer img = ImageBuffer::from_bytes(4, 4, 1, ColorLayout::kRGB, px);
  ImageBuffer out = center_crop(img, 50.0);
  ASSERT_EQ(out.width(), 2);
  EXPECT_EQ(out.bytes()[0], 5);
  EXPECT_EQ(out.bytes()[3], 10);
}

TEST(Layouts, ColorSwapIsAnInvolution) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> side(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = side(rng), h = side(rng);
    ImageBuffer img = ImageBuffer::from_bytes(w, h, 3, ColorLayout::kRGB,
                                              random_bytes(rng, static_cast<size_t>(w) * h * 3));
    ImageBuffer bgr = convert_color_layout(img, ColorLayout::kBGR);
    EXPECT_EQ(bgr.color_layout(), ColorLayout::kBGR);
    EXPECT_EQ(bgr.at(0, 0, 0), img.at(0, 0, 2));
    ASSERT_EQ(convert_color_layout(bgr, ColorLayout::kRGB), img);
    ASSERT_EQ(convert_color_layout(img, ColorLayout::kRGB), img);
  }
}

TEST(Layouts, TransposeIsAnInvolution) {
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> side(1, 9);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = side(rng), h = side(rng), c = side(rng) % 4 + 1;
    auto px = random_floats(rng, static_cast<size_t>(w) * h * c);
    Tensor t = Tensor::of_floats({1, h, w, c}, px, DataLayout::kNHWC);
    Tensor nchw = to_layout(t, DataLayout::kNCHW);
    EXPECT_EQ(nchw.dims, (std::vector<int64_t>{1, c, h, w}));
    // Element (y, x, ch) moves to ch*h*w + y*w + x.
    const int y = h - 1, x = w / 2, ch = c - 1;
    EXPECT_EQ(nchw.floats()[static_cast<size_t>(ch) * h * w + y * w + x],
              px[(static_cast<size_t>(y) * w + x) * c + ch]);
    ASSERT_EQ(to_layout(nchw, DataLayout::kNHWC), t);
  }
}

TEST(Normalization, OracleMatchesFrozenGolden) {
  // Frozen from the double-precision oracle: the byte path truncates every
  // value except x = 0 to zero, so the gap grows to 1.0 at x = 255.
  auto o = testing::normalization_oracle(127.5, 127.5);
  EXPECT_EQ(o.max_abs_diff, 1.0);
  EXPECT_EQ(o.argmax_value, 255);
  EXPECT_EQ(o.differing_values, 255);
  EXPECT_DOUBLE_EQ(o.sum_abs_diff, 16256.5 / 127.5);
}

TEST(Normalization, LibraryMatchesFrozenGolden) {
  NormalizationDiff d = normalization_order_diff(127.5, 127.5);
  EXPECT_EQ(d.max_abs_diff, 1.0);
  EXPECT_EQ(d.argmax_value, 255);
  EXPECT_EQ(d.differing_values, 255);
  // float32 outputs; the oracle works in double.
  EXPECT_NEAR(d.sum_abs_diff, 16256.5 / 127.5, 1e-4);
  EXPECT_GT(d.max_abs_diff, 0.0);
}

TEST(Normalization, PoliciesOnSingleValues) {
  std::vector<uint8_t> px = {0, 64, 128, 255};
  ImageBuffer img = ImageBuffer::from_bytes(4, 1, 1, ColorLayout::kRGB, px);
  NormalizationParams a{{127.5}, 127.5, OrderPolicy::kConvertThenNormalize};
  NormalizationParams b{{127.5}, 127.5, OrderPolicy::kNormalizeInBytesThenConvert};
  auto fa = normalize_and_cast(img, a);
  auto fb = normalize_and_cast(img, b);
  EXPECT_EQ(fa[0], -1.0f);
  EXPECT_EQ(fa[3], 1.0f);
  EXPECT_EQ(fb, (std::vector<float>{-1.0f, 0.0f, 0.0f, 0.0f}));
}

TEST(Overrides, ReplaceParametersInPlace) {
  InputSpec in = parse_manifest(reference_manifest_text()).inputs[0];
  InputSpec out = apply_overrides(in, {{"decode.color_layout", "BGR"}, {"percentage", "50"}});
  EXPECT_EQ(std::get<DecodeStep>(out.processing[0]).color_layout, ColorLayout::kBGR);
  EXPECT_DOUBLE_EQ(std::get<CropStep>(out.processing[1]).percentage, 50.0);
  EXPECT_EQ(out.processing.size(), in.processing.size());
}

TEST(Overrides, DisableInsertAndReject) {
  InputSpec in = parse_manifest(reference_manifest_text()).inputs[0];
  InputSpec no_crop = apply_overrides(in, {{"crop.enabled", "false"}});
  EXPECT_EQ(no_crop.processing.size(), in.processing.size() - 1);
  InputSpec cast = apply_overrides(in, {{"cast.order_policy", "normalize_in_bytes_then_convert"}});
  ASSERT_EQ(cast.processing.size(), in.processing.size() + 1);
  EXPECT_EQ(step_kind(cast.processing.back()), "cast");

  InputSpec bare = in;
  bare.processing.erase(bare.processing.begin() + 1);  // drop crop
  try {
    apply_overrides(bare, {{"crop.percentage", "50"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  EXPECT_THROW(apply_overrides(in, {{"resize.flavour", "x"}}), Error);
  EXPECT_THROW(apply_overrides(in, {{"decode.color_layout", "GRB"}}), Error);
}

TEST(RunPipeline, ProducesManifestShapeAndProvenance) {
  ModelManifest m = parse_manifest(reference_manifest_text());
  auto png = encode_png(solid_image(48, 40, 255, 0, 0));
  PipelineResult r = run_pipeline(m.inputs[0], png);
  EXPECT_EQ(r.tensor.dims, (std::vector<int64_t>{1, 32, 32, 3}));
  EXPECT_EQ(r.tensor.element_type, ElementType::kFloat32);
  EXPECT_EQ(r.tensor.floats()[0], 1.0f);
  EXPECT_EQ(r.tensor.floats()[1], -1.0f);
  auto j = r.provenance.to_json();
  EXPECT_EQ(j["format"], "png");
  // The mean step already yields float32, so no implicit cast is recorded.
  ASSERT_EQ(j["steps"].size(), 5u);
  EXPECT_EQ(j["steps"][1]["kind"], "crop");
  for (const auto& step : j["steps"]) EXPECT_FALSE(step.value("implicit", false));
}

TEST(RunPipeline, ImplicitCastToTheInputType) {
  std::string text = reference_manifest_text();
  for (const std::string line : {"      mean: [127.5, 127.5, 127.5]\n", "      rescale: 127.5\n"}) {
    const size_t at = text.find(line);
    ASSERT_NE(at, std::string::npos) << line;
    text.erase(at, line.size());
  }
  ModelManifest m = parse_manifest(text);
  PipelineResult r = run_pipeline(m.inputs[0], encode_png(solid_image(8, 8, 255, 0, 0)));
  EXPECT_EQ(r.tensor.element_type, ElementType::kFloat32);
  EXPECT_EQ(r.tensor.floats()[0], 255.0f);
  auto j = r.provenance.to_json();
  ASSERT_EQ(j["steps"].size(), 4u);
  EXPECT_EQ(j["steps"][3]["kind"], "cast");
  EXPECT_TRUE(j["steps"][3]["implicit"].get<bool>());
}

TEST(RunPipeline, StepErrorsNameTheStep) {
  ModelManifest m = parse_manifest(reference_manifest_text());
  InputSpec spec = apply_overrides(m.inputs[0], {{"crop.percentage", "1"}});
  auto png = encode_png(solid_image(8, 8, 1, 1, 1));
  try {
    run_pipeline(spec, png);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("processing step 1 (crop)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_pipeline(spec, std::vector<uint8_t>{1, 2, 3}), Error);
}

}  // namespace
}  // namespace evalscope
