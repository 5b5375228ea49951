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

#include "evalscope/error.h"
#include "evalscope/pitfalls.h"

namespace evalscope {
namespace {

TEST(Pitfalls, ColorLayoutFlipsRedAndBlue) {
  auto j = run_pitfall_demo("color-layout");
  EXPECT_EQ(j["changed"], j["total"]);
  for (const auto& row : j["rows"]) {
    const std::string rgb = row["RGB"]["label"];
    const std::string bgr = row["BGR"]["label"];
    if (rgb == "red-dominant") EXPECT_EQ(bgr, "blue-dominant");
    if (rgb == "blue-dominant") EXPECT_EQ(bgr, "red-dominant");
  }
}

TEST(Pitfalls, DataLayoutMisfeedFallsBackToGray) {
  auto j = run_pitfall_demo("data-layout");
  for (const auto& row : j["rows"]) EXPECT_EQ(row["NCHW"]["label"], "gray");
}

TEST(Pitfalls, CropChangesOnlyThickFrames) {
  auto j = run_pitfall_demo("crop");
  EXPECT_EQ(j["total"], 20);
  EXPECT_EQ(j["changed"], 10);
  EXPECT_EQ(j["top1"]["crop_87.5"], 1.0);
  EXPECT_LT(j["top1"]["no_crop"].get<double>(), 1.0);
}

TEST(Pitfalls, NormalizationOrder) {
  auto j = run_pitfall_demo("normalization-order");
  EXPECT_GT(j["changed"].get<int>(), 0);
  EXPECT_EQ(j["exhaustive"]["max_abs_diff"], 1.0);
}

TEST(Pitfalls, DecodersDisagreeOnPixels) {
  auto j = run_pitfall_demo("decode");
  EXPECT_GT(j["pixels"]["libjpeg_vs_libjpeg-box"]["differing_samples"].get<int>(), 0);
  EXPECT_GT(j["pixels"]["integer_accurate_vs_integer_fast"]["differing_samples"].get<int>(), 0);
}

TEST(Pitfalls, DemosAreDeterministic) {
  for (const auto& name : pitfall_names()) {
    EXPECT_EQ(run_pitfall_demo(name).dump(), run_pitfall_demo(name).dump()) << name;
  }
  EXPECT_THROW(run_pitfall_demo("gamma"), Error);
}

}  // namespace
}  // namespace evalscope
