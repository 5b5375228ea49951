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

#include "evalscope/fixtures.h"

#include <cstdio>

#include "evalscope/manifest.h"

namespace evalscope {

LinearWeights reference_color_weights() {
  LinearWeights w;
  w.classes = {"red-dominant", "green-dominant", "blue-dominant", "gray"};
  w.weights = {{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}, {0, 0, 0}};
  w.bias = {0, 0, 0, 0.5};
  w.expected_layout = DataLayout::kNHWC;
  w.expected_color_layout = ColorLayout::kRGB;
  return w;
}

std::string reference_manifest_text(const std::string& weights_path, const std::string& labels_path) {
  return R"(name: ColorNet
version: 1.0.0
task: classification
license: Apache-2.0
description: Linear classifier over per-channel means
framework:
  name: TensorFlow
  version: ">=1.10.x"
container:
  amd64:
    cpu: evalscope/reference:1.0.0-amd64-cpu
    gpu: evalscope/reference:1.0.0-amd64-gpu
envvars:
  - TF_ENABLE_WINOGRAD_NONFUSED: 0
inputs:
  - type: image
    layer_name: data
    element_type: float32
    processing:
      decode:
        element_type: uint8
        data_layout: NHWC
        color_layout: RGB
      crop:
        method: center
        percentage: 87.5
      resize:
        dimensions: [3, 32, 32]
        method: bilinear
        keep_aspect_ratio: false
      mean: [127.5, 127.5, 127.5]
      rescale: 127.5
outputs:
  - type: probability
    layer_name: prob
    element_type: float32
    processing:
      features_url: )" + labels_path + R"(
source:
  graph_path: )" + weights_path + R"(
training_dataset:
  name: synthetic-colors
  version: 1.0.0
)";
}

std::shared_ptr<PredictorSession> reference_session(const ModelManifest& manifest) {
  auto w = reference_color_weights();
  auto classes = w.classes;
  return std::make_shared<PredictorSession>(manifest, "reference_linear", "", "cpu",
                                            make_linear_model(std::move(w)), std::move(classes));
}

ImageBuffer solid_image(int width, int height, uint8_t r, uint8_t g, uint8_t b) {
  std::vector<uint8_t> px(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < px.size(); i += 3) {
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }
  return ImageBuffer::from_bytes(width, height, 3, ColorLayout::kRGB, std::move(px));
}

std::vector<FixtureImage> red_blue_fixtures() {
  struct Shade {
    const char* id;
    uint8_t r, g, b;
    int64_t label;
  };
  static const Shade kShades[] = {
      {"red", 255, 0, 0, 0},           {"crimson", 220, 20, 60, 0}, {"scarlet", 255, 36, 0, 0},
      {"maroon", 176, 48, 40, 0},      {"blue", 0, 0, 255, 2},      {"navy", 20, 30, 160, 2},
      {"cobalt", 0, 71, 171, 2},       {"azure", 30, 90, 250, 2},
  };
  std::vector<FixtureImage> out;
  for (const auto& s : kShades) out.push_back({s.id, solid_image(32, 32, s.r, s.g, s.b), s.label});
  return out;
}

std::vector<FixtureImage> frame_border_dataset() {
  static const uint8_t kFrames[3][3] = {{255, 0, 0}, {0, 255, 0}, {0, 0, 255}};
  std::vector<FixtureImage> out;
  for (int i = 0; i < 20; ++i) {
    const int size = 64;
    const int thickness = i % 2 == 0 ? 4 : 1;
    const auto center = static_cast<uint8_t>(100 + 3 * i);
    const uint8_t* frame = kFrames[i % 3];
    std::vector<uint8_t> px(static_cast<size_t>(size) * size * 3);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const bool border = x < thickness || y < thickness || x >= size - thickness ||
                            y >= size - thickness;
        for (int c = 0; c < 3; ++c) {
          px[(static_cast<size_t>(y) * size + x) * 3 + c] = border ? frame[c] : center;
        }
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "frame_%02d", i);
    out.push_back({id, ImageBuffer::from_bytes(size, size, 3, ColorLayout::kRGB, std::move(px)),
                   kGrayClass});
  }
  return out;
}

ImageBuffer decode_fixture_image() {
  const int size = 48;
  std::vector<uint8_t> px(static_cast<size_t>(size) * size * 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool a = ((x / 3) + (y / 5)) % 2 == 0;
      uint8_t* p = &px[(static_cast<size_t>(y) * size + x) * 3];
      p[0] = a ? 230 : 20;
      p[1] = static_cast<uint8_t>(4 * x);
      p[2] = a ? 30 : 210;
    }
  }
  return ImageBuffer::from_bytes(size, size, 3, ColorLayout::kRGB, std::move(px));
}

}  // namespace evalscope
