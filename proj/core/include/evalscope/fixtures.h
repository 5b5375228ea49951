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
#include <memory>
#include <string>
#include <vector>

#include "evalscope/image.h"
#include "evalscope/predictor.h"

namespace evalscope {

// Deterministic reference model and synthetic inputs used by the pitfall
// demos, the tests and the shipped data/ directory.

inline constexpr int kGrayClass = 3;

/// Classes red-dominant, green-dominant, blue-dominant, gray over RGB
/// channel means in NHWC. Each color row rewards its channel and penalizes
/// the other two; gray has zero weights and bias 0.5, so it wins whenever
/// no channel stands out (including interleaving-scrambled input).
LinearWeights reference_color_weights();

/// Classification manifest for the reference model: decode,
/// 87.5% center crop, bilinear resize to 32x32, mean/rescale 127.5.
std::string reference_manifest_text(const std::string& weights_path = "color_weights.json",
                                    const std::string& labels_path = "color_labels.txt");

/// Session over the in-memory reference weights (no asset download).
std::shared_ptr<PredictorSession> reference_session(const ModelManifest& manifest);

ImageBuffer solid_image(int width, int height, uint8_t r, uint8_t g, uint8_t b);

struct FixtureImage {
  std::string id;
  ImageBuffer image;
  int64_t label = 0;
};

/// Saturated red and blue shades, labelled with their color class.
std::vector<FixtureImage> red_blue_fixtures();

/// Twenty 64x64 images: a gray center (the labelled object) inside a
/// colored frame. Even-numbered images have a 4 px frame, which an 87.5%
/// center crop removes entirely; odd-numbered ones have a 1 px frame.
std::vector<FixtureImage> frame_border_dataset();

/// 48x48 image with hard color edges, where chroma upsampling choices show.
ImageBuffer decode_fixture_image();

}  // namespace evalscope
