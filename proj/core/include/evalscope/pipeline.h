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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/codec.h"
#include "evalscope/image.h"
#include "evalscope/manifest.h"

namespace evalscope {

// Image pre-processing with frozen, documented numerics. All float math is
// float32; the library is built with floating-point contraction disabled so
// results are bit-identical across hosts.

/// Reverses channel order iff `target` differs from the image's layout.
ImageBuffer convert_color_layout(const ImageBuffer& img, ColorLayout target);

struct CropWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool operator==(const CropWindow&) const = default;
};

/// Output is floor(H*p/100) x floor(W*p/100) at offset
/// (floor((W-W')/2), floor((H-H')/2)). Throws on p outside (0, 100] and on
/// an empty window.
CropWindow center_crop_window(int width, int height, double percentage);
ImageBuffer center_crop(const ImageBuffer& img, double percentage);

/// Copies a window verbatim.
ImageBuffer crop(const ImageBuffer& img, const CropWindow& window);

/// Bilinear resampling with half-pixel centers. Per output pixel (ox, oy):
///
///   sy = (oy + 0.5f) * (in_h / out_h) - 0.5f, clamped below at 0
///   y0 = min(floor(sy), in_h - 1), y1 = min(y0 + 1, in_h - 1), wy = sy - y0
///   (likewise for x)
///   top    = p(y0,x0) * (1 - wx) + p(y0,x1) * wx
///   bottom = p(y1,x0) * (1 - wx) + p(y1,x1) * wx
///   value  = top * (1 - wy) + bottom * wy
///
/// evaluated in float32 in exactly that order. uint8 images round half away
/// from zero and clamp to [0, 255]; float32 images are not rounded.
///
/// With keep_aspect_ratio the image is scaled by max(out_h/H, out_w/W) (each
/// side rounded to nearest, never below the target) and then center-cropped
/// to out_h x out_w.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_h, int out_w,
                            bool keep_aspect_ratio = false);

struct NormalizationParams {
  std::vector<double> mean;
  double rescale = 1.0;
  OrderPolicy order_policy = OrderPolicy::kConvertThenNormalize;
};

/// Normalizes a uint8 image into float32, interleaved HWC.
///
/// kConvertThenNormalize:        out = (float(x) - mean_c) / rescale
/// kNormalizeInBytesThenConvert: out = float(trunc((x - M_c) / R)) where
///   M_c and R are mean_c and rescale rounded half away from zero and the
///   arithmetic is integer with truncation toward zero.
std::vector<float> normalize_and_cast(const ImageBuffer& img, const NormalizationParams& p);

/// Single-step forms used by the pipeline. `byte_domain` is true while the
/// pixels still hold byte (or byte-policy integer) values.
ImageBuffer subtract_mean(const ImageBuffer& img, std::span<const double> mean, OrderPolicy policy,
                          bool byte_domain);
ImageBuffer divide_by(const ImageBuffer& img, double rescale, OrderPolicy policy,
                      bool byte_domain);
/// float32 -> uint8 rounds half away from zero and clamps.
ImageBuffer cast_image(const ImageBuffer& img, ElementType target);

/// [1, H, W, C] or [1, C, H, W].
Tensor to_tensor(const ImageBuffer& img, DataLayout layout);

/// Physically transposes a 4-d tensor between NHWC and NCHW.
Tensor to_layout(const Tensor& t, DataLayout target);

/// Step-parameter overrides merged over a manifest input by step kind.
/// Keys are "kind.param" ("decode.color_layout", "crop.percentage",
/// "cast.order_policy", "crop.enabled", ...) or a bare parameter name that
/// belongs to exactly one step kind ("color_layout", "percentage").
///
/// Existing steps are never reordered. An override that targets a missing
/// decode step inserts one at the front; one that targets a missing cast
/// step appends one at the end (which keeps the manifest's normalization
/// order and only selects the conversion policy). Other missing kinds are
/// an error. "<kind>.enabled=false" removes that step.
using PipelineOverrides = std::map<std::string, std::string>;

InputSpec apply_overrides(const InputSpec& spec, const PipelineOverrides& overrides);

struct ProvenanceStep {
  size_t index = 0;
  std::string kind;
  nlohmann::json params;
  bool implicit = false;
};

struct PipelineProvenance {
  std::string format;
  std::string decoder;
  std::optional<DctMethod> dct_method;
  std::vector<ProvenanceStep> steps;
  std::vector<int64_t> output_dims;
  DataLayout output_layout = DataLayout::kNHWC;
  ElementType output_type = ElementType::kFloat32;

  nlohmann::json to_json() const;
};

struct PipelineResult {
  Tensor tensor;
  PipelineProvenance provenance;
};

struct PipelineOptions {
  std::string jpeg_decoder = kDefaultJpegDecoder;
};

/// Decodes `raw` and applies the input's steps in manifest order. Step
/// failures are rethrown with the step index and kind prepended.
PipelineResult run_pipeline(const InputSpec& spec, std::span<const uint8_t> raw,
                            const PipelineOptions& opts = {});

}  // namespace evalscope
