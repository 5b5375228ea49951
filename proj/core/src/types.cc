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

#include "evalscope/types.h"

#include <algorithm>
#include <cctype>

namespace evalscope {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(ElementType v) {
  switch (v) {
    case ElementType::kInt8: return "int8";
    case ElementType::kUint8: return "uint8";
    case ElementType::kFloat32: return "float32";
  }
  return "?";
}

std::string_view to_string(DataLayout v) {
  return v == DataLayout::kNHWC ? "NHWC" : "NCHW";
}

std::string_view to_string(ColorLayout v) {
  return v == ColorLayout::kRGB ? "RGB" : "BGR";
}

std::string_view to_string(DctMethod v) {
  return v == DctMethod::kIntegerFast ? "integer_fast" : "integer_accurate";
}

std::string_view to_string(OrderPolicy v) {
  return v == OrderPolicy::kConvertThenNormalize
             ? "convert_then_normalize"
             : "normalize_in_bytes_then_convert";
}

std::string_view to_string(Task v) {
  switch (v) {
    case Task::kClassification: return "classification";
    case Task::kObjectDetection: return "object_detection";
    case Task::kInstanceSegmentation: return "instance_segmentation";
  }
  return "?";
}

std::string_view to_string(OutputType v) {
  switch (v) {
    case OutputType::kProbability: return "probability";
    case OutputType::kBox: return "box";
    case OutputType::kClass: return "class";
    case OutputType::kMask: return "mask";
  }
  return "?";
}

std::optional<ElementType> parse_element_type(std::string_view s) {
  const auto l = lower(s);
  if (l == "int8") return ElementType::kInt8;
  if (l == "uint8") return ElementType::kUint8;
  if (l == "float32" || l == "float") return ElementType::kFloat32;
  return std::nullopt;
}

std::optional<DataLayout> parse_data_layout(std::string_view s) {
  const auto l = lower(s);
  if (l == "nhwc" || l == "hwc") return DataLayout::kNHWC;
  if (l == "nchw" || l == "chw") return DataLayout::kNCHW;
  return std::nullopt;
}

std::optional<ColorLayout> parse_color_layout(std::string_view s) {
  const auto l = lower(s);
  if (l == "rgb") return ColorLayout::kRGB;
  if (l == "bgr") return ColorLayout::kBGR;
  return std::nullopt;
}

std::optional<DctMethod> parse_dct_method(std::string_view s) {
  const auto l = lower(s);
  if (l == "integer_fast") return DctMethod::kIntegerFast;
  if (l == "integer_accurate") return DctMethod::kIntegerAccurate;
  return std::nullopt;
}

std::optional<OrderPolicy> parse_order_policy(std::string_view s) {
  const auto l = lower(s);
  if (l == "convert_then_normalize") return OrderPolicy::kConvertThenNormalize;
  if (l == "normalize_in_bytes_then_convert") {
    return OrderPolicy::kNormalizeInBytesThenConvert;
  }
  return std::nullopt;
}

std::optional<Task> parse_task(std::string_view s) {
  if (s == "classification") return Task::kClassification;
  if (s == "object_detection") return Task::kObjectDetection;
  if (s == "instance_segmentation") return Task::kInstanceSegmentation;
  return std::nullopt;
}

std::optional<OutputType> parse_output_type(std::string_view s) {
  if (s == "probability") return OutputType::kProbability;
  if (s == "box") return OutputType::kBox;
  if (s == "class") return OutputType::kClass;
  if (s == "mask") return OutputType::kMask;
  return std::nullopt;
}

}  // namespace evalscope
