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

#include <optional>
#include <string>
#include <string_view>

namespace evalscope {

enum class ElementType { kInt8, kUint8, kFloat32 };
enum class DataLayout { kNHWC, kNCHW };
enum class ColorLayout { kRGB, kBGR };
enum class DctMethod { kIntegerFast, kIntegerAccurate };

// Order in which byte-to-float conversion and mean/rescale normalization run.
enum class OrderPolicy { kConvertThenNormalize, kNormalizeInBytesThenConvert };

enum class Task { kClassification, kObjectDetection, kInstanceSegmentation };
enum class OutputType { kProbability, kBox, kClass, kMask };

std::string_view to_string(ElementType v);
std::string_view to_string(DataLayout v);
std::string_view to_string(ColorLayout v);
std::string_view to_string(DctMethod v);
std::string_view to_string(OrderPolicy v);
std::string_view to_string(Task v);
std::string_view to_string(OutputType v);

// Parsers return nullopt for unrecognized names. Layout and element-type
// names are matched case-insensitively; "HWC"/"CHW" are accepted as the
// batch-less spellings of NHWC/NCHW.
std::optional<ElementType> parse_element_type(std::string_view s);
std::optional<DataLayout> parse_data_layout(std::string_view s);
std::optional<ColorLayout> parse_color_layout(std::string_view s);
std::optional<DctMethod> parse_dct_method(std::string_view s);
std::optional<OrderPolicy> parse_order_policy(std::string_view s);
std::optional<Task> parse_task(std::string_view s);
std::optional<OutputType> parse_output_type(std::string_view s);

}  // namespace evalscope
