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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "evalscope/types.h"

namespace evalscope {

/// Element storage shared by images and tensors. int8 data is stored in the
/// uint8 alternative; the element type tag says how to read it.
using ElementData = std::variant<std::vector<uint8_t>, std::vector<float>>;

/// Interleaved H x W x C pixels in row-major order.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  static ImageBuffer from_bytes(int width, int height, int channels, ColorLayout layout,
                                std::vector<uint8_t> data);
  static ImageBuffer from_floats(int width, int height, int channels, ColorLayout layout,
                                 std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorLayout color_layout() const { return color_layout_; }
  ElementType element_type() const { return element_type_; }
  size_t size() const { return static_cast<size_t>(width_) * height_ * channels_; }

  std::span<const uint8_t> bytes() const;
  std::span<const float> floats() const;
  std::span<uint8_t> mutable_bytes();
  std::span<float> mutable_floats();

  void set_color_layout(ColorLayout layout) { color_layout_ = layout; }

  /// Pixel (x, y) channel c as float regardless of storage.
  float at(int x, int y, int c) const;

  bool operator==(const ImageBuffer&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  ColorLayout color_layout_ = ColorLayout::kRGB;
  ElementType element_type_ = ElementType::kUint8;
  ElementData data_;
};

/// N-d tensor with a flat element array. `layout` is set for 4-d image
/// batches and unset for other tensors (model outputs).
struct Tensor {
  std::vector<int64_t> dims;
  std::optional<DataLayout> layout;
  ElementType element_type = ElementType::kFloat32;
  ElementData data;

  static Tensor of_floats(std::vector<int64_t> dims, std::vector<float> values,
                          std::optional<DataLayout> layout = std::nullopt);
  static Tensor of_bytes(std::vector<int64_t> dims, std::vector<uint8_t> values,
                         std::optional<DataLayout> layout = std::nullopt);

  int64_t element_count() const;
  size_t data_size() const;
  std::span<const float> floats() const;
  std::span<const uint8_t> bytes() const;

  /// Element i converted to float.
  float value(size_t i) const;

  /// Throws Error(kShapeMismatch) when product(dims) != data size.
  void check() const;

  bool operator==(const Tensor&) const = default;
};

}  // namespace evalscope
