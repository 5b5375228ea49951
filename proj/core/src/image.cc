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

#include "evalscope/image.h"

#include <cmath>
#include <string>

#include "evalscope/error.h"

namespace evalscope {
namespace {

void check_geometry(int width, int height, int channels, size_t data_size) {
  if (width < 0 || height < 0 || channels <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid image geometry");
  }
  const size_t expected = static_cast<size_t>(width) * height * channels;
  if (expected != data_size) {
    throw Error(ErrorCode::kShapeMismatch,
                "image data has " + std::to_string(data_size) + " elements, expected " +
                    std::to_string(expected));
  }
}

}  // namespace

ImageBuffer ImageBuffer::from_bytes(int width, int height, int channels, ColorLayout layout,
                                    std::vector<uint8_t> data) {
  check_geometry(width, height, channels, data.size());
  ImageBuffer img;
  img.width_ = width;
  img.height_ = height;
  img.channels_ = channels;
  img.color_layout_ = layout;
  img.element_type_ = ElementType::kUint8;
  img.data_ = std::move(data);
  return img;
}

ImageBuffer ImageBuffer::from_floats(int width, int height, int channels, ColorLayout layout,
                                     std::vector<float> data) {
  check_geometry(width, height, channels, data.size());
  for (float v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite pixel value");
  }
  ImageBuffer img;
  img.width_ = width;
  img.height_ = height;
  img.channels_ = channels;
  img.color_layout_ = layout;
  img.element_type_ = ElementType::kFloat32;
  img.data_ = std::move(data);
  return img;
}

std::span<const uint8_t> ImageBuffer::bytes() const {
  const auto* v = std::get_if<std::vector<uint8_t>>(&data_);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "image is not uint8");
  return *v;
}

std::span<const float> ImageBuffer::floats() const {
  const auto* v = std::get_if<std::vector<float>>(&data_);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "image is not float32");
  return *v;
}

std::span<uint8_t> ImageBuffer::mutable_bytes() {
  auto* v = std::get_if<std::vector<uint8_t>>(&data_);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "image is not uint8");
  return *v;
}

std::span<float> ImageBuffer::mutable_floats() {
  auto* v = std::get_if<std::vector<float>>(&data_);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "image is not float32");
  return *v;
}

float ImageBuffer::at(int x, int y, int c) const {
  const size_t i = (static_cast<size_t>(y) * width_ + x) * channels_ + c;
  if (const auto* b = std::get_if<std::vector<uint8_t>>(&data_)) return (*b)[i];
  return std::get<std::vector<float>>(data_)[i];
}

Tensor Tensor::of_floats(std::vector<int64_t> dims, std::vector<float> values,
                         std::optional<DataLayout> layout) {
  Tensor t{std::move(dims), layout, ElementType::kFloat32, std::move(values)};
  t.check();
  return t;
}

Tensor Tensor::of_bytes(std::vector<int64_t> dims, std::vector<uint8_t> values,
                        std::optional<DataLayout> layout) {
  Tensor t{std::move(dims), layout, ElementType::kUint8, std::move(values)};
  t.check();
  return t;
}

int64_t Tensor::element_count() const {
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  return n;
}

size_t Tensor::data_size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::span<const float> Tensor::floats() const {
  const auto* v = std::get_if<std::vector<float>>(&data);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "tensor is not float32");
  return *v;
}

std::span<const uint8_t> Tensor::bytes() const {
  const auto* v = std::get_if<std::vector<uint8_t>>(&data);
  if (!v) throw Error(ErrorCode::kFailedPrecondition, "tensor is not uint8");
  return *v;
}

float Tensor::value(size_t i) const {
  if (const auto* b = std::get_if<std::vector<uint8_t>>(&data)) {
    return element_type == ElementType::kInt8 ? static_cast<float>(static_cast<int8_t>((*b)[i]))
                                              : static_cast<float>((*b)[i]);
  }
  return std::get<std::vector<float>>(data)[i];
}

void Tensor::check() const {
  for (int64_t d : dims) {
    if (d < 0) throw Error(ErrorCode::kShapeMismatch, "negative tensor dimension");
  }
  if (static_cast<size_t>(element_count()) != data_size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "tensor dims hold " + std::to_string(element_count()) + " elements but data has " +
                    std::to_string(data_size()));
  }
}

}  // namespace evalscope
