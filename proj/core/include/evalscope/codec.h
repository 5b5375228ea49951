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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evalscope/image.h"
#include "evalscope/types.h"

namespace evalscope {

enum class ImageFormat { kPpm, kPng, kJpeg };

std::string_view to_string(ImageFormat f);
std::optional<ImageFormat> detect_format(std::span<const uint8_t> bytes);

/// JPEG decoding is pluggable because decoders disagree on pixel values
/// (IDCT precision, chroma upsampling, YCbCr conversion). Decoders always
/// return RGB uint8 pixels.
class JpegDecoder {
 public:
  virtual ~JpegDecoder() = default;
  virtual std::string name() const = 0;
  virtual ImageBuffer decode(std::span<const uint8_t> bytes, DctMethod dct) const = 0;
};

/// libjpeg with smooth ("fancy") chroma upsampling. Registered as "libjpeg".
std::shared_ptr<const JpegDecoder> make_libjpeg_decoder();
/// libjpeg with box-filter chroma upsampling. Registered as "libjpeg-box".
std::shared_ptr<const JpegDecoder> make_libjpeg_box_decoder();

/// Process-wide decoder lookup. Pre-populated with the two libjpeg decoders.
class JpegDecoderRegistry {
 public:
  static JpegDecoderRegistry& instance();

  void add(std::shared_ptr<const JpegDecoder> decoder);
  std::shared_ptr<const JpegDecoder> find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  JpegDecoderRegistry();
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

inline constexpr const char* kDefaultJpegDecoder = "libjpeg";

struct DecodeOptions {
  ColorLayout color_layout = ColorLayout::kRGB;
  DctMethod dct_method = DctMethod::kIntegerAccurate;
  std::string jpeg_decoder = kDefaultJpegDecoder;
};

struct DecodedImage {
  ImageBuffer image;
  ImageFormat format = ImageFormat::kPpm;
  std::string decoder;                  // "ppm", "png" or the JPEG plugin name
  std::optional<DctMethod> dct_method;  // set for JPEG only
};

/// Decodes PPM (P6), PNG or JPEG into uint8 pixels in `opts.color_layout`.
/// Lossless formats reproduce the stored values exactly.
DecodedImage decode_image(std::span<const uint8_t> bytes, const DecodeOptions& opts = {});

std::vector<uint8_t> encode_ppm(const ImageBuffer& rgb);
std::vector<uint8_t> encode_png(const ImageBuffer& rgb);
/// Baseline JPEG with 4:2:0 chroma subsampling.
std::vector<uint8_t> encode_jpeg(const ImageBuffer& rgb, int quality = 90);

}  // namespace evalscope
