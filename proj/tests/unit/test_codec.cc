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

#include <random>

#include "evalscope/codec.h"
#include "evalscope/error.h"
#include "evalscope/fixtures.h"

namespace evalscope {
namespace {

ImageBuffer random_image(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<uint8_t> px(static_cast<size_t>(w) * h * 3);
  for (auto& x : px) x = static_cast<uint8_t>(d(rng));
  return ImageBuffer::from_bytes(w, h, 3, ColorLayout::kRGB, px);
}

TEST(Codec, LosslessFormatsRoundTrip) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    ImageBuffer img = random_image(rng, 1 + trial, 2 + trial % 5);
    auto png = decode_image(encode_png(img));
    EXPECT_EQ(png.format, ImageFormat::kPng);
    EXPECT_EQ(png.image, img);
    auto ppm = decode_image(encode_ppm(img));
    EXPECT_EQ(ppm.format, ImageFormat::kPpm);
    EXPECT_EQ(ppm.image, img);
  }
}

TEST(Codec, DecodeToBgrSwapsChannels) {
  ImageBuffer img = solid_image(3, 3, 10, 20, 30);
  DecodeOptions opts;
  opts.color_layout = ColorLayout::kBGR;
  auto d = decode_image(encode_png(img), opts);
  EXPECT_EQ(d.image.color_layout(), ColorLayout::kBGR);
  EXPECT_EQ(d.image.at(1, 1, 0), 30.0f);
  EXPECT_EQ(d.image.at(1, 1, 2), 10.0f);
}

TEST(Codec, DetectsFormats) {
  ImageBuffer img = solid_image(4, 4, 1, 2, 3);
  EXPECT_EQ(detect_format(encode_png(img)), ImageFormat::kPng);
  EXPECT_EQ(detect_format(encode_jpeg(img)), ImageFormat::kJpeg);
  EXPECT_EQ(detect_format(encode_ppm(img)), ImageFormat::kPpm);
  std::vector<uint8_t> junk = {'G', 'I', 'F', '8'};
  EXPECT_FALSE(detect_format(junk).has_value());
  EXPECT_THROW(decode_image(junk), Error);
}

TEST(Codec, JpegDecodersAreDeterministicButDisagree) {
  auto jpg = encode_jpeg(decode_fixture_image(), 90);
  DecodeOptions smooth;
  DecodeOptions box;
  box.jpeg_decoder = "libjpeg-box";
  auto a1 = decode_image(jpg, smooth);
  auto a2 = decode_image(jpg, smooth);
  auto b = decode_image(jpg, box);
  EXPECT_EQ(a1.image, a2.image);
  EXPECT_EQ(a1.decoder, "libjpeg");
  EXPECT_EQ(b.decoder, "libjpeg-box");
  EXPECT_NE(a1.image, b.image);
  ASSERT_TRUE(a1.dct_method.has_value());
}

TEST(Codec, JpegDctMethodsDisagree) {
  auto jpg = encode_jpeg(decode_fixture_image(), 90);
  DecodeOptions fast;
  fast.dct_method = DctMethod::kIntegerFast;
  EXPECT_NE(decode_image(jpg).image, decode_image(jpg, fast).image);
}

TEST(Codec, UnknownJpegDecoder) {
  auto jpg = encode_jpeg(solid_image(8, 8, 1, 2, 3));
  DecodeOptions opts;
  opts.jpeg_decoder = "nope";
  EXPECT_THROW(decode_image(jpg, opts), Error);
  auto names = JpegDecoderRegistry::instance().names();
  EXPECT_NE(std::find(names.begin(), names.end(), "libjpeg-box"), names.end());
}

TEST(Codec, TruncatedInputsFail) {
  auto png = encode_png(solid_image(8, 8, 1, 2, 3));
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_image(png), Error);
  auto jpg = encode_jpeg(solid_image(8, 8, 1, 2, 3));
  jpg.resize(20);
  EXPECT_THROW(decode_image(jpg), Error);
}

}  // namespace
}  // namespace evalscope
