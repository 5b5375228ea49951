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

#include "evalscope/codec.h"

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

#include <jpeglib.h>
#include <png.h>

#include "evalscope/error.h"

namespace evalscope {

std::string_view to_string(ImageFormat f) {
  switch (f) {
    case ImageFormat::kPpm: return "ppm";
    case ImageFormat::kPng: return "png";
    case ImageFormat::kJpeg: return "jpeg";
  }
  return "?";
}

std::optional<ImageFormat> detect_format(std::span<const uint8_t> b) {
  if (b.size() >= 2 && b[0] == 'P' && b[1] == '6') return ImageFormat::kPpm;
  if (b.size() >= 8 && b[0] == 0x89 && b[1] == 'P' && b[2] == 'N' && b[3] == 'G') {
    return ImageFormat::kPng;
  }
  if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return ImageFormat::kJpeg;
  return std::nullopt;
}

namespace {

[[noreturn]] void truncated(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "truncated or corrupt " + what);
}

ImageBuffer decode_ppm(std::span<const uint8_t> b) {
  size_t pos = 2;
  auto skip_space_and_comments = [&] {
    while (pos < b.size()) {
      if (b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
      } else if (std::isspace(b[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space_and_comments();
    if (pos >= b.size() || !std::isdigit(b[pos])) truncated("PPM header");
    long v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
      v = v * 10 + (b[pos++] - '0');
      if (v > 1 << 20) throw Error(ErrorCode::kInvalidArgument, "PPM dimension too large");
    }
    return v;
  };
  const long width = read_int();
  const long height = read_int();
  const long maxval = read_int();
  if (pos >= b.size() || !std::isspace(b[pos])) truncated("PPM header");
  ++pos;
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "PPM has zero size");
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupported, "only 8-bit PPM (maxval 255) is supported");
  }
  const size_t n = static_cast<size_t>(width) * height * 3;
  if (b.size() - pos < n) truncated("PPM pixel data");
  std::vector<uint8_t> data(b.begin() + pos, b.begin() + pos + n);
  return ImageBuffer::from_bytes(static_cast<int>(width), static_cast<int>(height), 3,
                                 ColorLayout::kRGB, std::move(data));
}

ImageBuffer decode_png(std::span<const uint8_t> b) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, b.data(), b.size())) {
    throw Error(ErrorCode::kInvalidArgument, std::string("PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    truncated("PNG (" + msg + ")");
  }
  return ImageBuffer::from_bytes(static_cast<int>(image.width), static_cast<int>(image.height), 3,
                                 ColorLayout::kRGB, std::move(data));
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_quiet(j_common_ptr, int) {}

class LibjpegDecoder final : public JpegDecoder {
 public:
  LibjpegDecoder(std::string name, bool fancy_upsampling)
      : name_(std::move(name)), fancy_(fancy_upsampling) {}

  std::string name() const override { return name_; }

  ImageBuffer decode(std::span<const uint8_t> bytes, DctMethod dct) const override {
    jpeg_decompress_struct cinfo;
    JpegErrorManager jerr;
    std::vector<uint8_t> data;
    int width = 0;
    int height = 0;
    long warnings = 0;

    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.emit_message = jpeg_quiet;
    if (setjmp(jerr.jump)) {
      jpeg_destroy_decompress(&cinfo);
      throw Error(ErrorCode::kInvalidArgument, std::string("JPEG: ") + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    cinfo.dct_method = dct == DctMethod::kIntegerFast ? JDCT_IFAST : JDCT_ISLOW;
    cinfo.do_fancy_upsampling = fancy_ ? TRUE : FALSE;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    data.resize(static_cast<size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
      JSAMPROW row = data.data() + static_cast<size_t>(cinfo.output_scanline) * width * 3;
      jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    warnings = jerr.pub.num_warnings;
    jpeg_destroy_decompress(&cinfo);
    if (warnings > 0) truncated("JPEG");
    return ImageBuffer::from_bytes(width, height, 3, ColorLayout::kRGB, std::move(data));
  }

 private:
  std::string name_;
  bool fancy_;
};

void require_rgb8(const ImageBuffer& img) {
  if (img.element_type() != ElementType::kUint8 || img.channels() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "encoder expects a 3-channel uint8 image");
  }
}

// Encoders write RGB order; BGR buffers are swapped on the way out.
std::vector<uint8_t> rgb_bytes(const ImageBuffer& img) {
  auto src = img.bytes();
  std::vector<uint8_t> out(src.begin(), src.end());
  if (img.color_layout() == ColorLayout::kBGR) {
    for (size_t i = 0; i + 2 < out.size(); i += 3) std::swap(out[i], out[i + 2]);
  }
  return out;
}

}  // namespace

std::shared_ptr<const JpegDecoder> make_libjpeg_decoder() {
  return std::make_shared<LibjpegDecoder>("libjpeg", true);
}

std::shared_ptr<const JpegDecoder> make_libjpeg_box_decoder() {
  return std::make_shared<LibjpegDecoder>("libjpeg-box", false);
}

struct JpegDecoderRegistry::Impl {
  mutable std::mutex mu;
  std::map<std::string, std::shared_ptr<const JpegDecoder>> decoders;
};

JpegDecoderRegistry::JpegDecoderRegistry() : impl_(std::make_shared<Impl>()) {
  add(make_libjpeg_decoder());
  add(make_libjpeg_box_decoder());
}

JpegDecoderRegistry& JpegDecoderRegistry::instance() {
  static JpegDecoderRegistry registry;
  return registry;
}

void JpegDecoderRegistry::add(std::shared_ptr<const JpegDecoder> decoder) {
  std::lock_guard lock(impl_->mu);
  impl_->decoders[decoder->name()] = std::move(decoder);
}

std::shared_ptr<const JpegDecoder> JpegDecoderRegistry::find(const std::string& name) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->decoders.find(name);
  return it == impl_->decoders.end() ? nullptr : it->second;
}

std::vector<std::string> JpegDecoderRegistry::names() const {
  std::lock_guard lock(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [name, d] : impl_->decoders) out.push_back(name);
  return out;
}

DecodedImage decode_image(std::span<const uint8_t> bytes, const DecodeOptions& opts) {
  const auto format = detect_format(bytes);
  if (!format) throw Error(ErrorCode::kUnsupported, "unsupported image format");

  DecodedImage out;
  out.format = *format;
  switch (*format) {
    case ImageFormat::kPpm:
      out.image = decode_ppm(bytes);
      out.decoder = "ppm";
      break;
    case ImageFormat::kPng:
      out.image = decode_png(bytes);
      out.decoder = "png";
      break;
    case ImageFormat::kJpeg: {
      auto decoder = JpegDecoderRegistry::instance().find(opts.jpeg_decoder);
      if (!decoder) {
        throw Error(ErrorCode::kNotFound, "no JPEG decoder named '" + opts.jpeg_decoder + "'");
      }
      out.image = decoder->decode(bytes, opts.dct_method);
      out.decoder = decoder->name();
      out.dct_method = opts.dct_method;
      break;
    }
  }
  if (opts.color_layout == ColorLayout::kBGR) {
    auto px = out.image.mutable_bytes();
    for (size_t i = 0; i + 2 < px.size(); i += 3) std::swap(px[i], px[i + 2]);
    out.image.set_color_layout(ColorLayout::kBGR);
  }
  return out;
}

std::vector<uint8_t> encode_ppm(const ImageBuffer& img) {
  require_rgb8(img);
  const std::string header =
      "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  const auto px = rgb_bytes(img);
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

std::vector<uint8_t> encode_png(const ImageBuffer& img) {
  require_rgb8(img);
  const auto px = rgb_bytes(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, px.data(), 0, nullptr)) {
    throw Error(ErrorCode::kInternal, std::string("PNG encode: ") + image.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, px.data(), 0, nullptr)) {
    throw Error(ErrorCode::kInternal, std::string("PNG encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
  require_rgb8(img);
  std::vector<uint8_t> px = rgb_bytes(img);
  jpeg_compress_struct cinfo;
  JpegErrorManager jerr;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;

  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw Error(ErrorCode::kInternal, std::string("JPEG encode: ") + jerr.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = px.data() + static_cast<size_t>(cinfo.next_scanline) * img.width() * 3;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  std::vector<uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

}  // namespace evalscope
