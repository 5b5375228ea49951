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

#include "evalscope/pipeline.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evalscope/error.h"

namespace evalscope {
namespace {

// Round half away from zero.
double round_away(double v) { return std::round(v); }

uint8_t to_byte(float v) {
  const float r = std::round(v);
  if (r <= 0.0f) return 0;
  if (r >= 255.0f) return 255;
  return static_cast<uint8_t>(r);
}

ImageBuffer make_like(const ImageBuffer& like, int width, int height, std::vector<float> data) {
  return ImageBuffer::from_floats(width, height, like.channels(), like.color_layout(),
                                  std::move(data));
}

std::vector<float> as_floats(const ImageBuffer& img) {
  if (img.element_type() == ElementType::kFloat32) {
    auto f = img.floats();
    return {f.begin(), f.end()};
  }
  auto b = img.bytes();
  std::vector<float> out(b.size());
  for (size_t i = 0; i < b.size(); ++i) out[i] = static_cast<float>(b[i]);
  return out;
}

std::vector<double> parse_float_list(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == '[' || c == ']' || c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> out;
  for (double v; in >> v;) out.push_back(v);
  return out;
}

}  // namespace

ImageBuffer convert_color_layout(const ImageBuffer& img, ColorLayout target) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "color layout conversion needs 3 channels");
  }
  if (img.color_layout() == target) return img;
  ImageBuffer out = img;
  auto swap_channels = [](auto px) {
    for (size_t i = 0; i + 2 < px.size(); i += 3) std::swap(px[i], px[i + 2]);
  };
  if (out.element_type() == ElementType::kFloat32) {
    swap_channels(out.mutable_floats());
  } else {
    swap_channels(out.mutable_bytes());
  }
  out.set_color_layout(target);
  return out;
}

CropWindow center_crop_window(int width, int height, double percentage) {
  if (!(percentage > 0.0 && percentage <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "crop percentage must be in (0, 100]");
  }
  // The epsilon absorbs representation error in p (e.g. 87.5 is exact, but
  // 33.3 is not) without moving any exact product across an integer.
  auto scaled = [&](int n) {
    return static_cast<int>(
        std::floor(static_cast<long double>(n) * percentage / 100.0L + 1e-9L));
  };
  CropWindow w;
  w.width = scaled(width);
  w.height = scaled(height);
  if (w.width <= 0 || w.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "crop of " + std::to_string(width) + "x" + std::to_string(height) + " at " +
                    std::to_string(percentage) + "% is empty");
  }
  w.x = (width - w.width) / 2;
  w.y = (height - w.height) / 2;
  return w;
}

ImageBuffer crop(const ImageBuffer& img, const CropWindow& w) {
  if (w.x < 0 || w.y < 0 || w.width <= 0 || w.height <= 0 || w.x + w.width > img.width() ||
      w.y + w.height > img.height()) {
    throw Error(ErrorCode::kInvalidArgument, "crop window outside the image");
  }
  const int c = img.channels();
  auto copy_rows = [&](auto src, auto& dst) {
    dst.resize(static_cast<size_t>(w.width) * w.height * c);
    for (int y = 0; y < w.height; ++y) {
      const size_t from = (static_cast<size_t>(w.y + y) * img.width() + w.x) * c;
      std::copy_n(src.begin() + from, static_cast<size_t>(w.width) * c,
                  dst.begin() + static_cast<size_t>(y) * w.width * c);
    }
  };
  if (img.element_type() == ElementType::kFloat32) {
    std::vector<float> out;
    copy_rows(img.floats(), out);
    return ImageBuffer::from_floats(w.width, w.height, c, img.color_layout(), std::move(out));
  }
  std::vector<uint8_t> out;
  copy_rows(img.bytes(), out);
  return ImageBuffer::from_bytes(w.width, w.height, c, img.color_layout(), std::move(out));
}

ImageBuffer center_crop(const ImageBuffer& img, double percentage) {
  return crop(img, center_crop_window(img.width(), img.height(), percentage));
}

namespace {

ImageBuffer resize_exact(const ImageBuffer& img, int out_h, int out_w) {
  if (out_h == img.height() && out_w == img.width()) return img;
  if (img.width() <= 0 || img.height() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot resize an empty image");
  }
  const int in_h = img.height();
  const int in_w = img.width();
  const int c = img.channels();
  const float scale_y = static_cast<float>(in_h) / static_cast<float>(out_h);
  const float scale_x = static_cast<float>(in_w) / static_cast<float>(out_w);

  struct Tap {
    int i0;
    int i1;
    float w;
  };
  auto taps = [](int out, int in, float scale) {
    std::vector<Tap> t(out);
    for (int o = 0; o < out; ++o) {
      float s = (static_cast<float>(o) + 0.5f) * scale - 0.5f;
      if (s < 0.0f) s = 0.0f;
      int i0 = static_cast<int>(s);
      if (i0 > in - 1) i0 = in - 1;
      const int i1 = std::min(i0 + 1, in - 1);
      t[o] = Tap{i0, i1, s - static_cast<float>(i0)};
    }
    return t;
  };
  const auto ty = taps(out_h, in_h, scale_y);
  const auto tx = taps(out_w, in_w, scale_x);

  const bool bytes = img.element_type() == ElementType::kUint8;
  std::vector<float> out_f;
  std::vector<uint8_t> out_b;
  if (bytes) {
    out_b.resize(static_cast<size_t>(out_h) * out_w * c);
  } else {
    out_f.resize(static_cast<size_t>(out_h) * out_w * c);
  }
  for (int oy = 0; oy < out_h; ++oy) {
    const Tap& y = ty[oy];
    for (int ox = 0; ox < out_w; ++ox) {
      const Tap& x = tx[ox];
      for (int ch = 0; ch < c; ++ch) {
        const float p00 = img.at(x.i0, y.i0, ch);
        const float p01 = img.at(x.i1, y.i0, ch);
        const float p10 = img.at(x.i0, y.i1, ch);
        const float p11 = img.at(x.i1, y.i1, ch);
        const float top = p00 * (1.0f - x.w) + p01 * x.w;
        const float bottom = p10 * (1.0f - x.w) + p11 * x.w;
        const float v = top * (1.0f - y.w) + bottom * y.w;
        const size_t idx = (static_cast<size_t>(oy) * out_w + ox) * c + ch;
        if (bytes) {
          out_b[idx] = to_byte(v);
        } else {
          out_f[idx] = v;
        }
      }
    }
  }
  if (bytes) {
    return ImageBuffer::from_bytes(out_w, out_h, c, img.color_layout(), std::move(out_b));
  }
  return ImageBuffer::from_floats(out_w, out_h, c, img.color_layout(), std::move(out_f));
}

}  // namespace

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_h, int out_w, bool keep_aspect_ratio) {
  if (out_h < 1 || out_w < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resize dimensions must be >= 1");
  }
  if (!keep_aspect_ratio) return resize_exact(img, out_h, out_w);
  const double scale = std::max(static_cast<double>(out_h) / img.height(),
                                static_cast<double>(out_w) / img.width());
  const int scaled_h = std::max(out_h, static_cast<int>(std::lround(img.height() * scale)));
  const int scaled_w = std::max(out_w, static_cast<int>(std::lround(img.width() * scale)));
  ImageBuffer scaled = resize_exact(img, scaled_h, scaled_w);
  if (scaled_h == out_h && scaled_w == out_w) return scaled;
  return crop(scaled, CropWindow{(scaled_w - out_w) / 2, (scaled_h - out_h) / 2, out_w, out_h});
}

ImageBuffer subtract_mean(const ImageBuffer& img, std::span<const double> mean, OrderPolicy policy,
                          bool byte_domain) {
  const int c = img.channels();
  if (static_cast<int>(mean.size()) != c) {
    throw Error(ErrorCode::kInvalidArgument, "mean has " + std::to_string(mean.size()) +
                                                 " values for " + std::to_string(c) + " channels");
  }
  std::vector<float> px = as_floats(img);
  if (policy == OrderPolicy::kNormalizeInBytesThenConvert && byte_domain) {
    for (size_t i = 0; i < px.size(); ++i) {
      const auto m = static_cast<int64_t>(round_away(mean[i % c]));
      px[i] = static_cast<float>(static_cast<int64_t>(px[i]) - m);
    }
  } else {
    for (size_t i = 0; i < px.size(); ++i) px[i] = px[i] - static_cast<float>(mean[i % c]);
  }
  return make_like(img, img.width(), img.height(), std::move(px));
}

ImageBuffer divide_by(const ImageBuffer& img, double rescale, OrderPolicy policy,
                      bool byte_domain) {
  if (rescale == 0.0) throw Error(ErrorCode::kInvalidArgument, "rescale must not be zero");
  std::vector<float> px = as_floats(img);
  if (policy == OrderPolicy::kNormalizeInBytesThenConvert && byte_domain) {
    const auto r = static_cast<int64_t>(round_away(rescale));
    if (r == 0) throw Error(ErrorCode::kInvalidArgument, "rescale rounds to zero in byte domain");
    for (float& v : px) {
      if (v == std::floor(v)) {
        v = static_cast<float>(static_cast<int64_t>(v) / r);
      } else {
        v = std::trunc(v / static_cast<float>(r));
      }
    }
  } else {
    const auto r = static_cast<float>(rescale);
    for (float& v : px) v = v / r;
  }
  return make_like(img, img.width(), img.height(), std::move(px));
}

ImageBuffer cast_image(const ImageBuffer& img, ElementType target) {
  if (target == ElementType::kFloat32) {
    if (img.element_type() == ElementType::kFloat32) return img;
    return make_like(img, img.width(), img.height(), as_floats(img));
  }
  if (img.element_type() != ElementType::kFloat32) return img;
  auto f = img.floats();
  std::vector<uint8_t> out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = to_byte(f[i]);
  return ImageBuffer::from_bytes(img.width(), img.height(), img.channels(), img.color_layout(),
                                 std::move(out));
}

std::vector<float> normalize_and_cast(const ImageBuffer& img, const NormalizationParams& p) {
  if (img.element_type() != ElementType::kUint8) {
    throw Error(ErrorCode::kInvalidArgument, "normalize_and_cast expects a uint8 image");
  }
  ImageBuffer out = subtract_mean(img, p.mean, p.order_policy, true);
  out = divide_by(out, p.rescale, p.order_policy, true);
  auto f = out.floats();
  return {f.begin(), f.end()};
}

Tensor to_tensor(const ImageBuffer& img, DataLayout layout) {
  const int64_t h = img.height();
  const int64_t w = img.width();
  const int64_t c = img.channels();
  Tensor t;
  t.dims = {1, h, w, c};
  t.layout = DataLayout::kNHWC;
  if (img.element_type() == ElementType::kFloat32) {
    auto f = img.floats();
    t.element_type = ElementType::kFloat32;
    t.data = std::vector<float>(f.begin(), f.end());
  } else {
    auto b = img.bytes();
    t.element_type = ElementType::kUint8;
    t.data = std::vector<uint8_t>(b.begin(), b.end());
  }
  return layout == DataLayout::kNHWC ? t : to_layout(t, layout);
}

Tensor to_layout(const Tensor& t, DataLayout target) {
  if (t.dims.size() != 4) {
    throw Error(ErrorCode::kInvalidArgument,
                "layout conversion needs a 4-d tensor, got rank " + std::to_string(t.dims.size()));
  }
  if (!t.layout) throw Error(ErrorCode::kInvalidArgument, "tensor has no data layout");
  t.check();
  if (*t.layout == target) return t;

  const int64_t n = t.dims[0];
  // Name the axes by role regardless of the source order.
  const bool from_nhwc = *t.layout == DataLayout::kNHWC;
  const int64_t h = from_nhwc ? t.dims[1] : t.dims[2];
  const int64_t w = from_nhwc ? t.dims[2] : t.dims[3];
  const int64_t c = from_nhwc ? t.dims[3] : t.dims[1];

  Tensor out;
  out.layout = target;
  out.element_type = t.element_type;
  out.dims = from_nhwc ? std::vector<int64_t>{n, c, h, w} : std::vector<int64_t>{n, h, w, c};
  std::visit(
      [&](const auto& src) {
        using Vec = std::decay_t<decltype(src)>;
        Vec dst(src.size());
        for (int64_t b = 0; b < n; ++b) {
          for (int64_t y = 0; y < h; ++y) {
            for (int64_t x = 0; x < w; ++x) {
              for (int64_t ch = 0; ch < c; ++ch) {
                const int64_t nhwc = ((b * h + y) * w + x) * c + ch;
                const int64_t nchw = ((b * c + ch) * h + y) * w + x;
                if (from_nhwc) {
                  dst[nchw] = src[nhwc];
                } else {
                  dst[nhwc] = src[nchw];
                }
              }
            }
          }
        }
        out.data = std::move(dst);
      },
      t.data);
  return out;
}

namespace {

const std::map<std::string, std::string>& bare_parameter_owners() {
  static const std::map<std::string, std::string> owners = {
      {"color_layout", "decode"},        {"data_layout", "decode"}, {"dct_method", "decode"},
      {"percentage", "crop"},            {"dimensions", "resize"},  {"keep_aspect_ratio", "resize"},
      {"order_policy", "cast"},          {"mean", "mean"},          {"rescale", "rescale"},
  };
  return owners;
}

bool parse_bool_text(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kInvalidArgument, "override " + key + ": expected true or false");
}

double parse_double_text(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "override " + key + ": expected a number");
  }
}

template <typename T>
T parse_enum_text(const std::string& key, const std::string& v,
                  std::optional<T> (*parse)(std::string_view)) {
  auto r = parse(v);
  if (!r) throw Error(ErrorCode::kInvalidArgument, "override " + key + ": bad value '" + v + "'");
  return *r;
}

void apply_to_step(ProcessingStep& step, const std::string& key, const std::string& param,
                   const std::string& v) {
  auto unknown = [&] {
    throw Error(ErrorCode::kInvalidArgument, "unknown override parameter '" + key + "'");
  };
  if (auto* d = std::get_if<DecodeStep>(&step)) {
    if (param == "color_layout") {
      d->color_layout = parse_enum_text(key, v, parse_color_layout);
    } else if (param == "data_layout") {
      d->data_layout = parse_enum_text(key, v, parse_data_layout);
    } else if (param == "dct_method") {
      d->dct_method = parse_enum_text(key, v, parse_dct_method);
    } else if (param == "element_type") {
      d->element_type = parse_enum_text(key, v, parse_element_type);
    } else {
      unknown();
    }
  } else if (auto* c = std::get_if<CropStep>(&step)) {
    if (param != "percentage") unknown();
    c->percentage = parse_double_text(key, v);
  } else if (auto* r = std::get_if<ResizeStep>(&step)) {
    if (param == "dimensions") {
      const auto dims = parse_float_list(v);
      if (dims.size() != 3) throw Error(ErrorCode::kInvalidArgument, "override " + key + ": expected C,H,W");
      for (int i = 0; i < 3; ++i) r->dimensions[i] = static_cast<int>(dims[i]);
    } else if (param == "keep_aspect_ratio") {
      r->keep_aspect_ratio = parse_bool_text(key, v);
    } else {
      unknown();
    }
  } else if (auto* m = std::get_if<MeanStep>(&step)) {
    if (param != "values" && param != "mean") unknown();
    m->values.clear();
    m->values = parse_float_list(v);
  } else if (auto* rs = std::get_if<RescaleStep>(&step)) {
    if (param != "value" && param != "rescale") unknown();
    rs->value = parse_double_text(key, v);
  } else if (auto* cs = std::get_if<CastStep>(&step)) {
    if (param == "order_policy") {
      cs->order_policy = parse_enum_text(key, v, parse_order_policy);
    } else if (param == "element_type") {
      cs->element_type = parse_enum_text(key, v, parse_element_type);
    } else {
      unknown();
    }
  }
}

}  // namespace

InputSpec apply_overrides(const InputSpec& spec, const PipelineOverrides& overrides) {
  InputSpec out = spec;
  for (const auto& [key, value] : overrides) {
    std::string kind;
    std::string param;
    if (auto dot = key.find('.'); dot != std::string::npos) {
      kind = key.substr(0, dot);
      param = key.substr(dot + 1);
    } else {
      auto it = bare_parameter_owners().find(key);
      if (it == bare_parameter_owners().end()) {
        throw Error(ErrorCode::kInvalidArgument, "unknown override '" + key + "'");
      }
      kind = it->second;
      param = key;
    }

    auto matches = [&](const ProcessingStep& s) { return step_kind(s) == kind; };
    if (param == "enabled") {
      if (!parse_bool_text(key, value)) {
        std::erase_if(out.processing, matches);
      }
      continue;
    }

    bool found = false;
    for (auto& step : out.processing) {
      if (matches(step)) {
        apply_to_step(step, key, param, value);
        found = true;
      }
    }
    if (found) continue;
    if (kind == "decode") {
      DecodeStep d;
      d.data_layout = spec.layout.value_or(DataLayout::kNHWC);
      d.color_layout = spec.color_layout.value_or(ColorLayout::kRGB);
      ProcessingStep step = d;
      apply_to_step(step, key, param, value);
      out.processing.insert(out.processing.begin(), step);
    } else if (kind == "cast") {
      ProcessingStep step = CastStep{spec.element_type == ElementType::kFloat32
                                         ? ElementType::kFloat32
                                         : ElementType::kUint8,
                                     OrderPolicy::kConvertThenNormalize};
      apply_to_step(step, key, param, value);
      out.processing.push_back(step);
    } else {
      throw Error(ErrorCode::kNotFound,
                  "override '" + key + "' targets step '" + kind + "' which the manifest does not define");
    }
  }
  return out;
}

nlohmann::json PipelineProvenance::to_json() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json j = {{"index", s.index}, {"kind", s.kind}, {"params", s.params}};
    if (s.implicit) j["implicit"] = true;
    steps_json.push_back(std::move(j));
  }
  nlohmann::json j = {{"format", format},
                      {"decoder", decoder},
                      {"steps", std::move(steps_json)},
                      {"output",
                       {{"dims", output_dims},
                        {"layout", to_string(output_layout)},
                        {"element_type", to_string(output_type)}}}};
  j["dct_method"] = dct_method ? nlohmann::json(to_string(*dct_method)) : nlohmann::json(nullptr);
  return j;
}

namespace {

nlohmann::json step_json(const ProcessingStep& step) {
  struct Visitor {
    nlohmann::json operator()(const DecodeStep& s) const {
      return {{"element_type", to_string(s.element_type)},
              {"data_layout", to_string(s.data_layout)},
              {"color_layout", to_string(s.color_layout)},
              {"dct_method", to_string(s.dct_method)}};
    }
    nlohmann::json operator()(const CropStep& s) const {
      return {{"method", s.method}, {"percentage", s.percentage}};
    }
    nlohmann::json operator()(const ResizeStep& s) const {
      return {{"dimensions", s.dimensions},
              {"method", s.method},
              {"keep_aspect_ratio", s.keep_aspect_ratio}};
    }
    nlohmann::json operator()(const MeanStep& s) const { return {{"values", s.values}}; }
    nlohmann::json operator()(const RescaleStep& s) const { return {{"value", s.value}}; }
    nlohmann::json operator()(const CastStep& s) const {
      return {{"element_type", to_string(s.element_type)},
              {"order_policy", to_string(s.order_policy)}};
    }
  };
  return std::visit(Visitor{}, step);
}

}  // namespace

PipelineResult run_pipeline(const InputSpec& spec, std::span<const uint8_t> raw,
                            const PipelineOptions& opts) {
  PipelineProvenance prov;

  DecodeStep decode;
  decode.data_layout = spec.layout.value_or(DataLayout::kNHWC);
  decode.color_layout = spec.color_layout.value_or(ColorLayout::kRGB);
  const bool explicit_decode =
      !spec.processing.empty() && std::holds_alternative<DecodeStep>(spec.processing.front());
  if (explicit_decode) decode = std::get<DecodeStep>(spec.processing.front());

  OrderPolicy policy = OrderPolicy::kConvertThenNormalize;
  for (const auto& step : spec.processing) {
    if (const auto* c = std::get_if<CastStep>(&step)) {
      policy = c->order_policy;
      break;
    }
  }

  DecodedImage decoded;
  try {
    decoded = decode_image(raw, DecodeOptions{decode.color_layout, decode.dct_method, opts.jpeg_decoder});
  } catch (const Error& e) {
    throw Error(e.code(), "processing step 0 (decode): " + std::string(e.what()));
  }
  prov.format = std::string(to_string(decoded.format));
  prov.decoder = decoded.decoder;
  prov.dct_method = decoded.dct_method;
  prov.steps.push_back(ProvenanceStep{0, "decode", step_json(decode), !explicit_decode});

  ImageBuffer img = std::move(decoded.image);
  bool byte_domain = true;
  for (size_t i = explicit_decode ? 1 : 0; i < spec.processing.size(); ++i) {
    const ProcessingStep& step = spec.processing[i];
    const std::string kind(step_kind(step));
    try {
      if (std::holds_alternative<DecodeStep>(step)) {
        throw Error(ErrorCode::kInvalidArgument, "decode must be the first processing step");
      } else if (const auto* c = std::get_if<CropStep>(&step)) {
        img = center_crop(img, c->percentage);
      } else if (const auto* r = std::get_if<ResizeStep>(&step)) {
        if (r->dimensions[0] != img.channels()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "resize expects " + std::to_string(r->dimensions[0]) + " channels, image has " +
                          std::to_string(img.channels()));
        }
        img = resize_bilinear(img, r->dimensions[1], r->dimensions[2], r->keep_aspect_ratio);
      } else if (const auto* m = std::get_if<MeanStep>(&step)) {
        img = subtract_mean(img, m->values, policy, byte_domain);
      } else if (const auto* rs = std::get_if<RescaleStep>(&step)) {
        img = divide_by(img, rs->value, policy, byte_domain);
      } else if (const auto* cs = std::get_if<CastStep>(&step)) {
        img = cast_image(img, cs->element_type);
        byte_domain = false;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "processing step " + std::to_string(i) + " (" + kind + "): " + e.what());
    }
    prov.steps.push_back(ProvenanceStep{i, kind, step_json(step), false});
  }

  const ElementType want =
      spec.element_type == ElementType::kFloat32 ? ElementType::kFloat32 : ElementType::kUint8;
  if (img.element_type() != want) {
    img = cast_image(img, want);
    prov.steps.push_back(ProvenanceStep{spec.processing.size(), "cast",
                                        {{"element_type", to_string(want)},
                                         {"order_policy", to_string(policy)}},
                                        true});
  }

  PipelineResult result{to_tensor(img, decode.data_layout), std::move(prov)};
  if (spec.element_type == ElementType::kInt8) result.tensor.element_type = ElementType::kInt8;
  result.provenance.output_dims = result.tensor.dims;
  result.provenance.output_layout = decode.data_layout;
  result.provenance.output_type = result.tensor.element_type;
  return result;
}

}  // namespace evalscope
