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

#include "evalscope/predictor.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "evalscope/error.h"
#include "evalscope/postprocess.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

LinearWeights load_weights_file(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file_text(path), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kInvalidArgument, "weights asset " + path.filename().string() +
                                                 " is not JSON");
  }
  return LinearWeights::from_json(j);
}

class LinearModel : public BackendModel {
 public:
  LinearModel(LinearWeights w, nlohmann::json info) : w_(std::move(w)), info_(std::move(info)) {}

  std::vector<Tensor> predict(const Tensor& input, TraceCollector* trace,
                              std::optional<uint64_t> parent) override {
    const size_t f = w_.weights.front().size();
    std::vector<double> feats;
    {
      ScopedSpan span(trace, TraceLevel::kLayer, "features", parent);
      feats = channel_means(input, f, w_.expected_layout);
    }
    std::vector<double> logits(w_.classes.size());
    {
      ScopedSpan span(trace, TraceLevel::kLayer, "fc", parent);
      ScopedSpan gemv(trace, TraceLevel::kLibrary, "gemv", span.id());
      for (size_t c = 0; c < logits.size(); ++c) {
        double acc = w_.bias[c];
        for (size_t i = 0; i < f; ++i) acc += w_.weights[c][i] * feats[i];
        logits[c] = acc;
      }
    }
    std::vector<float> probs(logits.size());
    {
      ScopedSpan span(trace, TraceLevel::kLayer, "softmax", parent);
      const auto p = softmax(logits);
      for (size_t c = 0; c < p.size(); ++c) probs[c] = static_cast<float>(p[c]);
    }
    const auto n = static_cast<int64_t>(probs.size());
    return {Tensor::of_floats({1, n}, std::move(probs))};
  }

  std::vector<std::string> class_names() const override { return w_.classes; }
  nlohmann::json describe() const override { return info_; }

 private:
  LinearWeights w_;
  nlohmann::json info_;
};

class ReferenceLinearBackend : public PredictorBackend {
 public:
  std::string kind() const override { return "reference_linear"; }
  BackendCapabilities capabilities() const override {
    return {{Task::kClassification}, {ElementType::kFloat32, ElementType::kUint8, ElementType::kInt8}};
  }
  std::unique_ptr<BackendModel> load(const ModelManifest&, const LoadedAssets& assets) const override {
    auto w = load_weights_file(assets.graph);
    nlohmann::json info = {{"weights_sha256", sha256_file(assets.graph)},
                           {"expected_layout", to_string(w.expected_layout)},
                           {"expected_color_layout", to_string(w.expected_color_layout)}};
    return std::make_unique<LinearModel>(std::move(w), std::move(info));
  }
};

class BitfileBackend : public PredictorBackend {
 public:
  std::string kind() const override { return "bitfile"; }
  BackendCapabilities capabilities() const override {
    return {{Task::kClassification}, {ElementType::kFloat32, ElementType::kUint8, ElementType::kInt8}};
  }
  std::unique_ptr<BackendModel> load(const ModelManifest&, const LoadedAssets& assets) const override {
    if (!assets.weights) {
      throw Error(ErrorCode::kInvalidArgument, "bitfile backend needs source.weights_path");
    }
    auto w = load_weights_file(*assets.weights);
    nlohmann::json info = {{"bitfile_sha256", sha256_file(assets.graph)},
                           {"bitfile_bytes", std::filesystem::file_size(assets.graph)},
                           {"weights_sha256", sha256_file(*assets.weights)},
                           {"expected_layout", to_string(w.expected_layout)},
                           {"expected_color_layout", to_string(w.expected_color_layout)}};
    return std::make_unique<LinearModel>(std::move(w), std::move(info));
  }
};

class LocalProvisioner : public Provisioner {
 public:
  void provision(const std::string&) override {}
};

}  // namespace

LinearWeights LinearWeights::from_json(const nlohmann::json& j) {
  LinearWeights w;
  try {
    w.classes = j.at("classes").get<std::vector<std::string>>();
    w.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    w.bias = j.at("bias").get<std::vector<double>>();
    if (j.contains("expected_layout")) {
      auto l = parse_data_layout(j.at("expected_layout").get<std::string>());
      if (!l) throw Error(ErrorCode::kInvalidArgument, "weights: bad expected_layout");
      w.expected_layout = *l;
    }
    if (j.contains("expected_color_layout")) {
      auto c = parse_color_layout(j.at("expected_color_layout").get<std::string>());
      if (!c) throw Error(ErrorCode::kInvalidArgument, "weights: bad expected_color_layout");
      w.expected_color_layout = *c;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("weights: ") + e.what());
  }
  if (w.classes.empty()) throw Error(ErrorCode::kInvalidArgument, "weights: no classes");
  if (w.weights.size() != w.classes.size() || w.bias.size() != w.classes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "weights: classes, weights and bias lengths differ");
  }
  const size_t f = w.weights.front().size();
  if (f == 0) throw Error(ErrorCode::kInvalidArgument, "weights: empty rows");
  for (size_t c = 0; c < w.weights.size(); ++c) {
    if (w.weights[c].size() != f) throw Error(ErrorCode::kInvalidArgument, "weights: ragged rows");
    for (double v : w.weights[c]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "weights: non-finite value");
    }
    if (!std::isfinite(w.bias[c])) throw Error(ErrorCode::kInvalidArgument, "weights: non-finite bias");
  }
  return w;
}

nlohmann::json LinearWeights::to_json() const {
  return {{"classes", classes},
          {"weights", weights},
          {"bias", bias},
          {"expected_layout", to_string(expected_layout)},
          {"expected_color_layout", to_string(expected_color_layout)}};
}

std::vector<double> channel_means(const Tensor& input, size_t channels, DataLayout layout) {
  input.check();
  const auto n = static_cast<size_t>(input.element_count());
  if (channels == 0 || n == 0 || n % channels != 0) {
    throw Error(ErrorCode::kShapeMismatch, "input of " + std::to_string(n) +
                                               " elements cannot hold " + std::to_string(channels) +
                                               " channels");
  }
  const size_t per_channel = n / channels;
  std::vector<double> sums(channels, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const size_t c = layout == DataLayout::kNHWC ? i % channels : i / per_channel;
    sums[c] += static_cast<double>(input.value(i));
  }
  for (double& s : sums) s /= static_cast<double>(per_channel);
  return sums;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) return {};
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::unique_ptr<BackendModel> make_linear_model(LinearWeights weights) {
  nlohmann::json info = {{"expected_layout", to_string(weights.expected_layout)},
                         {"expected_color_layout", to_string(weights.expected_color_layout)}};
  return std::make_unique<LinearModel>(std::move(weights), std::move(info));
}

std::shared_ptr<const PredictorBackend> make_reference_linear_backend() {
  return std::make_shared<ReferenceLinearBackend>();
}

std::shared_ptr<const PredictorBackend> make_bitfile_backend() {
  return std::make_shared<BitfileBackend>();
}

std::shared_ptr<Provisioner> make_local_provisioner() { return std::make_shared<LocalProvisioner>(); }

BackendRegistry BackendRegistry::with_defaults() {
  BackendRegistry r;
  auto linear = make_reference_linear_backend();
  for (const char* name : {"TensorFlow", "Caffe", "Caffe2", "MXNet", "PyTorch", "TensorRT"}) {
    r.add(name, linear);
  }
  r.add("FPGA", make_bitfile_backend());
  return r;
}

void BackendRegistry::add(const std::string& framework,
                          std::shared_ptr<const PredictorBackend> backend) {
  by_framework_[lower(framework)] = std::move(backend);
}

std::shared_ptr<const PredictorBackend> BackendRegistry::find(const std::string& framework) const {
  if (auto it = by_framework_.find(lower(framework)); it != by_framework_.end()) return it->second;
  std::string known;
  for (const auto& [name, backend] : by_framework_) {
    known += (known.empty() ? "" : ", ") + name + " (" + backend->kind() + ")";
  }
  throw Error(ErrorCode::kNoBackend, "no backend registered for framework '" + framework +
                                         "'; registered: " + (known.empty() ? "none" : known));
}

std::vector<std::string> BackendRegistry::frameworks() const {
  std::vector<std::string> out;
  for (const auto& [name, backend] : by_framework_) out.push_back(name);
  return out;
}

PredictorSession::PredictorSession(ModelManifest manifest, std::string backend_kind,
                                   std::string container, std::string device,
                                   std::unique_ptr<BackendModel> model,
                                   std::vector<std::string> labels)
    : manifest_(std::move(manifest)),
      backend_kind_(std::move(backend_kind)),
      container_(std::move(container)),
      device_(std::move(device)),
      model_(std::move(model)),
      labels_(std::move(labels)) {
  for (const auto& [k, v] : manifest_.envvars) environment_[k] = v;
}

std::string PredictorSession::input_layer() const {
  return manifest_.inputs.empty() ? std::string() : manifest_.inputs.front().layer_name;
}

std::vector<std::string> PredictorSession::output_layers() const {
  std::vector<std::string> out;
  for (const auto& o : manifest_.outputs) {
    out.push_back(o.layer_name.empty() ? std::string(to_string(o.type)) : o.layer_name);
  }
  return out;
}

nlohmann::json PredictorSession::describe() const {
  return {{"backend", backend_kind_},
          {"container", container_},
          {"device", device_},
          {"environment", environment_},
          {"model", model_->describe()}};
}

std::map<std::string, Tensor> PredictorSession::predict(const Tensor& input, TraceCollector* trace,
                                                        std::optional<uint64_t> parent_span) {
  std::lock_guard lock(mu_);
  if (closed_) throw Error(ErrorCode::kFailedPrecondition, "session is closed");
  input.check();
  const InputSpec& spec = manifest_.inputs.front();
  if (input.element_type != spec.element_type) {
    throw Error(ErrorCode::kShapeMismatch, "input element type " +
                                               std::string(to_string(input.element_type)) +
                                               " does not match manifest " +
                                               std::string(to_string(spec.element_type)));
  }
  if (input.dims.size() != 4 || input.dims[0] != 1) {
    throw Error(ErrorCode::kShapeMismatch, "input must be a single-image 4-d batch");
  }
  for (const auto& step : spec.processing) {
    const auto* r = std::get_if<ResizeStep>(&step);
    if (r == nullptr || !input.layout) continue;
    const bool nhwc = *input.layout == DataLayout::kNHWC;
    const std::array<int64_t, 3> chw = {nhwc ? input.dims[3] : input.dims[1],
                                        nhwc ? input.dims[1] : input.dims[2],
                                        nhwc ? input.dims[2] : input.dims[3]};
    if (chw[0] != r->dimensions[0] || chw[1] != r->dimensions[1] || chw[2] != r->dimensions[2]) {
      throw Error(ErrorCode::kShapeMismatch, "input dims do not match the manifest resize dimensions");
    }
  }
  ++predict_calls_;
  std::vector<Tensor> outs;
  {
    ScopedSpan span(trace, TraceLevel::kFramework, "predict", parent_span);
    span.tag("backend", backend_kind_);
    outs = model_->predict(input, trace, span.id());
  }
  const auto names = output_layers();
  std::map<std::string, Tensor> keyed;
  for (size_t i = 0; i < outs.size() && i < names.size(); ++i) keyed[names[i]] = std::move(outs[i]);
  return keyed;
}

void PredictorSession::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
}

bool PredictorSession::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::shared_ptr<PredictorSession> load_model(const ModelManifest& manifest,
                                             const BackendRegistry& backends, AssetCache& cache,
                                             const LoadOptions& opts, Provisioner* provisioner) {
  auto backend = backends.find(manifest.framework.name);
  const auto caps = backend->capabilities();
  if (std::find(caps.tasks.begin(), caps.tasks.end(), manifest.task) == caps.tasks.end()) {
    throw Error(ErrorCode::kUnsupported, "backend " + backend->kind() + " does not support task " +
                                             std::string(to_string(manifest.task)));
  }
  if (manifest.inputs.empty() || manifest.outputs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "manifest needs at least one input and output");
  }

  std::string container;
  if (!manifest.containers.empty()) {
    container = resolve_container(manifest, opts.architecture, opts.device);
    if (provisioner != nullptr) provisioner->provision(container);
  }

  const auto& src = manifest.source;
  LoadedAssets assets;
  assets.graph = cache.fetch(resolve_asset_url(src.graph_path, src.base_url, opts.manifest_dir),
                             src.graph_checksum);
  if (src.weights_path) {
    assets.weights = cache.fetch(
        resolve_asset_url(*src.weights_path, src.base_url, opts.manifest_dir), src.weights_checksum);
  }
  auto model = backend->load(manifest, assets);

  std::vector<std::string> labels = model->class_names();
  if (const auto& url = manifest.outputs.front().features_url) {
    auto path = cache.fetch(resolve_asset_url(*url, src.base_url, opts.manifest_dir));
    auto from_file = load_labels(path);
    if (!labels.empty() && from_file.size() != labels.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label file has " + std::to_string(from_file.size()) + " labels, model has " +
                      std::to_string(labels.size()) + " classes");
    }
    labels = std::move(from_file);
  }
  return std::make_shared<PredictorSession>(manifest, backend->kind(), container, opts.device,
                                            std::move(model), std::move(labels));
}

}  // namespace evalscope
