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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/image.h"
#include "evalscope/manifest.h"
#include "evalscope/tracing.h"

namespace evalscope {

/// Content-addressed download cache laid out as `<root>/<sha256>/<basename>`.
/// Entries are keyed by (url, checksum); a hit never transfers again, and
/// concurrent fetches of one key share a single transfer. There is no
/// eviction.
class AssetCache {
 public:
  /// Fetches the body of an http(s) URL. Replaceable for tests.
  using HttpFetcher = std::function<std::string(const std::string& url)>;

  explicit AssetCache(std::filesystem::path root, HttpFetcher http = {});

  /// Supports file:// and http(s):// URLs. `checksum` is hex SHA-256,
  /// optionally prefixed with "sha256:". Throws Error(kChecksumMismatch),
  /// Error(kNetwork), Error(kUnsupported) or Error(kIo); a failed fetch
  /// leaves no entry behind.
  std::filesystem::path fetch(const std::string& url,
                              const std::optional<std::string>& checksum = std::nullopt);

  const std::filesystem::path& root() const { return root_; }
  /// Number of transfers actually performed (cache hits excluded).
  size_t download_count() const { return downloads_.load(); }
  void purge();

 private:
  std::filesystem::path lookup(const std::string& key, const std::string& url,
                               const std::optional<std::string>& checksum) const;
  std::filesystem::path download(const std::string& key, const std::string& url,
                                 const std::optional<std::string>& checksum);

  std::filesystem::path root_;
  HttpFetcher http_;
  std::atomic<size_t> downloads_{0};
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::filesystem::path>> inflight_;
};

/// Lower-case hex digest with any "sha256:" prefix removed.
std::string normalize_checksum(const std::string& checksum);

/// Resolves a manifest asset reference: absolute URLs pass through,
/// otherwise the path is joined to `base_url` when set, else made a file://
/// URL relative to `manifest_dir`.
std::string resolve_asset_url(const std::string& path, const std::optional<std::string>& base_url,
                              const std::filesystem::path& manifest_dir);

struct BackendCapabilities {
  std::vector<Task> tasks;
  std::vector<ElementType> element_types;
};

/// Files a backend loads from, already downloaded and verified.
struct LoadedAssets {
  std::filesystem::path graph;
  std::optional<std::filesystem::path> weights;
};

/// A loaded model inside a backend. Implementations must be safe for
/// concurrent predict calls on distinct instances.
class BackendModel {
 public:
  virtual ~BackendModel() = default;
  /// `input` is the pipeline output; returns output tensors in the order of
  /// the manifest outputs.
  virtual std::vector<Tensor> predict(const Tensor& input, TraceCollector* trace,
                                      std::optional<uint64_t> parent_span) = 0;
  virtual std::vector<std::string> class_names() const { return {}; }
  virtual nlohmann::json describe() const { return nlohmann::json::object(); }
};

class PredictorBackend {
 public:
  virtual ~PredictorBackend() = default;
  virtual std::string kind() const = 0;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::unique_ptr<BackendModel> load(const ModelManifest& manifest,
                                             const LoadedAssets& assets) const = 0;
};

/// Weights asset: {"classes": [..], "weights": [[..]] (C x F), "bias": [..],
/// "expected_layout": "NHWC", "expected_color_layout": "RGB"}.
///
/// features(x) are the F per-channel means of the input read as the
/// expected layout with F channels, whatever layout the tensor claims; the
/// output is softmax(W * features + b) as a [1, C] float32 tensor.
struct LinearWeights {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  DataLayout expected_layout = DataLayout::kNHWC;
  ColorLayout expected_color_layout = ColorLayout::kRGB;

  static LinearWeights from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

std::vector<double> channel_means(const Tensor& input, size_t channels, DataLayout layout);
std::vector<double> softmax(const std::vector<double>& logits);

/// The linear model both reference backends load, usable without assets.
std::unique_ptr<BackendModel> make_linear_model(LinearWeights weights);

/// Stands in for the real frameworks. graph_path is the weights asset.
std::shared_ptr<const PredictorBackend> make_reference_linear_backend();
/// Custom-hardware style agent: graph_path is an opaque bitfile that is
/// only recorded (size, digest); weights_path carries the linear weights.
std::shared_ptr<const PredictorBackend> make_bitfile_backend();

/// Maps manifest framework names (case-insensitive) to backends.
class BackendRegistry {
 public:
  /// TensorFlow, Caffe, Caffe2, MXNet, PyTorch, TensorRT -> reference_linear;
  /// FPGA -> bitfile.
  static BackendRegistry with_defaults();

  void add(const std::string& framework, std::shared_ptr<const PredictorBackend> backend);
  /// Throws Error(kNoBackend) naming the registered frameworks and kinds.
  std::shared_ptr<const PredictorBackend> find(const std::string& framework) const;
  std::vector<std::string> frameworks() const;

 private:
  std::map<std::string, std::shared_ptr<const PredictorBackend>> by_framework_;
};

struct LoadOptions {
  std::string architecture = "amd64";
  std::string device = "cpu";
  std::filesystem::path manifest_dir = ".";
};

/// Container launch hook. The local implementation launches nothing; the
/// resolved reference is recorded on the session.
class Provisioner {
 public:
  virtual ~Provisioner() = default;
  virtual void provision(const std::string& container_ref) = 0;
};
std::shared_ptr<Provisioner> make_local_provisioner();

/// A loaded model ready to serve. predict calls are serialized.
class PredictorSession {
 public:
  PredictorSession(ModelManifest manifest, std::string backend_kind, std::string container,
                   std::string device, std::unique_ptr<BackendModel> model,
                   std::vector<std::string> labels);

  const ModelManifest& manifest() const { return manifest_; }
  const std::string& backend_kind() const { return backend_kind_; }
  const std::string& container() const { return container_; }
  const std::string& device() const { return device_; }
  /// Environment variables from the manifest, as the session would export
  /// them to the framework.
  const std::map<std::string, std::string>& environment() const { return environment_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string input_layer() const;
  std::vector<std::string> output_layers() const;
  nlohmann::json describe() const;

  /// Checks the tensor against the manifest input, runs the backend, and
  /// keys outputs by layer name (output type name when the layer name is
  /// empty). Emits framework and layer spans under `parent_span`. Throws
  /// Error(kShapeMismatch) or Error(kFailedPrecondition) once closed.
  std::map<std::string, Tensor> predict(const Tensor& input, TraceCollector* trace = nullptr,
                                        std::optional<uint64_t> parent_span = std::nullopt);

  void close();
  bool closed() const;
  size_t predict_calls() const { return predict_calls_.load(); }

 private:
  ModelManifest manifest_;
  std::string backend_kind_;
  std::string container_;
  std::string device_;
  std::map<std::string, std::string> environment_;
  std::unique_ptr<BackendModel> model_;
  std::vector<std::string> labels_;
  mutable std::mutex mu_;
  bool closed_ = false;
  std::atomic<size_t> predict_calls_{0};
};

/// Downloads the manifest's assets, loads the backend registered for its
/// framework, and records envvars and the container. Labels come from the
/// first output's features_url when present, else from the backend.
std::shared_ptr<PredictorSession> load_model(const ModelManifest& manifest,
                                             const BackendRegistry& backends, AssetCache& cache,
                                             const LoadOptions& opts = {},
                                             Provisioner* provisioner = nullptr);

}  // namespace evalscope
