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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/image.h"

namespace evalscope {

struct Prediction {
  int rank = 0;  // 1-based
  int64_t label_index = 0;
  std::string label;
  double probability = 0.0;
  bool operator==(const Prediction&) const = default;
};

/// `probabilities` is [N, C] (or [C] for a single sample). Each row is
/// sorted stably by descending probability, ties going to the lower index.
/// Probabilities are reported as given, not renormalized. `labels` must
/// hold one name per class and k must lie in [1, C].
std::vector<std::vector<Prediction>> top_k(const Tensor& probabilities, int k,
                                           const std::vector<std::string>& labels);

struct DetectionFeature {
  std::array<double, 4> box{};  // ymin, xmin, ymax, xmax, normalized
  int64_t class_index = 0;
  double score = 0.0;
  std::optional<Tensor> mask;  // [H, W], passed through as produced
  bool operator==(const DetectionFeature&) const = default;
};

/// Zips [N,4] boxes, [N] scores and [N] classes (leading batch dimension of
/// 1 is accepted on each) plus optional [N,H,W] masks into one feature per
/// detection, sorted by descending score (stable).
std::vector<DetectionFeature> assemble_detections(const Tensor& boxes, const Tensor& scores,
                                                  const Tensor& classes,
                                                  const std::optional<Tensor>& masks = std::nullopt);

struct AccuracyReport {
  size_t n_samples = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  bool operator==(const AccuracyReport&) const = default;
};

AccuracyReport score_accuracy(const std::vector<std::vector<Prediction>>& results,
                              const std::vector<int64_t>& ground_truth);

/// One label per line; the line number is the label index. A trailing
/// newline does not add an empty label.
std::vector<std::string> parse_label_lines(std::string_view text);
std::vector<std::string> load_labels(const std::filesystem::path& path);

nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const DetectionFeature& d);
nlohmann::json to_json(const AccuracyReport& r);

}  // namespace evalscope
