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

#include "evalscope/postprocess.h"

#include <algorithm>
#include <numeric>

#include "evalscope/error.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

// Drops leading 1-sized axes until `rank` remain.
std::vector<int64_t> squeeze_to(const Tensor& t, size_t rank, const char* what) {
  std::vector<int64_t> dims = t.dims;
  while (dims.size() > rank && dims.front() == 1) dims.erase(dims.begin());
  if (dims.size() != rank) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " must have rank " + std::to_string(rank));
  }
  return dims;
}

}  // namespace

std::vector<std::vector<Prediction>> top_k(const Tensor& probabilities, int k,
                                           const std::vector<std::string>& labels) {
  probabilities.check();
  int64_t rows = 1;
  int64_t cols = 0;
  if (probabilities.dims.size() == 1) {
    cols = probabilities.dims[0];
  } else if (probabilities.dims.size() == 2) {
    rows = probabilities.dims[0];
    cols = probabilities.dims[1];
  } else {
    throw Error(ErrorCode::kShapeMismatch, "probabilities must be [N, C]");
  }
  if (static_cast<int64_t>(labels.size()) != cols) {
    throw Error(ErrorCode::kInvalidArgument, "label count " + std::to_string(labels.size()) +
                                                 " does not match " + std::to_string(cols) +
                                                 " classes");
  }
  if (k < 1 || k > cols) {
    throw Error(ErrorCode::kInvalidArgument,
                "k=" + std::to_string(k) + " is outside [1, " + std::to_string(cols) + "]");
  }
  std::vector<std::vector<Prediction>> out;
  out.reserve(static_cast<size_t>(rows));
  std::vector<int64_t> order(static_cast<size_t>(cols));
  for (int64_t r = 0; r < rows; ++r) {
    std::iota(order.begin(), order.end(), 0);
    auto prob = [&](int64_t c) { return probabilities.value(static_cast<size_t>(r * cols + c)); };
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return prob(a) > prob(b); });
    std::vector<Prediction> row;
    for (int i = 0; i < k; ++i) {
      const int64_t c = order[static_cast<size_t>(i)];
      row.push_back(Prediction{i + 1, c, labels[static_cast<size_t>(c)], prob(c)});
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<DetectionFeature> assemble_detections(const Tensor& boxes, const Tensor& scores,
                                                  const Tensor& classes,
                                                  const std::optional<Tensor>& masks) {
  boxes.check();
  scores.check();
  classes.check();
  if (boxes.element_count() == 0 && scores.element_count() == 0 &&
      classes.element_count() == 0) {
    return {};
  }
  const auto bd = squeeze_to(boxes, 2, "boxes");
  const auto sd = squeeze_to(scores, 1, "scores");
  const auto cd = squeeze_to(classes, 1, "classes");
  const int64_t n = bd[0];
  if (bd[1] != 4) throw Error(ErrorCode::kShapeMismatch, "boxes must be [N, 4]");
  if (sd[0] != n || cd[0] != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "detection counts disagree: boxes " + std::to_string(n) + ", scores " +
                    std::to_string(sd[0]) + ", classes " + std::to_string(cd[0]));
  }
  std::vector<int64_t> md;
  if (masks) {
    masks->check();
    md = squeeze_to(*masks, 3, "masks");
    if (md[0] != n) {
      throw Error(ErrorCode::kShapeMismatch, "masks hold " + std::to_string(md[0]) +
                                                 " detections, expected " + std::to_string(n));
    }
  }
  std::vector<DetectionFeature> out;
  out.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    DetectionFeature f;
    for (int j = 0; j < 4; ++j) f.box[j] = boxes.value(static_cast<size_t>(i * 4 + j));
    for (double v : f.box) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "detection " + std::to_string(i) + " has a box coordinate outside [0, 1]");
      }
    }
    if (f.box[0] > f.box[2] || f.box[1] > f.box[3]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "detection " + std::to_string(i) + " has an inverted box");
    }
    f.score = scores.value(static_cast<size_t>(i));
    f.class_index = static_cast<int64_t>(classes.value(static_cast<size_t>(i)));
    if (masks) {
      const int64_t plane = md[1] * md[2];
      std::vector<float> m(static_cast<size_t>(plane));
      for (int64_t p = 0; p < plane; ++p) m[p] = masks->value(static_cast<size_t>(i * plane + p));
      f.mask = Tensor::of_floats({md[1], md[2]}, std::move(m));
    }
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(), [](const DetectionFeature& a, const DetectionFeature& b) {
    return a.score > b.score;
  });
  return out;
}

AccuracyReport score_accuracy(const std::vector<std::vector<Prediction>>& results,
                              const std::vector<int64_t>& ground_truth) {
  if (results.size() != ground_truth.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(results.size()) + " results for " +
                    std::to_string(ground_truth.size()) + " ground-truth labels");
  }
  AccuracyReport r;
  r.n_samples = results.size();
  if (r.n_samples == 0) return r;
  size_t hit1 = 0;
  size_t hit5 = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    for (const auto& p : results[i]) {
      if (p.rank > 5 || p.label_index != ground_truth[i]) continue;
      ++hit5;
      if (p.rank == 1) ++hit1;
      break;
    }
  }
  r.top1 = static_cast<double>(hit1) / static_cast<double>(r.n_samples);
  r.top5 = static_cast<double>(hit5) / static_cast<double>(r.n_samples);
  return r;
}

std::vector<std::string> parse_label_lines(std::string_view text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

std::vector<std::string> load_labels(const std::filesystem::path& path) {
  return parse_label_lines(read_file_text(path));
}

nlohmann::json to_json(const Prediction& p) {
  return {{"rank", p.rank},
          {"label_index", p.label_index},
          {"label", p.label},
          {"probability", round6(p.probability)}};
}

nlohmann::json to_json(const DetectionFeature& d) {
  nlohmann::json j = {{"box", {round6(d.box[0]), round6(d.box[1]), round6(d.box[2]), round6(d.box[3])}},
                      {"class_index", d.class_index},
                      {"score", round6(d.score)}};
  if (d.mask) {
    j["mask_dims"] = d.mask->dims;
    nlohmann::json values = nlohmann::json::array();
    for (int64_t i = 0; i < d.mask->element_count(); ++i) {
      values.push_back(round6(d.mask->value(static_cast<size_t>(i))));
    }
    j["mask"] = std::move(values);
  }
  return j;
}

nlohmann::json to_json(const AccuracyReport& r) {
  return {{"n_samples", r.n_samples}, {"top1", r.top1}, {"top5", r.top5}};
}

}  // namespace evalscope
