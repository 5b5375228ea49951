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

#include "evalscope/error.h"
#include "evalscope/postprocess.h"
#include "oracles.h"

namespace evalscope {
namespace {

TEST(TopK, MatchesSelectionOracle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> classes(1, 40);
  std::uniform_int_distribution<int> coarse(0, 6);  // few distinct values, many ties
  for (int trial = 0; trial < 500; ++trial) {
    const int c = classes(rng);
    std::vector<float> p(c);
    for (auto& v : p) v = static_cast<float>(coarse(rng)) / 8.0f;
    std::vector<std::string> labels;
    for (int i = 0; i < c; ++i) labels.push_back("c" + std::to_string(i));
    const int k = std::uniform_int_distribution<int>(1, c)(rng);
    auto rows = top_k(Tensor::of_floats({1, c}, p), k, labels);
    ASSERT_EQ(rows.size(), 1u);
    auto expect = testing::top_k_oracle(p, static_cast<size_t>(k));
    ASSERT_EQ(rows[0].size(), expect.size());
    for (size_t i = 0; i < expect.size(); ++i) {
      EXPECT_EQ(rows[0][i].label_index, static_cast<int64_t>(expect[i]));
      EXPECT_EQ(rows[0][i].label, labels[expect[i]]);
      EXPECT_EQ(rows[0][i].rank, static_cast<int>(i) + 1);
      EXPECT_EQ(rows[0][i].probability, p[expect[i]]);
    }
  }
}

TEST(TopK, BatchesAndErrors) {
  auto t = Tensor::of_floats({2, 3}, {0.1f, 0.7f, 0.2f, 0.5f, 0.2f, 0.3f});
  auto rows = top_k(t, 2, {"a", "b", "c"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0].label, "b");
  EXPECT_EQ(rows[1][1].label, "c");
  EXPECT_THROW(top_k(t, 4, {"a", "b", "c"}), Error);
  EXPECT_THROW(top_k(t, 1, {"a", "b"}), Error);
  EXPECT_THROW(top_k(t, 0, {"a", "b", "c"}), Error);
  EXPECT_THROW(top_k(Tensor::of_floats({3}, {0.2f, 0.3f, 0.5f}), 1, {}), Error);
  auto flat = top_k(Tensor::of_floats({3}, {0.2f, 0.3f, 0.5f}), 1, {"a", "b", "c"});
  EXPECT_EQ(flat[0][0].label_index, 2);
}

TEST(Detections, ZipAndSort) {
  auto boxes = Tensor::of_floats({1, 3, 4}, {0.1f, 0.1f, 0.5f, 0.5f,  //
                                             0.0f, 0.0f, 1.0f, 1.0f,  //
                                             0.2f, 0.3f, 0.4f, 0.9f});
  auto scores = Tensor::of_floats({1, 3}, {0.5f, 0.9f, 0.5f});
  auto classes = Tensor::of_floats({1, 3}, {1, 7, 3});
  auto d = assemble_detections(boxes, scores, classes);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].class_index, 7);
  EXPECT_EQ(d[1].class_index, 1);  // stable among equal scores
  EXPECT_EQ(d[2].class_index, 3);
  EXPECT_FLOAT_EQ(static_cast<float>(d[2].box[3]), 0.9f);
}

TEST(Detections, MasksAndValidation) {
  auto boxes = Tensor::of_floats({1, 4}, {0.1f, 0.1f, 0.5f, 0.5f});
  auto scores = Tensor::of_floats({1}, {0.8f});
  auto classes = Tensor::of_floats({1}, {2});
  auto masks = Tensor::of_floats({1, 2, 2}, {0, 1, 1, 0});
  auto d = assemble_detections(boxes, scores, classes, masks);
  ASSERT_TRUE(d[0].mask.has_value());
  EXPECT_EQ(d[0].mask->dims, (std::vector<int64_t>{2, 2}));

  auto bad = Tensor::of_floats({1, 4}, {0.6f, 0.1f, 0.5f, 0.5f});
  EXPECT_THROW(assemble_detections(bad, scores, classes), Error);
  auto outside = Tensor::of_floats({1, 4}, {0.1f, 0.1f, 1.5f, 0.5f});
  EXPECT_THROW(assemble_detections(outside, scores, classes), Error);
  auto two_scores = Tensor::of_floats({2}, {0.8f, 0.1f});
  EXPECT_THROW(assemble_detections(boxes, two_scores, classes), Error);
  auto none = assemble_detections(Tensor::of_floats({0, 4}, {}), Tensor::of_floats({0}, {}),
                                  Tensor::of_floats({0}, {}));
  EXPECT_TRUE(none.empty());
}

TEST(Accuracy, TopOneAndTopFive) {
  auto rows = top_k(Tensor::of_floats({2, 6}, {0.5f, 0.1f, 0.1f, 0.1f, 0.1f, 0.1f,  //
                                               0.0f, 0.1f, 0.2f, 0.3f, 0.15f, 0.25f}),
                    5, {"a", "b", "c", "d", "e", "f"});
  auto r = score_accuracy(rows, {0, 4});
  EXPECT_EQ(r.n_samples, 2u);
  EXPECT_DOUBLE_EQ(r.top1, 0.5);
  EXPECT_DOUBLE_EQ(r.top5, 1.0);
  EXPECT_THROW(score_accuracy(rows, {0}), Error);
}

TEST(Labels, ParseLines) {
  EXPECT_EQ(parse_label_lines("a\nb\r\nc\n"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(parse_label_lines("a\n\nc"), (std::vector<std::string>{"a", "", "c"}));
  EXPECT_TRUE(parse_label_lines("").empty());
}

TEST(Json, ProbabilitiesAreRounded) {
  Prediction p{1, 3, "x", 0.123456789};
  EXPECT_EQ(to_json(p)["probability"].get<double>(), 0.123457);
}

}  // namespace
}  // namespace evalscope
