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

#include <filesystem>
#include <set>

#include "evalscope/error.h"
#include "evalscope/fixtures.h"
#include "evalscope/manifest.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

namespace fs = std::filesystem;

const fs::path kData = EVALSCOPE_TEST_DATA_DIR;

ModelManifest load(const std::string& name) {
  return parse_manifest(read_file_text(kData / "manifests" / (name + ".yml")));
}

std::vector<std::string> step_kinds(const InputSpec& in) {
  std::vector<std::string> out;
  for (const auto& s : in.processing) out.emplace_back(step_kind(s));
  return out;
}

class ManifestCorpus : public ::testing::TestWithParam<std::string> {};

TEST_P(ManifestCorpus, CanonicalFormMatchesGolden) {
  const std::string name = GetParam();
  ModelManifest m = load(name);
  EXPECT_EQ(serialize_manifest(m),
            read_file_text(kData / "golden" / (name + ".canonical.yml")));
}

TEST_P(ManifestCorpus, ReportMatchesGolden) {
  ModelManifest m = load(GetParam());
  auto golden = nlohmann::json::parse(
      read_file_text(kData / "golden" / (GetParam() + ".report.json")));
  EXPECT_EQ(validate_manifest(m).to_json(), golden);
  EXPECT_FALSE(validate_manifest(m).has_errors());
}

TEST_P(ManifestCorpus, RoundTripIsStable) {
  ModelManifest m = load(GetParam());
  std::string once = serialize_manifest(m);
  ModelManifest again = parse_manifest(once);
  EXPECT_EQ(serialize_manifest(again), once);
  EXPECT_EQ(again.inputs.size(), m.inputs.size());
  for (size_t i = 0; i < m.inputs.size(); ++i) {
    EXPECT_EQ(again.inputs[i].processing, m.inputs[i].processing);
  }
  EXPECT_EQ(again.outputs, m.outputs);
}

INSTANTIATE_TEST_SUITE_P(Corpus, ManifestCorpus,
                         ::testing::Values("inception_v3", "ssd_mobilenet_v1_coco",
                                           "mask_rcnn_resnet50_v2_atrous_coco"));

TEST(Manifest, ClassificationFields) {
  ModelManifest m = load("inception_v3");
  EXPECT_EQ(m.name, "Inception-v3");
  EXPECT_EQ(m.version, SemVer::parse("1.0.0"));
  EXPECT_EQ(m.task, Task::kClassification);
  EXPECT_EQ(m.license, "MIT");
  EXPECT_EQ(m.framework.name, "TensorFlow");
  EXPECT_EQ(m.framework.version_constraint.to_string(), "^1.x");
  EXPECT_EQ(m.containers.at("ppc64le").at("gpu"), "mlcn/tensorflow:1-13-0_ppc64le-gpu");
  ASSERT_EQ(m.envvars.size(), 1u);
  EXPECT_EQ(m.envvars[0].first, "TF_ENABLE_WINOGRAD_NONFUSED");
  EXPECT_EQ(m.envvars[0].second, "0");
  ASSERT_EQ(m.inputs.size(), 1u);
  EXPECT_EQ(step_kinds(m.inputs[0]),
            (std::vector<std::string>{"decode", "crop", "resize", "mean", "rescale"}));
  const auto& resize = std::get<ResizeStep>(m.inputs[0].processing[2]);
  EXPECT_EQ(resize.dimensions, (std::array<int, 3>{3, 299, 299}));
  EXPECT_TRUE(resize.keep_aspect_ratio);
  EXPECT_DOUBLE_EQ(std::get<CropStep>(m.inputs[0].processing[1]).percentage, 87.5);
  EXPECT_EQ(std::get<DecodeStep>(m.inputs[0].processing[0]).element_type, ElementType::kInt8);
  EXPECT_EQ(m.outputs.at(0).features_url, "https://.../synset.txt");
  ASSERT_TRUE(m.training_dataset.has_value());
  EXPECT_EQ(m.training_dataset->name, "ILSVRC 2012");
}

TEST(Manifest, DetectionAndSegmentationOutputs) {
  ModelManifest ssd = load("ssd_mobilenet_v1_coco");
  EXPECT_EQ(ssd.task, Task::kObjectDetection);
  EXPECT_EQ(ssd.framework.version_constraint.to_string(), "1.12.x");
  ASSERT_EQ(ssd.outputs.size(), 3u);
  EXPECT_EQ(ssd.outputs[0].type, OutputType::kBox);
  EXPECT_EQ(ssd.outputs[2].layer_name, "detection_classes");
  EXPECT_FALSE(ssd.attributes.is_null());

  ModelManifest mask = load("mask_rcnn_resnet50_v2_atrous_coco");
  EXPECT_EQ(mask.task, Task::kInstanceSegmentation);
  ASSERT_EQ(mask.outputs.size(), 4u);
  EXPECT_EQ(mask.outputs[3].type, OutputType::kMask);
  EXPECT_EQ(mask.outputs[1].layer_name, "1");
  EXPECT_EQ(mask.source.weights_path, "model-0000.params");
}

TEST(Manifest, StepOrderIsExecutionOrder) {
  std::string text = reference_manifest_text();
  // Swap crop after resize; the parsed order must follow the document.
  const std::string crop = "      crop:\n        method: center\n        percentage: 87.5\n";
  size_t at = text.find(crop);
  ASSERT_NE(at, std::string::npos);
  text.erase(at, crop.size());
  text.insert(text.find("      mean:"), crop);
  ModelManifest m = parse_manifest(text);
  EXPECT_EQ(step_kinds(m.inputs[0]),
            (std::vector<std::string>{"decode", "resize", "crop", "mean", "rescale"}));
  EXPECT_EQ(parse_manifest(serialize_manifest(m)).inputs[0].processing, m.inputs[0].processing);
}

TEST(Manifest, UnknownKeysArePreservedAndWarned) {
  std::string text = reference_manifest_text() + "maintainer: someone\n";
  ModelManifest m = parse_manifest(text);
  ASSERT_EQ(m.extras.size(), 1u);
  EXPECT_EQ(m.extras[0].path, "maintainer");
  EXPECT_NE(serialize_manifest(m).find("maintainer: someone"), std::string::npos);
  auto report = validate_manifest(m);
  EXPECT_FALSE(report.has_errors());
  EXPECT_EQ(report.warning_count(), 1u);
}

TEST(Manifest, SchemaErrorsNameTheField) {
  struct Case {
    std::string from;
    std::string to;
    std::string path;
    ErrorCode code;
  };
  const std::vector<Case> cases = {
      {"name: ColorNet\n", "", "name", ErrorCode::kSchema},
      {"task: classification", "task: captioning", "task", ErrorCode::kUnsupported},
      {"      rescale: 127.5\n", "      rescale: 127.5\n      sharpen: 2\n",
       "inputs[0].processing.sharpen", ErrorCode::kUnsupported},
      {"dimensions: [3, 32, 32]", "dimensions: [3, 32]", "inputs[0].processing.resize.dimensions",
       ErrorCode::kSchema},
      {"percentage: 87.5", "percentage: lots", "inputs[0].processing.crop.percentage",
       ErrorCode::kSchema},
      {"version: 1.0.0\ntask", "version: one\ntask", "version", ErrorCode::kSchema},
  };
  for (const auto& c : cases) {
    std::string text = reference_manifest_text();
    size_t at = text.find(c.from);
    ASSERT_NE(at, std::string::npos) << c.from;
    text.replace(at, c.from.size(), c.to);
    try {
      parse_manifest(text);
      ADD_FAILURE() << "no error for " << c.path;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.path(), c.path);
      EXPECT_EQ(e.code(), c.code) << c.path;
    }
  }
}

TEST(Manifest, SyntaxErrorsAreNotSchemaErrors) {
  EXPECT_THROW(parse_manifest("name: [unclosed\n"), SyntaxError);
}

TEST(Manifest, ValidationFindsSemanticErrors) {
  std::string text = reference_manifest_text();
  text.replace(text.find("percentage: 87.5"), 16, "percentage: 150");
  text.replace(text.find("mean: [127.5, 127.5, 127.5]"), 27, "mean: [127.5, 127.5]");
  auto report = validate_manifest(parse_manifest(text));
  EXPECT_TRUE(report.has_errors());
  EXPECT_EQ(report.error_count(), 2u);
  std::set<std::string> paths;
  for (const auto& v : report.violations) paths.insert(v.path);
  EXPECT_TRUE(paths.count("inputs[0].processing.crop.percentage"));
}

TEST(Manifest, ResolveContainer) {
  ModelManifest m = load("inception_v3");
  EXPECT_EQ(resolve_container(m, "ppc64le", "cpu"), "mlcn/tensorflow:1-13-0_ppc64le-cpu");
  try {
    resolve_container(m, "arm64", "cpu");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find("amd64/cpu"), std::string::npos);
  }
}

TEST(Manifest, ShippedReferenceMatchesFixture) {
  const fs::path dir = fs::path(EVALSCOPE_SOURCE_DIR) / "data" / "colornet";
  ModelManifest shipped = parse_manifest(read_file_text(dir / "colornet.yml"));
  ModelManifest fixture = parse_manifest(reference_manifest_text());
  EXPECT_EQ(serialize_manifest(shipped), serialize_manifest(fixture));
  EXPECT_FALSE(validate_manifest(shipped).has_errors());
}

}  // namespace
}  // namespace evalscope
