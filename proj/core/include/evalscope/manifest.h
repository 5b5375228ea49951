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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/semver.h"
#include "evalscope/types.h"
#include "evalscope/yaml_subset.h"

namespace evalscope {

// Pre-processing steps. Each step is one entry of an input's ordered
// `processing` block; the order of the entries is the execution order.

struct DecodeStep {
  ElementType element_type = ElementType::kUint8;
  DataLayout data_layout = DataLayout::kNHWC;
  ColorLayout color_layout = ColorLayout::kRGB;
  DctMethod dct_method = DctMethod::kIntegerAccurate;
  bool operator==(const DecodeStep&) const = default;
};

struct CropStep {
  std::string method = "center";
  double percentage = 100.0;
  bool operator==(const CropStep&) const = default;
};

struct ResizeStep {
  std::array<int, 3> dimensions{3, 0, 0};  // [C, H, W]
  std::string method = "bilinear";
  bool keep_aspect_ratio = false;
  bool operator==(const ResizeStep&) const = default;
};

struct MeanStep {
  std::vector<double> values;
  bool operator==(const MeanStep&) const = default;
};

struct RescaleStep {
  double value = 1.0;
  bool operator==(const RescaleStep&) const = default;
};

struct CastStep {
  ElementType element_type = ElementType::kFloat32;
  OrderPolicy order_policy = OrderPolicy::kConvertThenNormalize;
  bool operator==(const CastStep&) const = default;
};

using ProcessingStep =
    std::variant<DecodeStep, CropStep, ResizeStep, MeanStep, RescaleStep, CastStep>;

std::string_view step_kind(const ProcessingStep& step);

struct InputSpec {
  std::string type = "image";
  std::string layer_name;
  ElementType element_type = ElementType::kFloat32;
  // Layout hints for inputs without a decode step (object-detection style
  // manifests that embed pre-processing in the graph).
  std::optional<DataLayout> layout;
  std::optional<ColorLayout> color_layout;
  std::vector<ProcessingStep> processing;
  bool operator==(const InputSpec&) const = default;
};

struct OutputSpec {
  OutputType type = OutputType::kProbability;
  std::string layer_name;
  ElementType element_type = ElementType::kFloat32;
  std::optional<std::string> features_url;
  bool operator==(const OutputSpec&) const = default;
};

struct SourceSpec {
  std::optional<std::string> base_url;
  std::string graph_path;
  std::optional<std::string> weights_path;
  std::optional<std::string> graph_checksum;
  std::optional<std::string> weights_checksum;
  bool operator==(const SourceSpec&) const = default;
};

struct DatasetRef {
  std::string name;
  SemVer version;
  bool operator==(const DatasetRef&) const = default;
};

struct FrameworkSpec {
  std::string name;
  VersionConstraint version_constraint;
  bool operator==(const FrameworkSpec&) const = default;
};

/// architecture -> device class -> container reference.
using ContainerMap = std::map<std::string, std::map<std::string, std::string>>;

/// A key the schema does not know, kept with its full path so it survives a
/// parse/serialize round trip and can be reported.
struct ExtraField {
  std::string path;
  yaml::Node value;
  bool operator==(const ExtraField&) const = default;
};

struct ModelManifest {
  std::string name;
  SemVer version;
  Task task = Task::kClassification;
  std::string license;
  std::string description;
  std::vector<std::string> references;
  FrameworkSpec framework;
  ContainerMap containers;
  std::vector<std::pair<std::string, std::string>> envvars;
  std::vector<InputSpec> inputs;
  std::vector<OutputSpec> outputs;
  SourceSpec source;
  std::optional<DatasetRef> training_dataset;
  yaml::Node attributes;  // free-form `attributes:` block, null when absent
  std::vector<ExtraField> extras;
  // Non-fatal observations made while parsing (e.g. a padded version).
  std::vector<std::pair<std::string, std::string>> parse_notes;

  bool operator==(const ModelManifest&) const = default;
};

/// Parses manifest text. Throws SyntaxError for malformed documents,
/// SchemaError (field path + reason) for schema violations, and
/// SchemaError with code kUnsupported for unknown tasks or step kinds.
ModelManifest parse_manifest(std::string_view text);

/// Canonical text: keys in the reference manifest order, processing steps
/// in execution order, extras appended at their original location.
std::string serialize_manifest(const ModelManifest& m);

enum class Severity { kError, kWarning };

struct Violation {
  std::string path;
  Severity severity = Severity::kError;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool has_errors() const;
  size_t error_count() const;
  size_t warning_count() const;
  nlohmann::json to_json() const;
};

ValidationReport validate_manifest(const ModelManifest& m);

/// Returns the container for (arch, device); throws Error(kNotFound)
/// listing the available pairs.
std::string resolve_container(const ModelManifest& m, std::string_view arch,
                              std::string_view device);

/// Channel count the pipeline produces for this input (resize C, else 3).
int input_channels(const InputSpec& in);

}  // namespace evalscope
