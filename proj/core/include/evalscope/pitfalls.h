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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/types.h"

namespace evalscope {

/// Exhaustive comparison of the two normalization order policies over all
/// 256 byte values.
struct NormalizationDiff {
  double max_abs_diff = 0.0;
  int argmax_value = 0;     // byte value where the largest difference occurs
  int differing_values = 0; // byte values whose outputs differ
  double sum_abs_diff = 0.0;
};

NormalizationDiff normalization_order_diff(double mean, double rescale);

/// Names accepted by run_pitfall_demo.
std::vector<std::string> pitfall_names();

/// Runs one pitfall demo against the reference model and fixtures and
/// returns the before/after outputs and a difference summary. Throws
/// Error(kInvalidArgument) for unknown names.
nlohmann::json run_pitfall_demo(const std::string& name);

}  // namespace evalscope
