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

// Independent reference implementations used to check the library. None of
// these call into evalscope numerics; they are deliberately naive.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evalscope/tracing.h"

namespace evalscope::testing {

// --- versions -------------------------------------------------------------

struct Ver {
  int major;
  int minor;
  int patch;
};

/// Every version from 0.9.0 to 2.1.0 inclusive with minor and patch < 16.
std::vector<Ver> truth_table_versions();

/// The four constraints of the truth table, spelled as users write them.
const std::vector<std::string>& truth_table_constraints();

/// Hand-written membership test for each constraint in
/// truth_table_constraints(), expressed directly over the tuple.
bool constraint_oracle(const std::string& constraint, const Ver& v);

// --- pixels ---------------------------------------------------------------

/// Per-output-pixel bilinear sample of an interleaved float32 HWC image,
/// following the documented half-pixel formula.
std::vector<float> bilinear_oracle(const std::vector<float>& src, int in_h, int in_w, int c,
                                   int out_h, int out_w);

struct Window {
  int x;
  int y;
  int width;
  int height;
};

/// Center crop for percentages that are exact fractions (50, 87.5, 100),
/// computed in integers.
Window crop_window_oracle(int width, int height, double percentage);

/// Exhaustive byte-vs-float normalization difference in double precision.
struct NormalizationOracle {
  double max_abs_diff = 0.0;
  int argmax_value = 0;
  int differing_values = 0;
  double sum_abs_diff = 0.0;
};
NormalizationOracle normalization_oracle(double mean, double rescale);

// --- ranking --------------------------------------------------------------

/// Indices of the k largest values by repeated selection; ties go to the
/// lower index.
std::vector<size_t> top_k_oracle(const std::vector<float>& values, size_t k);

// --- spans ----------------------------------------------------------------

/// A random well-nested span tree: children lie inside their parent and are
/// at the same or a deeper level. Sibling intervals may overlap.
std::vector<TraceSpan> random_span_tree(std::mt19937_64& rng);

/// Covered nanoseconds per level, counted one tick at a time.
std::array<uint64_t, 7> level_totals_oracle(const std::vector<TraceSpan>& spans);

/// Two traces of the same network. In `fused` a single layer span tagged
/// fused_of=[conv2, relu] runs two 975 us kernels (1.95 ms in total); in
/// `unfused` conv2 and relu are separate layers totalling 2.63 ms.
struct FusedFixture {
  std::vector<TraceSpan> fused;
  std::vector<TraceSpan> unfused;
};
FusedFixture fused_layer_fixture();

}  // namespace evalscope::testing
