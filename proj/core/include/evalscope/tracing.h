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

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evalscope {

/// The six abstraction levels, coarse to fine. A request at level L keeps
/// spans whose level is <= L; kNone disables tracing.
enum class TraceLevel {
  kNone = 0,
  kApplication = 1,
  kModel = 2,
  kFramework = 3,
  kLayer = 4,
  kLibrary = 5,
  kHardware = 6,
};

std::string_view to_string(TraceLevel level);
/// Accepts level names (case-insensitive) and the digits 0-6.
std::optional<TraceLevel> parse_trace_level(std::string_view s);

struct TraceSpan {
  uint64_t span_id = 0;
  std::optional<uint64_t> parent_id;
  TraceLevel level = TraceLevel::kApplication;
  std::string name;
  uint64_t start_ns = 0;  // monotonic clock
  uint64_t end_ns = 0;
  std::map<std::string, std::string> tags;

  uint64_t duration_ns() const { return end_ns - start_ns; }
  bool operator==(const TraceSpan&) const = default;
};

nlohmann::json to_json(const TraceSpan& span);
TraceSpan span_from_json(const nlohmann::json& j);
nlohmann::json spans_to_json(const std::vector<TraceSpan>& spans);
std::vector<TraceSpan> spans_from_json(const nlohmann::json& j);

/// Splits a fused_of tag value ("conv2,relu" or "[conv2, relu]").
std::vector<std::string> parse_fused_of(std::string_view tag);

/// Per-evaluation span buffer. Thread-safe. Spans finer than the requested
/// level are dropped on arrival. A child may arrive before its parent (a
/// scoped child closes first); its containment checks then run when the
/// parent arrives.
class TraceCollector {
 public:
  explicit TraceCollector(TraceLevel requested);

  TraceLevel requested() const { return requested_; }
  bool enabled(TraceLevel level) const;

  /// Returns false when the span was dropped by level. Throws
  /// Error(kMalformedSpan) for end < start, duplicate ids, a child outside
  /// its parent or a child coarser than its parent.
  bool record(TraceSpan span);

  uint64_t next_id();
  static uint64_t now_ns();

  /// Recorded spans ordered by (start, id).
  std::vector<TraceSpan> spans() const;
  size_t dropped() const;

 private:
  void check_child(const TraceSpan& parent, const TraceSpan& child) const;

  TraceLevel requested_;
  mutable std::mutex mu_;
  uint64_t next_id_ = 1;
  std::map<uint64_t, TraceSpan> spans_;
  std::map<uint64_t, TraceLevel> dropped_;
  std::multimap<uint64_t, uint64_t> waiting_;  // missing parent id -> child id
};

/// Records a span from construction to destruction when the collector
/// keeps its level; otherwise a no-op.
class ScopedSpan {
 public:
  ScopedSpan(TraceCollector* collector, TraceLevel level, std::string name,
             std::optional<uint64_t> parent_id = std::nullopt);
  ~ScopedSpan();
  ScopedSpan(const ScopedSpan&) = delete;
  ScopedSpan& operator=(const ScopedSpan&) = delete;

  /// Id to pass to children; nullopt when this span is not recorded.
  std::optional<uint64_t> id() const;
  void tag(const std::string& key, const std::string& value);

 private:
  TraceCollector* collector_;
  TraceSpan span_;
  bool active_ = false;
};

struct LibraryCallRow {
  std::string name;
  uint64_t duration_ns = 0;
  size_t count = 0;
  bool operator==(const LibraryCallRow&) const = default;
};

struct LayerRow {
  std::string name;
  uint64_t duration_ns = 0;  // summed over spans with this name
  size_t count = 0;
  std::vector<std::string> fused_of;  // empty unless the span carries a fusion tag
  std::vector<LibraryCallRow> library_calls;
  bool operator==(const LayerRow&) const = default;
};

struct CriticalPathEntry {
  uint64_t span_id = 0;
  TraceLevel level = TraceLevel::kApplication;
  std::string name;
  uint64_t duration_ns = 0;
  bool operator==(const CriticalPathEntry&) const = default;
};

struct LatencySummary {
  uint64_t total_ns = 0;  // measure of the union of root intervals
  // Measure of the union of all intervals at each level, so overlapping
  // sibling spans are not double counted.
  std::map<TraceLevel, uint64_t> level_totals;
  std::vector<LayerRow> layers;  // in order of first start
  std::vector<CriticalPathEntry> critical_path;

  nlohmann::json to_json() const;
  bool operator==(const LatencySummary&) const = default;
};

/// Throws Error(kMalformedSpan) on unknown parent ids, duplicate ids and
/// cyclic parent references. The result does not depend on span order.
///
/// The critical path starts at the longest root and repeatedly descends to
/// the child that ends last (ties: longer, then lower id).
LatencySummary summarize(std::vector<TraceSpan> spans);

struct ComparisonRow {
  std::string name;  // "a+b" for a fused row matched against its constituents
  std::optional<uint64_t> a_ns;
  std::optional<uint64_t> b_ns;
  std::optional<int64_t> delta_ns;  // a - b, set only when matched
  bool matched = false;
  bool fused = false;
  bool operator==(const ComparisonRow&) const = default;
};

/// Matches layer rows by name. A fused row on one side whose counterpart is
/// not fused the same way is matched against the sum of its constituent
/// rows on the other side. Rows left over on either side are unmatched.
std::vector<ComparisonRow> compare(const LatencySummary& a, const LatencySummary& b);
nlohmann::json to_json(const std::vector<ComparisonRow>& rows);

}  // namespace evalscope
