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

#include "evalscope/tracing.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <unordered_map>

#include "evalscope/error.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

constexpr std::array<std::string_view, 7> kLevelNames = {
    "none", "application", "model", "framework", "layer", "library", "hardware"};

[[noreturn]] void malformed(const std::string& msg) {
  throw Error(ErrorCode::kMalformedSpan, msg);
}

std::string span_label(const TraceSpan& s) {
  return "span " + std::to_string(s.span_id) + " (" + s.name + ")";
}

uint64_t union_measure(std::vector<std::pair<uint64_t, uint64_t>> iv) {
  std::sort(iv.begin(), iv.end());
  uint64_t total = 0;
  uint64_t cur_start = 0;
  uint64_t cur_end = 0;
  bool open = false;
  for (const auto& [s, e] : iv) {
    if (!open || s > cur_end) {
      if (open) total += cur_end - cur_start;
      cur_start = s;
      cur_end = e;
      open = true;
    } else {
      cur_end = std::max(cur_end, e);
    }
  }
  if (open) total += cur_end - cur_start;
  return total;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string_view to_string(TraceLevel level) {
  return kLevelNames[static_cast<size_t>(level)];
}

std::optional<TraceLevel> parse_trace_level(std::string_view s) {
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (size_t i = 0; i < kLevelNames.size(); ++i) {
    if (lower == kLevelNames[i] || lower == std::to_string(i)) return static_cast<TraceLevel>(i);
  }
  return std::nullopt;
}

nlohmann::json to_json(const TraceSpan& span) {
  return {{"span_id", span.span_id},
          {"parent_id", span.parent_id ? nlohmann::json(*span.parent_id) : nlohmann::json(nullptr)},
          {"level", to_string(span.level)},
          {"name", span.name},
          {"start_ns", span.start_ns},
          {"end_ns", span.end_ns},
          {"tags", span.tags}};
}

TraceSpan span_from_json(const nlohmann::json& j) {
  try {
    TraceSpan s;
    s.span_id = j.at("span_id").get<uint64_t>();
    if (j.contains("parent_id") && !j.at("parent_id").is_null()) {
      s.parent_id = j.at("parent_id").get<uint64_t>();
    }
    const auto& level = j.at("level");
    auto parsed = parse_trace_level(level.is_number() ? std::to_string(level.get<int>())
                                                      : level.get<std::string>());
    if (!parsed || *parsed == TraceLevel::kNone) malformed("unknown span level " + level.dump());
    s.level = *parsed;
    s.name = j.at("name").get<std::string>();
    s.start_ns = j.at("start_ns").get<uint64_t>();
    s.end_ns = j.at("end_ns").get<uint64_t>();
    if (j.contains("tags")) s.tags = j.at("tags").get<std::map<std::string, std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("bad span JSON: ") + e.what());
  }
}

nlohmann::json spans_to_json(const std::vector<TraceSpan>& spans) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : spans) out.push_back(to_json(s));
  return out;
}

std::vector<TraceSpan> spans_from_json(const nlohmann::json& j) {
  if (!j.is_array()) malformed("trace must be a JSON array");
  std::vector<TraceSpan> out;
  for (const auto& e : j) out.push_back(span_from_json(e));
  return out;
}

std::vector<std::string> parse_fused_of(std::string_view tag) {
  std::string s = trim(tag);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string part = trim(std::string_view(s).substr(pos, comma - pos));
    if (!part.empty()) out.push_back(std::move(part));
    pos = comma + 1;
  }
  return out;
}

TraceCollector::TraceCollector(TraceLevel requested) : requested_(requested) {}

bool TraceCollector::enabled(TraceLevel level) const {
  return requested_ != TraceLevel::kNone && level <= requested_;
}

void TraceCollector::check_child(const TraceSpan& parent, const TraceSpan& child) const {
  if (child.level < parent.level) {
    malformed(span_label(child) + " at level " + std::string(to_string(child.level)) +
              " is coarser than its parent at level " + std::string(to_string(parent.level)));
  }
  if (child.start_ns < parent.start_ns || child.end_ns > parent.end_ns) {
    malformed(span_label(child) + " extends outside its parent " + span_label(parent));
  }
}

bool TraceCollector::record(TraceSpan span) {
  if (span.level == TraceLevel::kNone) malformed(span_label(span) + " has level none");
  if (span.end_ns < span.start_ns) malformed(span_label(span) + " ends before it starts");
  if (span.parent_id && *span.parent_id == span.span_id) {
    malformed(span_label(span) + " is its own parent");
  }
  std::lock_guard lock(mu_);
  if (spans_.count(span.span_id) || dropped_.count(span.span_id)) {
    malformed("duplicate span id " + std::to_string(span.span_id));
  }
  if (span.parent_id) {
    if (auto it = spans_.find(*span.parent_id); it != spans_.end()) {
      check_child(it->second, span);
    } else if (auto d = dropped_.find(*span.parent_id); d != dropped_.end()) {
      if (span.level < d->second) {
        malformed(span_label(span) + " is coarser than its parent");
      }
    }
  }
  // Children that arrived first.
  auto [lo, hi] = waiting_.equal_range(span.span_id);
  for (auto it = lo; it != hi; ++it) check_child(span, spans_.at(it->second));
  waiting_.erase(lo, hi);
  if (!enabled(span.level)) {
    dropped_.emplace(span.span_id, span.level);
    return false;
  }
  if (span.parent_id && !spans_.count(*span.parent_id) && !dropped_.count(*span.parent_id)) {
    waiting_.emplace(*span.parent_id, span.span_id);
  }
  next_id_ = std::max(next_id_, span.span_id + 1);
  spans_.emplace(span.span_id, std::move(span));
  return true;
}

uint64_t TraceCollector::next_id() {
  std::lock_guard lock(mu_);
  return next_id_++;
}

uint64_t TraceCollector::now_ns() {
  using namespace std::chrono;
  return static_cast<uint64_t>(
      duration_cast<nanoseconds>(steady_clock::now().time_since_epoch()).count());
}

std::vector<TraceSpan> TraceCollector::spans() const {
  std::vector<TraceSpan> out;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : spans_) out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const TraceSpan& a, const TraceSpan& b) {
    return a.start_ns < b.start_ns;
  });
  return out;
}

size_t TraceCollector::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_.size();
}

ScopedSpan::ScopedSpan(TraceCollector* collector, TraceLevel level, std::string name,
                       std::optional<uint64_t> parent_id)
    : collector_(collector) {
  if (collector_ == nullptr || !collector_->enabled(level)) return;
  active_ = true;
  span_.span_id = collector_->next_id();
  span_.parent_id = parent_id;
  span_.level = level;
  span_.name = std::move(name);
  span_.tags["wall_clock"] = format_utc(unix_millis());
  span_.start_ns = TraceCollector::now_ns();
}

ScopedSpan::~ScopedSpan() {
  if (!active_) return;
  span_.end_ns = TraceCollector::now_ns();
  try {
    collector_->record(std::move(span_));
  } catch (const Error&) {
    // A destructor cannot report; a malformed scoped span is a programming
    // error caught by the tests instead.
  }
}

std::optional<uint64_t> ScopedSpan::id() const {
  if (!active_) return std::nullopt;
  return span_.span_id;
}

void ScopedSpan::tag(const std::string& key, const std::string& value) {
  if (active_) span_.tags[key] = value;
}

nlohmann::json LatencySummary::to_json() const {
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [level, ns] : level_totals) levels[std::string(to_string(level))] = ns;
  nlohmann::json layer_rows = nlohmann::json::array();
  for (const auto& row : layers) {
    nlohmann::json libs = nlohmann::json::array();
    for (const auto& l : row.library_calls) {
      libs.push_back({{"name", l.name}, {"duration_ns", l.duration_ns}, {"count", l.count}});
    }
    nlohmann::json r = {{"name", row.name},
                        {"duration_ns", row.duration_ns},
                        {"count", row.count},
                        {"library_calls", std::move(libs)}};
    if (!row.fused_of.empty()) r["fused_of"] = row.fused_of;
    layer_rows.push_back(std::move(r));
  }
  nlohmann::json path = nlohmann::json::array();
  for (const auto& e : critical_path) {
    path.push_back({{"span_id", e.span_id},
                    {"level", to_string(e.level)},
                    {"name", e.name},
                    {"duration_ns", e.duration_ns}});
  }
  return {{"total_ns", total_ns},
          {"level_totals", std::move(levels)},
          {"layers", std::move(layer_rows)},
          {"critical_path", std::move(path)}};
}

LatencySummary summarize(std::vector<TraceSpan> spans) {
  // Canonical order so the result does not depend on arrival order.
  std::sort(spans.begin(), spans.end(), [](const TraceSpan& a, const TraceSpan& b) {
    return std::tie(a.start_ns, a.span_id) < std::tie(b.start_ns, b.span_id);
  });
  std::unordered_map<uint64_t, size_t> index;
  for (size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].end_ns < spans[i].start_ns) malformed(span_label(spans[i]) + " ends before it starts");
    if (!index.emplace(spans[i].span_id, i).second) {
      malformed("duplicate span id " + std::to_string(spans[i].span_id));
    }
  }
  std::vector<std::vector<size_t>> children(spans.size());
  std::vector<size_t> roots;
  for (size_t i = 0; i < spans.size(); ++i) {
    if (!spans[i].parent_id) {
      roots.push_back(i);
      continue;
    }
    auto it = index.find(*spans[i].parent_id);
    if (it == index.end()) {
      malformed(span_label(spans[i]) + " references unknown parent " +
                std::to_string(*spans[i].parent_id));
    }
    children[it->second].push_back(i);
  }
  // Every span must reach a root; anything else sits on a cycle.
  std::vector<int> state(spans.size(), 0);  // 0 unknown, 1 visiting, 2 rooted
  for (size_t i = 0; i < spans.size(); ++i) {
    std::vector<size_t> chain;
    size_t cur = i;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      if (!spans[cur].parent_id) break;
      cur = index.at(*spans[cur].parent_id);
    }
    if (state[cur] == 1 && spans[cur].parent_id) {
      malformed("cyclic parent reference through " + span_label(spans[cur]));
    }
    for (size_t c : chain) state[c] = 2;
  }

  LatencySummary out;
  std::map<TraceLevel, std::vector<std::pair<uint64_t, uint64_t>>> by_level;
  std::vector<std::pair<uint64_t, uint64_t>> root_iv;
  for (const auto& s : spans) by_level[s.level].emplace_back(s.start_ns, s.end_ns);
  for (size_t r : roots) root_iv.emplace_back(spans[r].start_ns, spans[r].end_ns);
  for (auto& [level, iv] : by_level) out.level_totals[level] = union_measure(std::move(iv));
  out.total_ns = union_measure(std::move(root_iv));

  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.level != TraceLevel::kLayer) continue;
    auto [it, inserted] = row_of.emplace(s.name, out.layers.size());
    if (inserted) out.layers.push_back(LayerRow{s.name, 0, 0, {}, {}});
    LayerRow& row = out.layers[it->second];
    row.duration_ns += s.duration_ns();
    ++row.count;
    if (auto tag = s.tags.find("fused_of"); tag != s.tags.end() && row.fused_of.empty()) {
      row.fused_of = parse_fused_of(tag->second);
    }
    for (size_t c : children[i]) {
      const auto& child = spans[c];
      if (child.level != TraceLevel::kLibrary) continue;
      auto lib = std::find_if(row.library_calls.begin(), row.library_calls.end(),
                              [&](const LibraryCallRow& l) { return l.name == child.name; });
      if (lib == row.library_calls.end()) {
        row.library_calls.push_back(LibraryCallRow{child.name, 0, 0});
        lib = std::prev(row.library_calls.end());
      }
      lib->duration_ns += child.duration_ns();
      ++lib->count;
    }
  }

  auto better = [&](size_t a, size_t b) {
    // true when a should be preferred over b
    const auto& x = spans[a];
    const auto& y = spans[b];
    if (x.end_ns != y.end_ns) return x.end_ns > y.end_ns;
    if (x.duration_ns() != y.duration_ns()) return x.duration_ns() > y.duration_ns();
    return x.span_id < y.span_id;
  };
  if (!roots.empty()) {
    size_t cur = roots.front();
    for (size_t r : roots) {
      const auto d = spans[r].duration_ns();
      const auto best = spans[cur].duration_ns();
      if (d > best || (d == best && spans[r].span_id < spans[cur].span_id)) cur = r;
    }
    while (true) {
      const auto& s = spans[cur];
      out.critical_path.push_back(CriticalPathEntry{s.span_id, s.level, s.name, s.duration_ns()});
      if (children[cur].empty()) break;
      size_t next = children[cur].front();
      for (size_t c : children[cur]) {
        if (better(c, next)) next = c;
      }
      cur = next;
    }
  }
  return out;
}

std::vector<ComparisonRow> compare(const LatencySummary& a, const LatencySummary& b) {
  std::vector<ComparisonRow> rows;
  std::vector<bool> used_a(a.layers.size(), false);
  std::vector<bool> used_b(b.layers.size(), false);

  auto find = [](const LatencySummary& s, const std::vector<bool>& used, const std::string& name) {
    for (size_t i = 0; i < s.layers.size(); ++i) {
      if (!used[i] && s.layers[i].name == name) return static_cast<long>(i);
    }
    return -1L;
  };
  auto join = [](const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "+") + p;
    return out;
  };

  // Fused rows matched against constituents. `first_is_a` tells which side
  // holds the fused row so the delta keeps its a - b sign.
  auto match_fused = [&](const LatencySummary& fs, std::vector<bool>& fused_used,
                         const LatencySummary& os, std::vector<bool>& other_used,
                         bool first_is_a) {
    for (size_t i = 0; i < fs.layers.size(); ++i) {
      const LayerRow& row = fs.layers[i];
      if (fused_used[i] || row.fused_of.size() < 2) continue;
      const long same = find(os, other_used, row.name);
      if (same >= 0 && os.layers[static_cast<size_t>(same)].fused_of == row.fused_of) continue;
      std::vector<size_t> parts;
      for (const auto& name : row.fused_of) {
        const long j = find(os, other_used, name);
        if (j < 0 || os.layers[static_cast<size_t>(j)].fused_of.size() >= 2) {
          parts.clear();
          break;
        }
        parts.push_back(static_cast<size_t>(j));
      }
      if (parts.size() != row.fused_of.size()) continue;
      uint64_t sum = 0;
      for (size_t j : parts) {
        sum += os.layers[j].duration_ns;
        other_used[j] = true;
      }
      fused_used[i] = true;
      ComparisonRow r;
      r.name = join(row.fused_of);
      r.a_ns = first_is_a ? row.duration_ns : sum;
      r.b_ns = first_is_a ? sum : row.duration_ns;
      r.delta_ns = static_cast<int64_t>(*r.a_ns) - static_cast<int64_t>(*r.b_ns);
      r.matched = true;
      r.fused = true;
      rows.push_back(std::move(r));
    }
  };
  match_fused(a, used_a, b, used_b, true);
  match_fused(b, used_b, a, used_a, false);

  for (size_t i = 0; i < a.layers.size(); ++i) {
    if (used_a[i]) continue;
    const LayerRow& row = a.layers[i];
    ComparisonRow r;
    r.name = row.name;
    r.a_ns = row.duration_ns;
    r.fused = !row.fused_of.empty();
    const long j = find(b, used_b, row.name);
    if (j >= 0) {
      used_b[static_cast<size_t>(j)] = true;
      r.b_ns = b.layers[static_cast<size_t>(j)].duration_ns;
      r.delta_ns = static_cast<int64_t>(*r.a_ns) - static_cast<int64_t>(*r.b_ns);
      r.matched = true;
    }
    used_a[i] = true;
    rows.push_back(std::move(r));
  }
  for (size_t j = 0; j < b.layers.size(); ++j) {
    if (used_b[j]) continue;
    ComparisonRow r;
    r.name = b.layers[j].name;
    r.b_ns = b.layers[j].duration_ns;
    r.fused = !b.layers[j].fused_of.empty();
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json to_json(const std::vector<ComparisonRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    out.push_back({{"name", r.name},
                   {"a_ns", opt(r.a_ns)},
                   {"b_ns", opt(r.b_ns)},
                   {"delta_ns", opt(r.delta_ns)},
                   {"matched", r.matched},
                   {"fused", r.fused}});
  }
  return out;
}

}  // namespace evalscope
