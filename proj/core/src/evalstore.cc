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

#include "evalscope/evalstore.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "evalscope/error.h"
#include "evalscope/util.h"

namespace evalscope {
namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

bool versions_match(const std::optional<std::string>& name, const VersionConstraint& c,
                    const NamedVersion& nv) {
  return (!name || names_equal(*name, nv.name)) && c.satisfied_by(nv.version);
}

}  // namespace

bool StoreQuery::matches(const AgentResult& r) const {
  return versions_match(model_name, model_constraint, r.model) &&
         versions_match(framework_name, framework_constraint, r.framework) &&
         hardware.matches(r.hardware) && (!variant || *variant == r.request.variant);
}

EvalStore::EvalStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (dir_.empty()) return;
  std::filesystem::create_directories(dir_);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    const auto name = e.path().filename().string();
    if (name.rfind("evaluations-", 0) == 0 && e.path().extension() == ".jsonl") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        ++skipped_;
        continue;
      }
      try {
        AgentResult r = AgentResult::from_json(j);
        auto key = std::make_pair(r.evaluation_id, r.agent_id);
        if (index_.count(key)) continue;
        index_[key] = records_.size();
        records_.emplace_back(std::move(r), std::move(line));
      } catch (const Error&) {
        ++skipped_;
      }
    }
  }
}

void EvalStore::put(const AgentResult& r) {
  if (r.state != EvaluationState::kDone) {
    throw Error(ErrorCode::kInvalidArgument, "only completed results are stored");
  }
  if (r.evaluation_id.empty() || r.agent_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "result needs evaluation_id and agent_id");
  }
  std::string line = r.to_json().dump();
  std::lock_guard lock(mu_);
  auto key = std::make_pair(r.evaluation_id, r.agent_id);
  if (auto it = index_.find(key); it != index_.end()) {
    if (records_[it->second].second == line) return;
    throw Error(ErrorCode::kAlreadyExists, "evaluation " + r.evaluation_id + " for agent " +
                                               r.agent_id + " is already stored with different content");
  }
  if (!dir_.empty()) {
    const std::string day = format_utc(r.finished_ms != 0 ? r.finished_ms : unix_millis()).substr(0, 10);
    const auto path = dir_ / ("evaluations-" + day + ".jsonl");
    // A single write of the whole line keeps concurrent readers from seeing
    // a partial record followed by a newline.
    std::ofstream out(path, std::ios::app | std::ios::binary);
    const std::string payload = line + "\n";
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  }
  index_[key] = records_.size();
  records_.emplace_back(AgentResult::from_json(nlohmann::json::parse(line)), std::move(line));
}

std::optional<AgentResult> EvalStore::get(const std::string& evaluation_id,
                                          const std::string& agent_id) const {
  std::lock_guard lock(mu_);
  auto it = index_.find({evaluation_id, agent_id});
  if (it == index_.end()) return std::nullopt;
  return records_[it->second].first;
}

std::vector<AgentResult> EvalStore::by_evaluation(const std::string& evaluation_id) const {
  std::lock_guard lock(mu_);
  std::vector<AgentResult> out;
  for (const auto& [r, line] : records_) {
    if (r.evaluation_id == evaluation_id) out.push_back(r);
  }
  return out;
}

std::vector<AgentResult> EvalStore::query(const StoreQuery& q) const {
  std::lock_guard lock(mu_);
  std::vector<AgentResult> out;
  for (const auto& [r, line] : records_) {
    if (q.matches(r)) out.push_back(r);
  }
  return out;
}

std::vector<AgentResult> EvalStore::all() const { return query(StoreQuery{}); }

size_t EvalStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::vector<SummaryRow> summary_table(const std::vector<AgentResult>& records) {
  struct Acc {
    SummaryRow row;
    double hits1 = 0;
    double hits5 = 0;
    size_t labelled = 0;
    double latency_sum_ms = 0;
  };
  std::vector<Acc> groups;
  for (const auto& r : records) {
    const std::string model = r.model.name + " " + r.model.version.to_string();
    const std::string variant = r.request.variant.empty() ? "default" : r.request.variant;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) {
      return a.row.model == model && a.row.variant == variant;
    });
    if (it == groups.end()) {
      groups.push_back(Acc{});
      it = std::prev(groups.end());
      it->row.model = model;
      it->row.variant = variant;
    }
    ++it->row.evaluations;
    it->latency_sum_ms += static_cast<double>(r.latency_ns) / 1e6;
    if (r.metrics) {
      it->row.n_samples += r.metrics->n_samples;
      it->labelled += r.metrics->n_samples;
      it->hits1 += r.metrics->top1 * static_cast<double>(r.metrics->n_samples);
      it->hits5 += r.metrics->top5 * static_cast<double>(r.metrics->n_samples);
    }
  }
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    if (g.labelled > 0) {
      g.row.top1 = fixed4(g.hits1 / static_cast<double>(g.labelled));
      g.row.top5 = fixed4(g.hits5 / static_cast<double>(g.labelled));
    } else {
      g.row.top1 = "-";
      g.row.top5 = "-";
    }
    g.row.latency_ms = fixed4(g.latency_sum_ms / static_cast<double>(g.row.evaluations));
    out.push_back(std::move(g.row));
  }
  return out;
}

nlohmann::json to_json(const std::vector<SummaryRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"model", r.model},
                   {"variant", r.variant},
                   {"evaluations", r.evaluations},
                   {"n_samples", r.n_samples},
                   {"top1", r.top1},
                   {"top5", r.top5},
                   {"latency_ms", r.latency_ms}});
  }
  return out;
}

}  // namespace evalscope
