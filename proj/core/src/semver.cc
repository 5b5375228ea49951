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

#include "evalscope/semver.h"

#include <cctype>
#include <charconv>
#include <sstream>

#include "evalscope/error.h"

namespace evalscope {
namespace {

[[noreturn]] void bad_version(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument,
              "malformed version '" + std::string(text) + "': " + why);
}

[[noreturn]] void bad_constraint(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument,
              "malformed version constraint '" + std::string(text) + "': " + why);
}

std::optional<int> parse_number(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_wildcard(std::string_view s) { return s == "x" || s == "X" || s == "*"; }

struct Bound {
  SemVer version;
  bool inclusive = true;
};

SemVer low_of(const PartialVersion& p) {
  return SemVer{p.major.value_or(0), p.minor.value_or(0), p.patch.value_or(0), {}};
}

// Exclusive upper edge of the range a partial version covers. Full versions
// cover exactly themselves and have no exclusive edge.
std::optional<SemVer> high_of(const PartialVersion& p) {
  if (!p.major) return std::nullopt;
  if (!p.minor) return SemVer{*p.major + 1, 0, 0, {}};
  if (!p.patch) return SemVer{*p.major, *p.minor + 1, 0, {}};
  return std::nullopt;
}

bool above(const SemVer& v, const std::optional<Bound>& b) {
  if (!b) return true;
  return b->inclusive ? v >= b->version : v > b->version;
}

bool below(const SemVer& v, const std::optional<Bound>& b) {
  if (!b) return true;
  return b->inclusive ? v <= b->version : v < b->version;
}

std::pair<std::optional<Bound>, std::optional<Bound>> bounds_of(
    const ConstraintClause& c) {
  const PartialVersion& p = c.version;
  std::optional<Bound> lo;
  std::optional<Bound> hi;
  switch (c.op) {
    case ConstraintOp::kEq:
      if (!p.major) break;
      lo = Bound{low_of(p), true};
      if (p.is_full()) {
        hi = Bound{low_of(p), true};
      } else {
        hi = Bound{*high_of(p), false};
      }
      break;
    case ConstraintOp::kGe:
      if (p.major) lo = Bound{low_of(p), true};
      break;
    case ConstraintOp::kGt:
      if (p.is_full()) {
        lo = Bound{low_of(p), false};
      } else {
        lo = Bound{*high_of(p), true};
      }
      break;
    case ConstraintOp::kLt:
      hi = Bound{low_of(p), false};
      break;
    case ConstraintOp::kLe:
      if (!p.major) break;
      if (p.is_full()) {
        hi = Bound{low_of(p), true};
      } else {
        hi = Bound{*high_of(p), false};
      }
      break;
    case ConstraintOp::kCaret:
      if (!p.major) break;
      lo = Bound{low_of(p), true};
      if (*p.major > 0) {
        hi = Bound{SemVer{*p.major + 1, 0, 0, {}}, false};
      } else if (!p.minor) {
        hi = Bound{SemVer{1, 0, 0, {}}, false};
      } else if (*p.minor > 0 || !p.patch) {
        hi = Bound{SemVer{0, *p.minor + 1, 0, {}}, false};
      } else {
        hi = Bound{SemVer{0, 0, *p.patch + 1, {}}, false};
      }
      break;
    case ConstraintOp::kTilde:
      if (!p.major) break;
      lo = Bound{low_of(p), true};
      if (p.minor) {
        hi = Bound{SemVer{*p.major, *p.minor + 1, 0, {}}, false};
      } else {
        hi = Bound{SemVer{*p.major + 1, 0, 0, {}}, false};
      }
      break;
  }
  return {lo, hi};
}

PartialVersion parse_partial(std::string_view token, std::string_view whole) {
  if (!token.empty() && (token.front() == 'v' || token.front() == 'V')) {
    token.remove_prefix(1);
  }
  if (token.empty()) bad_constraint(whole, "missing version");
  const auto parts = split(token, '.');
  if (parts.size() > 3) bad_constraint(whole, "too many version components");
  PartialVersion p;
  std::optional<int>* slots[] = {&p.major, &p.minor, &p.patch};
  bool wildcard_seen = false;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (is_wildcard(parts[i])) {
      wildcard_seen = true;
      continue;
    }
    if (wildcard_seen) {
      bad_constraint(whole, "numeric component after wildcard in '" +
                                std::string(token) + "'");
    }
    auto n = parse_number(parts[i]);
    if (!n) {
      bad_constraint(whole, "bad version component '" + std::string(parts[i]) + "'");
    }
    *slots[i] = *n;
  }
  return p;
}

std::string op_text(ConstraintOp op) {
  switch (op) {
    case ConstraintOp::kEq: return "=";
    case ConstraintOp::kGe: return ">=";
    case ConstraintOp::kLe: return "<=";
    case ConstraintOp::kGt: return ">";
    case ConstraintOp::kLt: return "<";
    case ConstraintOp::kCaret: return "^";
    case ConstraintOp::kTilde: return "~";
  }
  return "";
}

bool is_operator_char(char c) {
  return c == '>' || c == '<' || c == '=' || c == '^' || c == '~';
}

}  // namespace

SemVer SemVer::parse(std::string_view text) {
  auto v = try_parse(text);
  if (!v) bad_version(text, "expected major.minor.patch");
  return *v;
}

std::optional<SemVer> SemVer::try_parse(std::string_view text) {
  std::string_view core = text;
  if (auto plus = core.find('+'); plus != std::string_view::npos) {
    core = core.substr(0, plus);
  }
  std::string prerelease;
  if (auto dash = core.find('-'); dash != std::string_view::npos) {
    prerelease = std::string(core.substr(dash + 1));
    core = core.substr(0, dash);
    if (prerelease.empty()) return std::nullopt;
  }
  const auto parts = split(core, '.');
  if (parts.size() != 3) return std::nullopt;
  auto ma = parse_number(parts[0]);
  auto mi = parse_number(parts[1]);
  auto pa = parse_number(parts[2]);
  if (!ma || !mi || !pa) return std::nullopt;
  return SemVer{*ma, *mi, *pa, std::move(prerelease)};
}

SemVer SemVer::parse_lenient(std::string_view text, bool* padded) {
  if (padded) *padded = false;
  if (auto v = try_parse(text)) return *v;
  const auto parts = split(text, '.');
  if (parts.empty() || parts.size() > 2) bad_version(text, "expected major.minor.patch");
  SemVer v;
  auto ma = parse_number(parts[0]);
  if (!ma) bad_version(text, "expected numeric major version");
  v.major = *ma;
  if (parts.size() == 2) {
    auto mi = parse_number(parts[1]);
    if (!mi) bad_version(text, "expected numeric minor version");
    v.minor = *mi;
  }
  if (padded) *padded = true;
  return v;
}

std::string SemVer::to_string() const {
  std::string s = std::to_string(major) + "." + std::to_string(minor) + "." +
                  std::to_string(patch);
  if (!prerelease.empty()) s += "-" + prerelease;
  return s;
}

std::strong_ordering operator<=>(const SemVer& a, const SemVer& b) {
  if (auto c = a.major <=> b.major; c != 0) return c;
  if (auto c = a.minor <=> b.minor; c != 0) return c;
  if (auto c = a.patch <=> b.patch; c != 0) return c;
  if (a.prerelease == b.prerelease) return std::strong_ordering::equal;
  if (a.prerelease.empty()) return std::strong_ordering::greater;
  if (b.prerelease.empty()) return std::strong_ordering::less;
  // Dot-separated identifiers: numeric ones compare numerically and sort
  // before alphanumeric ones.
  const auto pa = split(a.prerelease, '.');
  const auto pb = split(b.prerelease, '.');
  for (size_t i = 0; i < pa.size() && i < pb.size(); ++i) {
    auto na = parse_number(pa[i]);
    auto nb = parse_number(pb[i]);
    if (na && nb) {
      if (auto c = *na <=> *nb; c != 0) return c;
    } else if (na) {
      return std::strong_ordering::less;
    } else if (nb) {
      return std::strong_ordering::greater;
    } else if (auto c = pa[i].compare(pb[i]); c != 0) {
      return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  return pa.size() <=> pb.size();
}

std::string PartialVersion::to_string() const {
  if (!major) return "x";
  std::string s = std::to_string(*major);
  s += "." + (minor ? std::to_string(*minor) : std::string("x"));
  if (minor) s += "." + (patch ? std::to_string(*patch) : std::string("x"));
  return s;
}

std::string ConstraintClause::to_string() const {
  return op_text(op) + version.to_string();
}

bool ConstraintClause::satisfied_by(const SemVer& v) const {
  const auto [lo, hi] = bounds_of(*this);
  return above(v, lo) && below(v, hi);
}

VersionConstraint::VersionConstraint(std::vector<ConstraintClause> clauses)
    : clauses_(std::move(clauses)) {}

VersionConstraint VersionConstraint::parse(std::string_view text) {
  std::string normalized(text);
  for (size_t pos; (pos = normalized.find("&&")) != std::string::npos;) {
    normalized.replace(pos, 2, " ");
  }
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }

  std::vector<std::string> tokens;
  std::istringstream in(normalized);
  for (std::string tok; in >> tok;) {
    std::string lowered;
    for (char c : tok) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered == "and") continue;
    if (lowered == "or" || tok == "||") bad_constraint(text, "disjunction is not supported");
    tokens.push_back(std::move(tok));
  }
  if (tokens.empty()) bad_constraint(text, "empty constraint");

  std::vector<ConstraintClause> clauses;
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::string tok = tokens[i];
    size_t op_len = 0;
    while (op_len < tok.size() && is_operator_char(tok[op_len])) ++op_len;
    std::string op = tok.substr(0, op_len);
    std::string rest = tok.substr(op_len);
    if (rest.empty()) {
      // Operator written apart from its version: ">= 1.10".
      if (op.empty() || i + 1 >= tokens.size()) bad_constraint(text, "dangling operator");
      rest = tokens[++i];
      if (!rest.empty() && is_operator_char(rest.front())) {
        bad_constraint(text, "dangling operator");
      }
    }
    ConstraintClause clause;
    if (op.empty() || op == "=" || op == "==") {
      clause.op = ConstraintOp::kEq;
    } else if (op == ">=") {
      clause.op = ConstraintOp::kGe;
    } else if (op == "<=") {
      clause.op = ConstraintOp::kLe;
    } else if (op == ">") {
      clause.op = ConstraintOp::kGt;
    } else if (op == "<") {
      clause.op = ConstraintOp::kLt;
    } else if (op == "^") {
      clause.op = ConstraintOp::kCaret;
    } else if (op == "~") {
      clause.op = ConstraintOp::kTilde;
    } else {
      bad_constraint(text, "unknown operator '" + op + "'");
    }
    clause.version = parse_partial(rest, text);
    if (!clause.version.major &&
        (clause.op == ConstraintOp::kGt || clause.op == ConstraintOp::kLt)) {
      bad_constraint(text, "'" + op + "' needs a concrete major version");
    }
    clauses.push_back(clause);
  }
  return VersionConstraint(std::move(clauses));
}

bool VersionConstraint::satisfied_by(const SemVer& v) const {
  for (const auto& c : clauses_) {
    if (!c.satisfied_by(v)) return false;
  }
  return true;
}

std::string VersionConstraint::to_string() const {
  std::string out;
  for (const auto& c : clauses_) {
    if (!out.empty()) out += " and ";
    // Bare versions keep their bare spelling ("1.12.x"), which reads the same
    // as "=1.12.x".
    out += c.op == ConstraintOp::kEq ? c.version.to_string() : c.to_string();
  }
  return out;
}

VersionConstraint parse_version_constraint(std::string_view text) {
  return VersionConstraint::parse(text);
}

bool constraint_satisfies(const VersionConstraint& c, const SemVer& v) {
  return c.satisfied_by(v);
}

}  // namespace evalscope
