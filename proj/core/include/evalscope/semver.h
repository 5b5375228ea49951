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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evalscope {

/// A concrete major.minor.patch version with an optional pre-release tag.
/// Build metadata ("+...") is accepted on parse and discarded.
struct SemVer {
  int major = 0;
  int minor = 0;
  int patch = 0;
  std::string prerelease;

  /// Strict parse: all three components are required.
  static SemVer parse(std::string_view text);
  static std::optional<SemVer> try_parse(std::string_view text);

  /// Accepts "1" and "1.0" by zero-filling the missing components. `padded`
  /// is set when filling happened so callers can surface a warning.
  static SemVer parse_lenient(std::string_view text, bool* padded = nullptr);

  std::string to_string() const;

  /// Semantic-versioning precedence: a pre-release sorts before its release.
  friend std::strong_ordering operator<=>(const SemVer& a, const SemVer& b);
  friend bool operator==(const SemVer& a, const SemVer& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
};

enum class ConstraintOp { kEq, kGe, kLe, kGt, kLt, kCaret, kTilde };

/// A version whose trailing components may be wildcards ("1.x", "1.12.x",
/// "1", "*"). A wildcard component is represented by nullopt; once one
/// component is a wildcard, every later component is too.
struct PartialVersion {
  std::optional<int> major;
  std::optional<int> minor;
  std::optional<int> patch;

  bool is_full() const { return major && minor && patch; }
  std::string to_string() const;
  bool operator==(const PartialVersion&) const = default;
};

struct ConstraintClause {
  ConstraintOp op = ConstraintOp::kEq;
  PartialVersion version;

  std::string to_string() const;
  bool satisfied_by(const SemVer& v) const;
  bool operator==(const ConstraintClause&) const = default;
};

/// Conjunction of comparator clauses, e.g. ">=1.10.x and <=1.13.0".
///
/// Clause semantics (wildcards expand to the half-open range they cover, so
/// "1.12.x" covers [1.12.0, 1.13.0)):
///   =P / P   v inside range(P)
///   >=P      v >= low(P)
///   >P       v > P when P is full, otherwise v >= high(P)
///   <P       v < low(P)
///   <=P      v <= P when P is full, otherwise v < high(P)
///   ^P       [P, next-breaking) where the bump happens at the left-most
///            non-zero component; "^1.x" is "^1.0.0" = [1.0.0, 2.0.0)
///   ~P       [P, next-minor) when the minor is given, else [P, next-major)
///
/// Clauses are separated by whitespace, ",", "&&" or the word "and".
class VersionConstraint {
 public:
  VersionConstraint() = default;
  explicit VersionConstraint(std::vector<ConstraintClause> clauses);

  static VersionConstraint parse(std::string_view text);

  bool satisfied_by(const SemVer& v) const;

  const std::vector<ConstraintClause>& clauses() const { return clauses_; }
  bool empty() const { return clauses_.empty(); }

  /// Canonical text, e.g. ">=1.10.x and <=1.13.0".
  std::string to_string() const;

  bool operator==(const VersionConstraint&) const = default;

 private:
  std::vector<ConstraintClause> clauses_;
};

VersionConstraint parse_version_constraint(std::string_view text);
bool constraint_satisfies(const VersionConstraint& c, const SemVer& v);

}  // namespace evalscope
