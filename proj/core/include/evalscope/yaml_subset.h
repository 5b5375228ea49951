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
#include <string_view>
#include <vector>

namespace evalscope::yaml {

struct Mark {
  int line = 0;
  int column = 0;
};

/// A node of the order-preserving YAML subset used for manifests and config
/// files: block mappings, block sequences, single-line flow sequences and
/// mappings, plain and quoted scalars, and comments. Anchors, aliases, tags,
/// block scalars and multiple documents are rejected.
///
/// Mapping entries keep document order and keys are unique within a mapping.
class Node {
 public:
  enum class Kind { kNull, kScalar, kSequence, kMapping };

  Node() = default;

  static Node null(Mark mark = {});
  static Node scalar(std::string value, bool quoted = false, Mark mark = {});
  static Node sequence(Mark mark = {});
  static Node mapping(Mark mark = {});

  Kind kind() const { return kind_; }
  bool is_null() const { return kind_ == Kind::kNull; }
  bool is_scalar() const { return kind_ == Kind::kScalar; }
  bool is_sequence() const { return kind_ == Kind::kSequence; }
  bool is_mapping() const { return kind_ == Kind::kMapping; }
  Mark mark() const { return mark_; }

  // Scalar access.
  const std::string& value() const { return value_; }
  bool quoted() const { return quoted_; }

  // Sequence access.
  const std::vector<Node>& items() const { return items_; }
  std::vector<Node>& items() { return items_; }
  void push_back(Node item);

  // Mapping access. `keys()[i]` pairs with `values()[i]`.
  const std::vector<std::string>& keys() const { return keys_; }
  const std::vector<Node>& values() const { return items_; }
  size_t size() const { return items_.size(); }
  const Node* find(std::string_view key) const;
  Node* find(std::string_view key);
  /// Throws Error(kAlreadyExists) on a duplicate key.
  void add(std::string key, Node value);

  /// Structural equality; marks and quoting are ignored.
  bool operator==(const Node& other) const;

 private:
  Kind kind_ = Kind::kNull;
  Mark mark_;
  std::string value_;
  bool quoted_ = false;
  std::vector<std::string> keys_;
  std::vector<Node> items_;
};

/// Parses a single document. Throws SyntaxError with 1-based line/column.
Node parse(std::string_view text);

/// Emits block style with two-space indentation. Sequences whose items are
/// all scalars are written in flow style ("[3, 299, 299]").
std::string emit(const Node& root);

/// Quotes a scalar if the plain spelling would not read back identically.
std::string format_scalar(std::string_view value);

}  // namespace evalscope::yaml
