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

#include "evalscope/yaml_subset.h"

#include <cstdio>
#include <utility>

#include "evalscope/error.h"

namespace evalscope::yaml {

Node Node::null(Mark mark) {
  Node n;
  n.mark_ = mark;
  return n;
}

Node Node::scalar(std::string value, bool quoted, Mark mark) {
  Node n;
  n.kind_ = Kind::kScalar;
  n.value_ = std::move(value);
  n.quoted_ = quoted;
  n.mark_ = mark;
  return n;
}

Node Node::sequence(Mark mark) {
  Node n;
  n.kind_ = Kind::kSequence;
  n.mark_ = mark;
  return n;
}

Node Node::mapping(Mark mark) {
  Node n;
  n.kind_ = Kind::kMapping;
  n.mark_ = mark;
  return n;
}

void Node::push_back(Node item) { items_.push_back(std::move(item)); }

const Node* Node::find(std::string_view key) const {
  for (size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return &items_[i];
  }
  return nullptr;
}

Node* Node::find(std::string_view key) {
  return const_cast<Node*>(std::as_const(*this).find(key));
}

void Node::add(std::string key, Node value) {
  if (find(key) != nullptr) {
    throw Error(ErrorCode::kAlreadyExists, "duplicate key '" + key + "'");
  }
  keys_.push_back(std::move(key));
  items_.push_back(std::move(value));
}

bool Node::operator==(const Node& other) const {
  return kind_ == other.kind_ && value_ == other.value_ && keys_ == other.keys_ &&
         items_ == other.items_;
}

namespace {

struct Line {
  int number = 0;   // 1-based
  int indent = 0;   // leading spaces
  std::string text; // content without indentation, comment, trailing blanks
};

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && is_blank(s[b])) ++b;
  while (e > b && (is_blank(s[e - 1]) || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Cuts a trailing "# comment" that is outside quotes.
std::string strip_comment(std::string_view s) {
  bool in_double = false;
  bool in_single = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_double) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_double = false;
      }
    } else if (in_single) {
      if (c == '\'') in_single = false;
    } else if (c == '"') {
      in_double = true;
    } else if (c == '\'') {
      in_single = true;
    } else if (c == '#' && (i == 0 || is_blank(s[i - 1]))) {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

bool is_sequence_item(std::string_view text) {
  return text == "-" || (text.size() >= 2 && text[0] == '-' && text[1] == ' ');
}

// Index of the ':' separating a mapping key from its value, or npos.
size_t find_mapping_colon(std::string_view text) {
  if (text.empty() || text[0] == '[' || text[0] == '{') return std::string_view::npos;
  bool in_double = false;
  bool in_single = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_double) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_double = false;
      }
      continue;
    }
    if (in_single) {
      if (c == '\'') in_single = false;
      continue;
    }
    if (c == '"' && i == 0) {
      in_double = true;
    } else if (c == '\'' && i == 0) {
      in_single = true;
    } else if (c == ':' && (i + 1 == text.size() || is_blank(text[i + 1]))) {
      return i;
    }
  }
  return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) { split_lines(text); }

  Node parse_document() {
    if (lines_.empty()) return Node::null(Mark{1, 1});
    const int indent = lines_[0].indent;
    Node root = parse_block(indent);
    if (pos_ < lines_.size()) {
      const Line& l = lines_[pos_];
      throw SyntaxError(l.number, l.indent + 1, "unexpected content after document");
    }
    return root;
  }

 private:
  void split_lines(std::string_view text) {
    int number = 0;
    bool seen_content = false;
    size_t start = 0;
    while (start <= text.size()) {
      size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++number;
      start = end + 1;

      int indent = 0;
      while (static_cast<size_t>(indent) < raw.size() && raw[indent] == ' ') ++indent;
      if (static_cast<size_t>(indent) < raw.size() && raw[indent] == '\t') {
        const std::string rest = trim(raw);
        if (!rest.empty() && rest[0] != '#') {
          throw SyntaxError(number, indent + 1, "tab characters are not allowed in indentation");
        }
      }
      std::string content = trim(strip_comment(raw.substr(indent)));
      if (content.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (indent == 0 && content == "---") {
        if (seen_content) {
          throw SyntaxError(number, 1, "multiple documents are not supported");
        }
        continue;
      }
      if (indent == 0 && content == "...") {
        throw SyntaxError(number, 1, "document end markers are not supported");
      }
      if (content[0] == '%') {
        throw SyntaxError(number, indent + 1, "directives are not supported");
      }
      seen_content = true;
      lines_.push_back(Line{number, indent, std::move(content)});
      if (end == text.size()) break;
    }
  }

  Node parse_block(int indent) {
    const Line& l = lines_[pos_];
    if (is_sequence_item(l.text)) return parse_sequence(indent);
    return parse_mapping(indent);
  }

  Node parse_mapping(int indent) {
    Node map = Node::mapping(Mark{lines_[pos_].number, indent + 1});
    while (pos_ < lines_.size()) {
      const Line l = lines_[pos_];
      if (l.indent < indent) break;
      if (l.indent > indent) {
        throw SyntaxError(l.number, l.indent + 1, "unexpected indentation");
      }
      if (is_sequence_item(l.text)) {
        throw SyntaxError(l.number, l.indent + 1, "expected a mapping key, found a sequence item");
      }
      const size_t colon = find_mapping_colon(l.text);
      if (colon == std::string_view::npos) {
        throw SyntaxError(l.number, l.indent + 1, "expected 'key: value'");
      }
      const Mark key_mark{l.number, l.indent + 1};
      std::string key = parse_key(trim(std::string_view(l.text).substr(0, colon)), key_mark);

      const std::string_view after = std::string_view(l.text).substr(colon + 1);
      size_t skip = 0;
      while (skip < after.size() && is_blank(after[skip])) ++skip;
      const std::string rest = trim(after);
      const int rest_column = l.indent + 1 + static_cast<int>(colon + 1 + skip);
      ++pos_;

      Node value;
      if (rest.empty()) {
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          value = parse_block(lines_[pos_].indent);
        } else if (pos_ < lines_.size() && lines_[pos_].indent == indent &&
                   is_sequence_item(lines_[pos_].text)) {
          value = parse_sequence(indent);
        } else {
          value = Node::null(Mark{l.number, rest_column});
        }
      } else {
        value = parse_inline(rest, Mark{l.number, rest_column});
      }
      try {
        map.add(std::move(key), std::move(value));
      } catch (const Error& e) {
        throw SyntaxError(key_mark.line, key_mark.column, e.what());
      }
    }
    return map;
  }

  Node parse_sequence(int indent) {
    Node seq = Node::sequence(Mark{lines_[pos_].number, indent + 1});
    while (pos_ < lines_.size()) {
      Line& l = lines_[pos_];
      if (l.indent < indent) break;
      if (l.indent > indent) {
        throw SyntaxError(l.number, l.indent + 1, "unexpected indentation");
      }
      if (!is_sequence_item(l.text)) break;

      size_t offset = 1;
      while (offset < l.text.size() && l.text[offset] == ' ') ++offset;
      const std::string rest = l.text.substr(offset);
      const Mark item_mark{l.number, l.indent + 1 + static_cast<int>(offset)};

      if (rest.empty()) {
        ++pos_;
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          seq.push_back(parse_block(lines_[pos_].indent));
        } else {
          seq.push_back(Node::null(item_mark));
        }
      } else if (is_sequence_item(rest) || find_mapping_colon(rest) != std::string_view::npos) {
        // "- key: value" opens a nested block whose indentation is the
        // column of "key".
        l.indent += static_cast<int>(offset);
        l.text = rest;
        seq.push_back(parse_block(l.indent));
      } else {
        ++pos_;
        seq.push_back(parse_inline(rest, item_mark));
      }
    }
    return seq;
  }

  std::string parse_key(const std::string& raw, Mark mark) {
    if (raw.empty()) throw SyntaxError(mark.line, mark.column, "empty mapping key");
    if (raw[0] == '"' || raw[0] == '\'') {
      size_t pos = 0;
      std::string key = parse_quoted(raw, pos, mark);
      if (pos != raw.size()) {
        throw SyntaxError(mark.line, mark.column, "unexpected text after quoted key");
      }
      return key;
    }
    check_plain_start(raw, mark);
    return raw;
  }

  void check_plain_start(std::string_view s, Mark mark) {
    switch (s[0]) {
      case '&': throw SyntaxError(mark.line, mark.column, "anchors are not supported");
      case '*': throw SyntaxError(mark.line, mark.column, "aliases are not supported");
      case '!': throw SyntaxError(mark.line, mark.column, "tags are not supported");
      case '|':
      case '>': throw SyntaxError(mark.line, mark.column, "block scalars are not supported");
      case '@':
      case '`': throw SyntaxError(mark.line, mark.column, "reserved indicator");
      case '?': throw SyntaxError(mark.line, mark.column, "complex keys are not supported");
      default: break;
    }
  }

  Node parse_inline(const std::string& text, Mark mark) {
    if (text[0] == '[' || text[0] == '{') {
      size_t pos = 0;
      Node n = parse_flow(text, pos, mark);
      skip_blanks(text, pos);
      if (pos != text.size()) {
        throw SyntaxError(mark.line, mark.column + static_cast<int>(pos),
                          "unexpected text after flow collection");
      }
      return n;
    }
    if (text[0] == '"' || text[0] == '\'') {
      size_t pos = 0;
      std::string value = parse_quoted(text, pos, mark);
      skip_blanks(text, pos);
      if (pos != text.size()) {
        throw SyntaxError(mark.line, mark.column + static_cast<int>(pos),
                          "unexpected text after quoted scalar");
      }
      return Node::scalar(std::move(value), true, mark);
    }
    check_plain_start(text, mark);
    if (find_mapping_colon(text) != std::string_view::npos) {
      throw SyntaxError(mark.line, mark.column, "nested mappings must start on a new line");
    }
    return Node::scalar(text, false, mark);
  }

  static void skip_blanks(std::string_view s, size_t& pos) {
    while (pos < s.size() && is_blank(s[pos])) ++pos;
  }

  std::string parse_quoted(std::string_view s, size_t& pos, Mark mark) {
    const char quote = s[pos++];
    std::string out;
    while (true) {
      if (pos >= s.size()) {
        throw SyntaxError(mark.line, mark.column, "unterminated quoted scalar");
      }
      const char c = s[pos++];
      if (quote == '\'') {
        if (c == '\'') {
          if (pos < s.size() && s[pos] == '\'') {
            out += '\'';
            ++pos;
            continue;
          }
          return out;
        }
        out += c;
        continue;
      }
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos >= s.size()) {
        throw SyntaxError(mark.line, mark.column, "unterminated escape sequence");
      }
      const char e = s[pos++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'u': {
          if (pos + 4 > s.size()) {
            throw SyntaxError(mark.line, mark.column, "truncated \\u escape");
          }
          unsigned cp = 0;
          for (int i = 0; i < 4; ++i) {
            const char h = s[pos++];
            cp <<= 4;
            if (h >= '0' && h <= '9') {
              cp |= static_cast<unsigned>(h - '0');
            } else if (h >= 'a' && h <= 'f') {
              cp |= static_cast<unsigned>(h - 'a' + 10);
            } else if (h >= 'A' && h <= 'F') {
              cp |= static_cast<unsigned>(h - 'A' + 10);
            } else {
              throw SyntaxError(mark.line, mark.column, "bad \\u escape");
            }
          }
          append_utf8(out, cp);
          break;
        }
        default:
          throw SyntaxError(mark.line, mark.column + static_cast<int>(pos) - 1,
                            std::string("unknown escape '\\") + e + "'");
      }
    }
  }

  Node parse_flow(std::string_view s, size_t& pos, Mark base) {
    const Mark mark{base.line, base.column + static_cast<int>(pos)};
    const char open = s[pos++];
    const char close = open == '[' ? ']' : '}';
    Node node = open == '[' ? Node::sequence(mark) : Node::mapping(mark);
    skip_blanks(s, pos);
    if (pos < s.size() && s[pos] == close) {
      ++pos;
      return node;
    }
    while (true) {
      skip_blanks(s, pos);
      if (open == '[') {
        node.push_back(parse_flow_item(s, pos, base));
      } else {
        const Mark key_mark{base.line, base.column + static_cast<int>(pos)};
        Node key = parse_flow_item(s, pos, base);
        if (!key.is_scalar()) {
          throw SyntaxError(key_mark.line, key_mark.column, "flow mapping keys must be scalars");
        }
        skip_blanks(s, pos);
        if (pos >= s.size() || s[pos] != ':') {
          throw SyntaxError(base.line, base.column + static_cast<int>(pos), "expected ':' in flow mapping");
        }
        ++pos;
        skip_blanks(s, pos);
        Node value = parse_flow_item(s, pos, base);
        try {
          node.add(key.value(), std::move(value));
        } catch (const Error& e) {
          throw SyntaxError(key_mark.line, key_mark.column, e.what());
        }
      }
      skip_blanks(s, pos);
      if (pos >= s.size()) {
        throw SyntaxError(mark.line, mark.column, std::string("unterminated flow collection, expected '") + close + "'");
      }
      if (s[pos] == ',') {
        ++pos;
        continue;
      }
      if (s[pos] == close) {
        ++pos;
        return node;
      }
      throw SyntaxError(base.line, base.column + static_cast<int>(pos),
                        std::string("expected ',' or '") + close + "'");
    }
  }

  Node parse_flow_item(std::string_view s, size_t& pos, Mark base) {
    const Mark mark{base.line, base.column + static_cast<int>(pos)};
    if (pos >= s.size()) throw SyntaxError(mark.line, mark.column, "unexpected end of flow collection");
    const char c = s[pos];
    if (c == '[' || c == '{') return parse_flow(s, pos, base);
    if (c == '"' || c == '\'') return Node::scalar(parse_quoted(s, pos, mark), true, mark);
    const size_t start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != '}' &&
           !(s[pos] == ':' && (pos + 1 == s.size() || is_blank(s[pos + 1])))) {
      ++pos;
    }
    std::string text = trim(s.substr(start, pos - start));
    if (text.empty()) throw SyntaxError(mark.line, mark.column, "empty flow item");
    check_plain_start(text, mark);
    return Node::scalar(std::move(text), false, mark);
  }

  std::vector<Line> lines_;
  size_t pos_ = 0;
};

bool needs_quotes(std::string_view v) {
  if (v.empty()) return true;
  if (is_blank(v.front()) || is_blank(v.back())) return true;
  const std::string_view indicators = "?:,[]{}#&*!|>'\"%@`";
  if (indicators.find(v.front()) != std::string_view::npos) return true;
  if (v.front() == '-' && (v.size() == 1 || v[1] == ' ')) return true;
  if (v == "---" || v == "...") return true;
  for (size_t i = 0; i < v.size(); ++i) {
    const char c = v[i];
    if (static_cast<unsigned char>(c) < 0x20) return true;
    if (c == ',' || c == '[' || c == ']' || c == '{' || c == '}') return true;
    if (c == ':' && (i + 1 == v.size() || v[i + 1] == ' ')) return true;
    if (c == '#' && i > 0 && v[i - 1] == ' ') return true;
  }
  return false;
}

std::string double_quote(std::string_view v) {
  std::string out = "\"";
  for (char c : v) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string scalar_text(const Node& n) {
  if (n.is_null()) return "";
  return n.quoted() ? double_quote(n.value()) : format_scalar(n.value());
}

bool all_scalars(const Node& seq) {
  for (const auto& item : seq.items()) {
    if (!item.is_scalar()) return false;
  }
  return true;
}

std::string flow_sequence(const Node& seq) {
  std::string out = "[";
  for (size_t i = 0; i < seq.items().size(); ++i) {
    if (i) out += ", ";
    out += scalar_text(seq.items()[i]);
  }
  return out + "]";
}

void emit_block(const Node& n, int indent, std::string& out);

// Writes the value part of "key:" or "-" (leading space included for inline
// values, a newline for nested blocks).
void emit_value(const Node& v, int indent, std::string& out) {
  switch (v.kind()) {
    case Node::Kind::kNull:
      out += "\n";
      break;
    case Node::Kind::kScalar:
      out += " " + scalar_text(v) + "\n";
      break;
    case Node::Kind::kSequence:
      if (v.items().empty() || all_scalars(v)) {
        out += " " + flow_sequence(v) + "\n";
      } else {
        out += "\n";
        emit_block(v, indent + 2, out);
      }
      break;
    case Node::Kind::kMapping:
      if (v.size() == 0) {
        out += " {}\n";
      } else {
        out += "\n";
        emit_block(v, indent + 2, out);
      }
      break;
  }
}

void emit_block(const Node& n, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  if (n.is_mapping()) {
    for (size_t i = 0; i < n.size(); ++i) {
      const std::string& key = n.keys()[i];
      out += pad + (needs_quotes(key) ? double_quote(key) : key) + ":";
      emit_value(n.values()[i], indent, out);
    }
    return;
  }
  if (n.is_sequence()) {
    for (const auto& item : n.items()) {
      if ((item.is_mapping() && item.size() > 0) ||
          (item.is_sequence() && !item.items().empty() && !all_scalars(item))) {
        std::string nested;
        emit_block(item, indent + 2, nested);
        out += pad + "- " + nested.substr(indent + 2);
      } else {
        out += pad + "-";
        emit_value(item, indent, out);
      }
    }
    return;
  }
  out += pad + scalar_text(n) + "\n";
}

}  // namespace

std::string format_scalar(std::string_view value) {
  return needs_quotes(value) ? double_quote(value) : std::string(value);
}

Node parse(std::string_view text) { return Parser(text).parse_document(); }

std::string emit(const Node& root) {
  std::string out;
  emit_block(root, 0, out);
  return out;
}

}  // namespace evalscope::yaml
