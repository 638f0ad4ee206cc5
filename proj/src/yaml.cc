//
// Copyright 2026 The meshsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "meshsim/yaml.h"

#include <fmt/format.h>

#include "meshsim/error.h"
#include "text.h"

namespace meshsim::yaml {

Node Node::Null(int line) {
  Node n;
  n.line = line;
  return n;
}

Node Node::Scalar(std::string value, int line) {
  Node n;
  n.kind = Kind::kScalar;
  n.scalar = std::move(value);
  n.line = line;
  return n;
}

Node Node::Map(int line) {
  Node n;
  n.kind = Kind::kMap;
  n.line = line;
  return n;
}

Node Node::List(int line) {
  Node n;
  n.kind = Kind::kList;
  n.line = line;
  return n;
}

const Node* Node::Find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

Node& Node::Add(std::string key, Node value) {
  entries.push_back({std::move(key), std::move(value)});
  return entries.back().value;
}

Node& Node::Push(Node value) {
  items.push_back(std::move(value));
  return items.back();
}

namespace {

[[noreturn]] void Fail(int line, std::string_view what) {
  throw Error(ErrorCode::kParseError, fmt::format("line {}: {}", line, what));
}

struct Line {
  int indent = 0;
  std::string content;
  int number = 0;
};

// Removes a trailing comment. Quotes only count when they open a scalar,
// i.e. at the start or right after a space.
std::string StripComment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool at_boundary = i == 0 || s[i - 1] == ' ';
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if ((c == '"' || c == '\'') && at_boundary) {
      quote = c;
    } else if (c == '#' && at_boundary) {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

bool IsListItem(std::string_view content) {
  return content == "-" || text::StartsWith(content, "- ");
}

// Position of the ':' that separates a key from its value, or npos.
std::size_t FindKeySeparator(std::string_view s) {
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '"' || s[0] == '\'')) {
    const char quote = s[0];
    for (i = 1; i < s.size(); ++i) {
      if (quote == '"' && s[i] == '\\') {
        ++i;
      } else if (s[i] == quote) {
        break;
      }
    }
  }
  for (; i < s.size(); ++i) {
    if (s[i] == ':' && (i + 1 == s.size() || s[i + 1] == ' ')) return i;
  }
  return std::string_view::npos;
}

std::string Unquote(std::string_view raw, int line) {
  const char quote = raw.front();
  std::string out;
  std::size_t i = 1;
  bool closed = false;
  for (; i < raw.size(); ++i) {
    const char c = raw[i];
    if (quote == '"' && c == '\\') {
      if (i + 1 >= raw.size()) Fail(line, "dangling escape");
      const char next = raw[++i];
      switch (next) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        // Unknown escapes such as "\$" keep the escaped character.
        default: out += next; break;
      }
    } else if (quote == '\'' && c == '\'') {
      if (i + 1 < raw.size() && raw[i + 1] == '\'') {
        out += '\'';
        ++i;
      } else {
        closed = true;
        break;
      }
    } else if (quote == '"' && c == '"') {
      closed = true;
      break;
    } else {
      out += c;
    }
  }
  if (!closed) Fail(line, "unterminated quoted scalar");
  if (i + 1 != raw.size()) Fail(line, "text after closing quote");
  return out;
}

Node ParseScalar(std::string_view raw, int line) {
  raw = text::Trim(raw);
  if (raw.empty()) return Node::Null(line);
  const char first = raw.front();
  if (first == '"' || first == '\'') return Node::Scalar(Unquote(raw, line), line);
  if (first == '[' || first == '{') Fail(line, "flow style is not supported");
  if (first == '&' || first == '*') {
    Fail(line, "anchors and aliases are not supported");
  }
  if (first == '|' || first == '>') Fail(line, "block scalars are not supported");
  return Node::Scalar(std::string(raw), line);
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Node ParseDocument() {
    const int indent = lines_[0].indent;
    Node root = ParseBlock(indent);
    if (pos_ < lines_.size()) {
      Fail(lines_[pos_].number, "unexpected content at this indentation");
    }
    return root;
  }

 private:
  Node ParseBlock(int indent) {
    if (IsListItem(lines_[pos_].content)) return ParseList(indent);
    if (FindKeySeparator(lines_[pos_].content) == std::string_view::npos) {
      Node scalar = ParseScalar(lines_[pos_].content, lines_[pos_].number);
      ++pos_;
      return scalar;
    }
    return ParseMap(indent);
  }

  Node ParseMap(int indent) {
    Node map = Node::Map(lines_[pos_].number);
    std::string compact_key;
    while (pos_ < lines_.size()) {
      const Line& line = lines_[pos_];
      if (line.indent < indent) break;
      if (line.indent > indent) Fail(line.number, "unexpected indentation");
      if (IsListItem(line.content)) {
        // A list item at the map's own column continues the most recent
        // compact list. Lets route blocks interleave with their retries.
        if (compact_key.empty()) {
          Fail(line.number, "list item where a key was expected");
        }
        map.Add(compact_key, ParseList(indent));
        continue;
      }
      const auto sep = FindKeySeparator(line.content);
      if (sep == std::string_view::npos) {
        Fail(line.number, "expected 'key: value'");
      }
      std::string_view raw_key = text::Trim(std::string_view(line.content).substr(0, sep));
      if (raw_key.empty()) Fail(line.number, "empty key");
      std::string key = (raw_key.front() == '"' || raw_key.front() == '\'')
                            ? Unquote(raw_key, line.number)
                            : std::string(raw_key);
      const std::string rest(text::Trim(std::string_view(line.content).substr(sep + 1)));
      const int number = line.number;
      ++pos_;
      if (!rest.empty()) {
        map.Add(std::move(key), ParseScalar(rest, number));
        continue;
      }
      if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
        map.Add(std::move(key), ParseBlock(lines_[pos_].indent));
      } else if (pos_ < lines_.size() && lines_[pos_].indent == indent &&
                 IsListItem(lines_[pos_].content)) {
        compact_key = key;
        map.Add(std::move(key), ParseList(indent));
      } else {
        map.Add(std::move(key), Node::Null(number));
      }
    }
    return map;
  }

  Node ParseList(int indent) {
    Node list = Node::List(lines_[pos_].number);
    while (pos_ < lines_.size()) {
      Line& line = lines_[pos_];
      if (line.indent != indent || !IsListItem(line.content)) break;
      std::size_t offset = 1;
      while (offset < line.content.size() && line.content[offset] == ' ') ++offset;
      const std::string rest = line.content.substr(offset);
      if (rest.empty()) {
        const int number = line.number;
        ++pos_;
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          list.Push(ParseBlock(lines_[pos_].indent));
        } else {
          list.Push(Node::Null(number));
        }
      } else if (IsListItem(rest) ||
                 FindKeySeparator(rest) != std::string_view::npos) {
        // Re-read the remainder as if it started its own line.
        line.indent = indent + static_cast<int>(offset);
        line.content = rest;
        list.Push(ParseBlock(line.indent));
      } else {
        list.Push(ParseScalar(rest, line.number));
        ++pos_;
      }
    }
    return list;
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

bool NeedsQuotes(std::string_view s) {
  if (s.empty()) return true;
  if (std::string_view("-?:,[]{}#&*!|>'\"%@` ").find(s.front()) !=
      std::string_view::npos) {
    return true;
  }
  if (s.back() == ' ' || s.back() == ':') return true;
  for (char c : s) {
    if (c == '"' || c == '\\' || c == '\n' || c == '\t') return true;
  }
  return s.find(": ") != std::string_view::npos ||
         s.find(" #") != std::string_view::npos;
}

std::string EmitScalar(std::string_view s) {
  if (!NeedsQuotes(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  out += '"';
  return out;
}

bool IsEmptyContainer(const Node& n) {
  return n.IsNull() || (n.IsMap() && n.entries.empty()) ||
         (n.IsList() && n.items.empty());
}

void EmitNode(const Node& node, int indent, std::string& out);

// Emits a nested block so that its first line hangs off a "- " marker.
void EmitListItem(const Node& item, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (item.IsScalar()) {
    out += pad + "- " + EmitScalar(item.scalar) + "\n";
    return;
  }
  if (IsEmptyContainer(item)) {
    out += pad + "-\n";
    return;
  }
  std::string nested;
  EmitNode(item, indent + 2, nested);
  nested.replace(0, static_cast<std::size_t>(indent) + 2, pad + "- ");
  out += nested;
}

void EmitNode(const Node& node, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (node.kind) {
    case Node::Kind::kNull:
      return;
    case Node::Kind::kScalar:
      out += pad + EmitScalar(node.scalar) + "\n";
      return;
    case Node::Kind::kList:
      for (const auto& item : node.items) EmitListItem(item, indent, out);
      return;
    case Node::Kind::kMap:
      for (const auto& e : node.entries) {
        out += pad + EmitScalar(e.key) + ":";
        if (e.value.IsScalar()) {
          out += " " + EmitScalar(e.value.scalar) + "\n";
        } else if (IsEmptyContainer(e.value)) {
          out += "\n";
        } else {
          out += "\n";
          EmitNode(e.value, indent + 2, out);
        }
      }
      return;
  }
}

}  // namespace

std::vector<Document> Parse(std::string_view text) {
  std::vector<Document> docs;
  std::vector<Line> current;
  int current_start = 1;
  auto flush = [&]() {
    if (!current.empty()) {
      Parser parser(std::move(current));
      docs.push_back({parser.ParseDocument(), current_start});
    }
    current.clear();
  };

  const auto raw_lines = text::SplitLines(text);
  for (std::size_t i = 0; i < raw_lines.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    const std::string& raw = raw_lines[i];
    std::size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    if (indent < raw.size() && raw[indent] == '\t') {
      Fail(number, "tabs are not allowed for indentation");
    }
    std::string content = StripComment(std::string_view(raw).substr(indent));
    content = std::string(text::Trim(content));
    if (content.empty()) continue;
    if (indent == 0 && (content == "---" || content == "...")) {
      flush();
      current_start = number + 1;
      continue;
    }
    if (current.empty()) current_start = number;
    current.push_back({static_cast<int>(indent), std::move(content), number});
  }
  flush();
  return docs;
}

std::string Emit(const Node& root) {
  std::string out;
  EmitNode(root, 0, out);
  return out;
}

}  // namespace meshsim::yaml
