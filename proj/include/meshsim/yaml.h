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

#ifndef MESHSIM_YAML_H
#define MESHSIM_YAML_H

#include <string>
#include <string_view>
#include <vector>

// Reader and writer for the restricted YAML subset used by manifests:
// two-space block indentation, plain and quoted scalars, block maps, block
// lists and `---` document separators. Flow style, anchors and block
// scalars are rejected.
namespace meshsim::yaml {

struct MapEntry;

struct Node {
  enum class Kind { kNull, kScalar, kMap, kList };

  Kind kind = Kind::kNull;
  std::string scalar;
  // Maps keep insertion order and may repeat a key; the typed layer decides
  // whether repetition is meaningful.
  std::vector<MapEntry> entries;
  std::vector<Node> items;
  int line = 0;

  static Node Null(int line = 0);
  static Node Scalar(std::string value, int line = 0);
  static Node Map(int line = 0);
  static Node List(int line = 0);

  bool IsNull() const { return kind == Kind::kNull; }
  bool IsScalar() const { return kind == Kind::kScalar; }
  bool IsMap() const { return kind == Kind::kMap; }
  bool IsList() const { return kind == Kind::kList; }

  // First entry with `key`, or nullptr.
  const Node* Find(std::string_view key) const;
  Node& Add(std::string key, Node value);
  Node& Push(Node value);
};

struct MapEntry {
  std::string key;
  Node value;
};

struct Document {
  Node root;
  int line = 0;
};

// Throws ParseError with the offending line number.
std::vector<Document> Parse(std::string_view text);

std::string Emit(const Node& root);

}  // namespace meshsim::yaml

#endif  // MESHSIM_YAML_H
