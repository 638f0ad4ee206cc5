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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "meshsim/error.h"

namespace meshsim::yaml {
namespace {

bool SameTree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::kNull: return true;
    case Node::Kind::kScalar: return a.scalar == b.scalar;
    case Node::Kind::kList:
      if (a.items.size() != b.items.size()) return false;
      for (std::size_t i = 0; i < a.items.size(); ++i) {
        if (!SameTree(a.items[i], b.items[i])) return false;
      }
      return true;
    case Node::Kind::kMap:
      if (a.entries.size() != b.entries.size()) return false;
      for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (a.entries[i].key != b.entries[i].key) return false;
        if (!SameTree(a.entries[i].value, b.entries[i].value)) return false;
      }
      return true;
  }
  return false;
}

Node ParseOne(std::string_view text) {
  auto docs = Parse(text);
  EXPECT_EQ(docs.size(), 1u);
  return docs.empty() ? Node() : docs[0].root;
}

ErrorCode CodeOf(std::string_view text) {
  try {
    Parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(YamlTest, NestedMapsAndLists) {
  const Node root = ParseOne(
      "a: 1\n"
      "b:\n"
      "  c: two\n"
      "  d:\n"
      "    - x\n"
      "    - y: 3\n"
      "      z: 4\n");
  ASSERT_TRUE(root.IsMap());
  EXPECT_EQ(root.Find("a")->scalar, "1");
  const Node* b = root.Find("b");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->Find("c")->scalar, "two");
  const Node* d = b->Find("d");
  ASSERT_TRUE(d->IsList());
  ASSERT_EQ(d->items.size(), 2u);
  EXPECT_EQ(d->items[0].scalar, "x");
  EXPECT_EQ(d->items[1].Find("y")->scalar, "3");
  EXPECT_EQ(d->items[1].Find("z")->scalar, "4");
  EXPECT_EQ(root.Find("missing"), nullptr);
}

TEST(YamlTest, CompactListAtParentIndent) {
  const Node root = ParseOne(
      "containers:\n"
      "- name: a\n"
      "  image: i\n"
      "- name: b\n");
  const Node* c = root.Find("containers");
  ASSERT_TRUE(c->IsList());
  ASSERT_EQ(c->items.size(), 2u);
  EXPECT_EQ(c->items[1].Find("name")->scalar, "b");
}

TEST(YamlTest, ListItemsInterleavedWithKeysStayInOrder) {
  const Node root = ParseOne(
      "route:\n"
      "- a\n"
      "retries:\n"
      "  attempts: 3\n"
      "- b\n");
  ASSERT_EQ(root.entries.size(), 3u);
  EXPECT_EQ(root.entries[0].key, "route");
  EXPECT_EQ(root.entries[1].key, "retries");
  EXPECT_EQ(root.entries[2].key, "route");
  EXPECT_EQ(root.entries[2].value.items[0].scalar, "b");
}

TEST(YamlTest, MultipleDocumentsAndComments) {
  const auto docs = Parse(
      "# leading\n"
      "a: 1  # trailing\n"
      "---\n"
      "\n"
      "b: \"x # not a comment\"\n"
      "---\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].root.Find("a")->scalar, "1");
  EXPECT_EQ(docs[1].root.Find("b")->scalar, "x # not a comment");
  EXPECT_EQ(docs[1].line, 5);
}

TEST(YamlTest, QuotedScalars) {
  const Node root = ParseOne(
      "d: \"a\\\"b\\\\c\\n\"\n"
      "s: 'it''s'\n"
      "r: \"^(.*?;)?(email=[^;]*@company.com)(;.*)?\\$\"\n"
      "e: \"\"\n"
      "n:\n");
  EXPECT_EQ(root.Find("d")->scalar, "a\"b\\c\n");
  EXPECT_EQ(root.Find("s")->scalar, "it's");
  EXPECT_EQ(root.Find("r")->scalar, "^(.*?;)?(email=[^;]*@company.com)(;.*)?$");
  EXPECT_TRUE(root.Find("e")->IsScalar());
  EXPECT_EQ(root.Find("e")->scalar, "");
  EXPECT_TRUE(root.Find("n")->IsNull());
}

TEST(YamlTest, LineNumbersAreRecorded) {
  const Node root = ParseOne("\n\na:\n  b: 1\n");
  EXPECT_EQ(root.line, 3);
  EXPECT_EQ(root.Find("a")->Find("b")->line, 4);
}

TEST(YamlTest, RejectsUnsupportedSyntax) {
  EXPECT_EQ(CodeOf("a: [1, 2]\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a: &x 1\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a: |\n  text\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a:\n\tb: 1\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a: \"open\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a: 1\n  b: 2\n"), ErrorCode::kParseError);
  EXPECT_EQ(CodeOf("a: 1\njunk\n"), ErrorCode::kParseError);
}

TEST(YamlTest, ParseErrorNamesTheLine) {
  try {
    Parse("a: 1\nb: [x]\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.message().find("line 2"), std::string::npos);
  }
}

TEST(YamlTest, EmitQuotesWhereNeeded) {
  Node root = Node::Map();
  root.Add("plain", Node::Scalar("value"));
  root.Add("colon", Node::Scalar("a: b"));
  root.Add("dash", Node::Scalar("-x"));
  root.Add("empty", Node::Scalar(""));
  Node& list = root.Add("list", Node::List());
  list.Push(Node::Scalar("one"));
  Node& item = list.Push(Node::Map());
  item.Add("k", Node::Scalar("v"));
  item.Add("k2", Node::Scalar("v2"));
  EXPECT_EQ(Emit(root),
            "plain: value\n"
            "colon: \"a: b\"\n"
            "dash: \"-x\"\n"
            "empty: \"\"\n"
            "list:\n"
            "  - one\n"
            "  - k: v\n"
            "    k2: v2\n");
}

class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  Node Make(int depth) {
    const int pick = depth <= 0 ? 0 : Uniform(0, 2);
    if (pick == 0) return Node::Scalar(Text(0));
    const int n = Uniform(1, 3);
    if (pick == 1) {
      Node list = Node::List();
      for (int i = 0; i < n; ++i) list.Push(Make(depth - 1));
      return list;
    }
    Node map = Node::Map();
    for (int i = 0; i < n; ++i) map.Add(Text(1), Make(depth - 1));
    return map;
  }

 private:
  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  std::string Text(int min_len) {
    static constexpr std::string_view kAlphabet = "abcXYZ019 -:#\"'\\./@$";
    const int len = Uniform(min_len, 8);
    std::string s;
    for (int i = 0; i < len; ++i) {
      s += kAlphabet[static_cast<std::size_t>(Uniform(0, kAlphabet.size() - 1))];
    }
    return s;
  }

  std::mt19937_64 rng_;
};

// Property: emitting any tree of scalars, lists and maps and parsing the
// result gives back the same tree.
TEST(YamlTest, EmitParseRoundTrip) {
  TreeGen gen(20260101);
  for (int i = 0; i < 500; ++i) {
    Node tree = Node::Map();
    tree.Add("root", gen.Make(4));
    const std::string text = Emit(tree);
    Node back;
    ASSERT_NO_THROW(back = ParseOne(text)) << text;
    EXPECT_TRUE(SameTree(tree, back)) << text;
    EXPECT_EQ(Emit(back), text);
  }
}

}  // namespace
}  // namespace meshsim::yaml
