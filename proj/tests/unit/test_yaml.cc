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

#include <gtest/gtest.h>

#include "evalscope/error.h"
#include "evalscope/yaml_subset.h"

namespace evalscope::yaml {
namespace {

TEST(Yaml, BlockMappingKeepsOrder) {
  Node n = parse("b: 1\na: 2\nc:\n  z: x\n  y: w\n");
  ASSERT_TRUE(n.is_mapping());
  EXPECT_EQ(n.keys(), (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(n.find("c")->keys(), (std::vector<std::string>{"z", "y"}));
  EXPECT_EQ(n.find("a")->value(), "2");
}

TEST(Yaml, SequencesAndFlow) {
  Node n = parse("dims: [3, 299, 299]\nitems:\n  - one\n  - k: v\n    j: w\nm: {a: 1, b: two}\n");
  ASSERT_EQ(n.find("dims")->items().size(), 3u);
  EXPECT_EQ(n.find("dims")->items()[2].value(), "299");
  const Node& items = *n.find("items");
  EXPECT_EQ(items.items()[0].value(), "one");
  EXPECT_EQ(items.items()[1].find("j")->value(), "w");
  EXPECT_EQ(n.find("m")->find("b")->value(), "two");
}

TEST(Yaml, CommentsAndQuotes) {
  Node n = parse("name: Inception-v3 # model name\nurl: \"a # b\"\nq: 'it''s'\n");
  EXPECT_EQ(n.find("name")->value(), "Inception-v3");
  EXPECT_EQ(n.find("url")->value(), "a # b");
  EXPECT_TRUE(n.find("url")->quoted());
  EXPECT_EQ(n.find("q")->value(), "it's");
}

TEST(Yaml, NullValues) {
  Node n = parse("a:\nb: ~\n");
  EXPECT_TRUE(n.find("a")->is_null());
}

TEST(Yaml, SyntaxErrorsCarryPosition) {
  try {
    parse("a: 1\n  b: 2\n");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
  EXPECT_THROW(parse("a: &x 1\n"), SyntaxError);
  EXPECT_THROW(parse("a: |\n  text\n"), SyntaxError);
  EXPECT_THROW(parse("---\na: 1\n---\nb: 2\n"), SyntaxError);
  EXPECT_THROW(parse("a: [1, 2\n"), SyntaxError);
}

TEST(Yaml, DuplicateKeysRejected) { EXPECT_THROW(parse("a: 1\na: 2\n"), Error); }

TEST(Yaml, EmitRoundTrips) {
  const char* docs[] = {
      "a: 1\nb:\n  - x\n  - y: 1\n    z: [1, 2]\nc: \"#not a comment\"\n",
      "k: ''\nl: 'true'\nm: ': colon'\n",
      "outer:\n  inner:\n    deepest: [a, b]\n",
  };
  for (const char* doc : docs) {
    Node n = parse(doc);
    EXPECT_EQ(parse(emit(n)), n) << emit(n);
  }
}

TEST(Yaml, FormatScalarQuotesWhenNeeded) {
  EXPECT_EQ(format_scalar("plain"), "plain");
  EXPECT_NE(format_scalar("a: b"), "a: b");
  EXPECT_NE(format_scalar(""), "");
  EXPECT_NE(format_scalar(">=1.10.x"), ">=1.10.x");
}

}  // namespace
}  // namespace evalscope::yaml
