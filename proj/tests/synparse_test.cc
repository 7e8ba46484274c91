// Copyright 2026 The AESN Authors. All Rights Reserved.
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

#include "aesn/synparse.h"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aesn/error.h"
#include "test_util.h"

namespace aesn {
namespace {

using Lines = std::vector<std::string>;

std::vector<std::string> Surfaces(const ConstituencyTree& t) {
  std::vector<std::string> out;
  for (const auto& leaf : t.Leaves()) out.push_back(leaf.surface);
  return out;
}

TEST_CASE("bracketed tree with an NP over a multiword name") {
  ConstituencyTree t = ParseBracketed("(S (NP (NNP Salt) (NNP Lake) (NNP City)) (VBZ is))");
  CHECK(t.nodes()[t.root()].label == "S");
  CHECK(Surfaces(t) == std::vector<std::string>{"Salt", "Lake", "City", "is"});
  std::vector<LeafInfo> leaves = t.Leaves();
  CHECK(leaves[3].pos == "VBZ");
  CHECK(leaves[2].index == 2);
  int np = t.nodes()[t.leaf_node(0)].parent;
  CHECK(t.nodes()[np].label == "NP");
  CHECK(t.Yield(np) == std::vector<size_t>{0, 1, 2});
  CHECK(t.Yield(t.root()).size() == 4);
}

TEST_CASE("minimal tree") {
  ConstituencyTree t = ParseBracketed("(NP (NN dog))");
  CHECK(t.nodes()[t.root()].label == "NP");
  CHECK(t.num_leaves() == 1);
  CHECK(Surfaces(t) == std::vector<std::string>{"dog"});
}

TEST_CASE("malformed brackets are rejected with a position") {
  CHECK_THROWS_AS(ParseBracketed("(S (NP (NNP Salt))"), FormatError);
  CHECK_THROWS_AS(ParseBracketed("(S (NP (NNP Salt))))"), FormatError);
  CHECK_THROWS_AS(ParseBracketed("(S )"), FormatError);
  CHECK_THROWS_AS(ParseBracketed(""), FormatError);
  try {
    ParseBracketed("(S (NP (NNP Salt))");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("char") != std::string::npos);
  }
}

TEST_CASE("outer nameless wrapper is removed") {
  ConstituencyTree t = ParseBracketed("( (S (NP (PRP it)) (VP (VBZ works))) )");
  CHECK(t.nodes()[t.root()].label == "S");
  CHECK(t.num_leaves() == 2);
}

TEST_CASE("serialization round trip") {
  const char* inputs[] = {
      "(S (NP (NNP Salt) (NNP Lake) (NNP City)) (VBZ is))",
      "(ROOT (S (NP-SBJ (DT The) (NN city)) (VP (VBZ is) (PP (IN in) (NP (NNP Utah)))) (. .)))",
      "(NP (NN dog))",
  };
  for (const char* in : inputs) {
    ConstituencyTree t = ParseBracketed(in);
    std::string once = t.Serialize();
    ConstituencyTree again = ParseBracketed(once);
    CHECK(again.Serialize() == once);
    CHECK(once == in);
  }
}

TEST_CASE("function tags are stripped") {
  CHECK(StripFunctionTags("NP-SBJ") == "NP");
  CHECK(StripFunctionTags("PP=2") == "PP");
  CHECK(StripFunctionTags("NP-SBJ-1") == "NP");
  CHECK(StripFunctionTags("-NONE-") == "-NONE-");
  CHECK(StripFunctionTags("VP") == "VP");
}

TEST_CASE("tree alignment with the sentence") {
  ConstituencyTree t = ParseBracketed("(S (NP (NNP Salt)) (VBZ is))");
  std::vector<std::string> ok = {"Salt", "is"};
  CHECK_NOTHROW(CheckTreeAlignment(t, ok));
  std::vector<std::string> bad = {"Salt", "was"};
  CHECK_THROWS_AS(CheckTreeAlignment(t, bad), AlignmentError);
  std::vector<std::string> shorter = {"Salt"};
  CHECK_THROWS_AS(CheckTreeAlignment(t, shorter), AlignmentError);
  ConstituencyTree paren = ParseBracketed("(S (-LRB- -LRB-) (NN x) (-RRB- -RRB-))");
  std::vector<std::string> literal = {"(", "x", ")"};
  CHECK_NOTHROW(CheckTreeAlignment(paren, literal));
}

TEST_CASE("dependency block of the Salt Lake example") {
  Lines rows = {"1 Salt 3 compound", "2 Lake 3 compound", "3 City 0 root"};
  DependencyGraph g = ReadDependencyBlock(rows);
  CHECK(g.head == std::vector<size_t>{3, 3, 0});
  CHECK(g.rel == std::vector<std::string>{"compound", "compound", "root"});
  CHECK(g.surface[1] == "Lake");
  CHECK(g.Dependents(2) == std::vector<size_t>{0, 1});
  CHECK(g.Dependents(0).empty());
}

TEST_CASE("single-node dependency tree") {
  Lines rows = {"1\tx\t0\troot"};
  DependencyGraph g = ReadDependencyBlock(rows, 1);
  CHECK(g.size() == 1);
  CHECK(g.head[0] == 0);
}

TEST_CASE("structural errors in dependency blocks") {
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 2 x", "2 b 1 y"}), StructureError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 0 root", "2 b 2 y"}), StructureError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 0 root", "2 b 0 root"}), StructureError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 0 root", "2 b 5 y"}), StructureError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 0 root", "3 b 1 y"}), FormatError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a root"}), FormatError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a x root"}), FormatError);
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 a 0 root"}, 2), AlignmentError);
  // Three-cycle hanging off a valid root.
  CHECK_THROWS_AS(ReadDependencyBlock(Lines{"1 r 0 root", "2 a 4 x", "3 b 2 x", "4 c 3 x"}),
                  StructureError);
}

TEST_CASE("head chains reach the root") {
  Lines rows = {"1 a 2 x", "2 b 4 x", "3 c 4 x", "4 d 0 root", "5 e 3 x"};
  DependencyGraph g = ReadDependencyBlock(rows);
  for (size_t i = 0; i < g.size(); ++i) {
    size_t cur = i + 1, steps = 0;
    while (cur != 0 && steps <= g.size()) {
      cur = g.head[cur - 1];
      ++steps;
    }
    CHECK(cur == 0);
    CHECK(steps <= g.size());
  }
}

TEST_CASE("parse files are read and written") {
  std::string trees_path = testing::TempPath("parse");
  std::string deps_path = testing::TempPath("parse");
  {
    std::ofstream t(trees_path);
    t << "(S (NN a))\n\n(S (NN b) (NN c))\n";
    std::ofstream d(deps_path);
    d << "1 a 0 root\n\n1 b 0 root\n2 c 1 dep\n";
  }
  CHECK(ReadTreesFile(trees_path).size() == 2);
  std::vector<DependencyGraph> deps = ReadDepsFile(deps_path);
  REQUIRE(deps.size() == 2);
  CHECK(deps[1].head == std::vector<size_t>{0, 1});
  std::ostringstream out;
  WriteDependencyBlock(out, deps[1]);
  CHECK(out.str() == "1\tb\t0\troot\n2\tc\t1\tdep\n");
  std::remove(trees_path.c_str());
  std::remove(deps_path.c_str());
  CHECK_THROWS(ReadTreesFile(trees_path));
}

}  // namespace
}  // namespace aesn
