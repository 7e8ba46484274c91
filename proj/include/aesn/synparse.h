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

// Readers for per-sentence syntactic annotations: Penn-style bracketed
// constituency trees (one per line) and tabular dependency blocks.

#ifndef AESN_SYNPARSE_H_
#define AESN_SYNPARSE_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aesn {

struct LeafInfo {
  size_t index = 0;
  std::string surface;
  std::string pos;
};

class ConstituencyTree {
 public:
  struct Node {
    std::string label;  // as written, function tags included
    int parent = -1;
    std::vector<int> children;
    // Preterminals carry the word and its token index; -1 elsewhere.
    int leaf = -1;
    std::string word;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }
  size_t num_leaves() const { return leaf_nodes_.size(); }
  // Node id of the preterminal over token i.
  int leaf_node(size_t i) const { return leaf_nodes_.at(i); }

  // Preterminals in sentence order.
  std::vector<LeafInfo> Leaves() const;
  // Token indices dominated by `node`, ascending.
  std::vector<size_t> Yield(int node) const;

  // Canonical single-line form: "(LABEL child ...)" with "(POS word)" leaves.
  std::string Serialize() const;

 private:
  friend ConstituencyTree ParseBracketed(const std::string& line);
  std::vector<Node> nodes_;
  std::vector<int> leaf_nodes_;
};

// Throws FormatError with the character offset on unbalanced or malformed
// input. A nameless outer wrapper "( (S ...) )" is unwrapped.
ConstituencyTree ParseBracketed(const std::string& line);

// Constituent label with function tags removed: "NP-SBJ" -> "NP", "PP=2" -> "PP".
// Labels starting with '-' ("-NONE-") are kept intact.
std::string StripFunctionTags(const std::string& label);

// Throws AlignmentError unless the tree's leaves match `surfaces` position-wise.
// Penn bracket escapes (-LRB- etc.) match their literal characters.
void CheckTreeAlignment(const ConstituencyTree& tree, std::span<const std::string> surfaces);

struct DependencyGraph {
  // head[i] in 0..n (1-based token ids, 0 = artificial root).
  std::vector<size_t> head;
  std::vector<std::string> rel;
  std::vector<std::string> surface;

  size_t size() const { return head.size(); }
  // Token indices (0-based) whose head is token i, ascending.
  std::vector<size_t> Dependents(size_t i) const;
};

// Parses rows "index surface head rel" (tab or space separated). Throws
// FormatError on malformed rows, StructureError on out-of-range heads,
// self-loops, cycles or a root count other than one, and AlignmentError when
// `expected_tokens` is given and differs from the row count.
DependencyGraph ReadDependencyBlock(std::span<const std::string> lines,
                                    std::optional<size_t> expected_tokens = std::nullopt);

// One tree per non-blank line.
std::vector<ConstituencyTree> ReadTreesFile(const std::string& path);
// Blank-line separated blocks.
std::vector<DependencyGraph> ReadDepsFile(const std::string& path);

void WriteDependencyBlock(std::ostream& out, const DependencyGraph& graph);

}  // namespace aesn

#endif  // AESN_SYNPARSE_H_
