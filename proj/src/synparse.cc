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

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

namespace {

struct Lexeme {
  enum Kind { kOpen, kClose, kAtom } kind;
  std::string text;
  size_t offset;
};

std::vector<Lexeme> Lex(const std::string& s) {
  std::vector<Lexeme> out;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    if (std::isspace(c)) {
      ++i;
    } else if (c == '(') {
      out.push_back({Lexeme::kOpen, "(", i++});
    } else if (c == ')') {
      out.push_back({Lexeme::kClose, ")", i++});
    } else {
      size_t start = i;
      while (i < s.size() && s[i] != '(' && s[i] != ')' &&
             !std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
      out.push_back({Lexeme::kAtom, s.substr(start, i - start), start});
    }
  }
  return out;
}

const std::map<std::string, std::string>& BracketEscapes() {
  static const std::map<std::string, std::string> kEscapes = {
      {"-LRB-", "("}, {"-RRB-", ")"}, {"-LSB-", "["},
      {"-RSB-", "]"}, {"-LCB-", "{"}, {"-RCB-", "}"}};
  return kEscapes;
}

std::string Unescape(const std::string& s) {
  auto it = BracketEscapes().find(s);
  return it == BracketEscapes().end() ? s : it->second;
}

}  // namespace

std::vector<LeafInfo> ConstituencyTree::Leaves() const {
  std::vector<LeafInfo> out;
  out.reserve(leaf_nodes_.size());
  for (size_t i = 0; i < leaf_nodes_.size(); ++i) {
    const Node& n = nodes_[leaf_nodes_[i]];
    out.push_back({i, n.word, n.label});
  }
  return out;
}

std::vector<size_t> ConstituencyTree::Yield(int node) const {
  std::vector<size_t> out;
  std::vector<int> stack = {node};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (n.leaf >= 0) out.push_back(static_cast<size_t>(n.leaf));
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::string ConstituencyTree::Serialize() const {
  std::string out;
  std::function<void(int)> emit = [&](int id) {
    const Node& n = nodes_[id];
    out += "(" + n.label;
    if (n.leaf >= 0) {
      out += " " + n.word;
    } else {
      for (int c : n.children) {
        out += " ";
        emit(c);
      }
    }
    out += ")";
  };
  if (!nodes_.empty()) emit(0);
  return out;
}

ConstituencyTree ParseBracketed(const std::string& line) {
  std::vector<Lexeme> lex = Lex(line);
  size_t pos = 0;
  ConstituencyTree tree;
  auto& nodes = tree.nodes_;

  auto fail = [&](const std::string& msg, size_t offset) -> FormatError {
    return FormatError(msg + " at char " + std::to_string(offset));
  };
  auto end_offset = [&]() { return line.size(); };

  // Parses "(" ... ")" starting at lex[pos]; returns the node id.
  std::function<int(int)> parse_node = [&](int parent) -> int {
    if (pos >= lex.size()) throw fail("unbalanced parentheses: unexpected end", end_offset());
    if (lex[pos].kind != Lexeme::kOpen) throw fail("expected '('", lex[pos].offset);
    size_t open_offset = lex[pos].offset;
    ++pos;
    int id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[id].parent = parent;
    if (pos < lex.size() && lex[pos].kind == Lexeme::kAtom) nodes[id].label = lex[pos++].text;
    if (pos >= lex.size()) throw fail("unbalanced parentheses: unexpected end", end_offset());
    if (lex[pos].kind == Lexeme::kAtom) {
      // Preterminal: (POS word)
      if (nodes[id].label.empty()) throw fail("leaf without a label", lex[pos].offset);
      nodes[id].word = lex[pos++].text;
      nodes[id].leaf = static_cast<int>(tree.leaf_nodes_.size());
      tree.leaf_nodes_.push_back(id);
    } else {
      while (pos < lex.size() && lex[pos].kind == Lexeme::kOpen) {
        int child = parse_node(id);
        nodes[id].children.push_back(child);
      }
      if (nodes[id].children.empty()) {
        size_t off = pos < lex.size() ? lex[pos].offset : open_offset;
        throw fail("constituent without children", off);
      }
    }
    if (pos >= lex.size())
      throw fail("unbalanced parentheses: missing ')' for '(' opened", open_offset);
    if (lex[pos].kind != Lexeme::kClose) throw fail("expected ')'", lex[pos].offset);
    ++pos;
    return id;
  };

  if (lex.empty()) throw FormatError("empty tree");
  parse_node(-1);
  if (pos != lex.size()) throw fail("unbalanced parentheses: trailing input", lex[pos].offset);

  // Unwrap "( (S ...) )".
  if (nodes[0].label.empty() && nodes[0].children.size() == 1 && nodes[0].leaf < 0) {
    ConstituencyTree unwrapped;
    std::function<void(int, int)> copy = [&](int id, int parent) {
      int nid = static_cast<int>(unwrapped.nodes_.size());
      unwrapped.nodes_.push_back(nodes[id]);
      auto& n = unwrapped.nodes_[nid];
      n.parent = parent;
      n.children.clear();
      if (n.leaf >= 0) unwrapped.leaf_nodes_.push_back(nid);
      for (int c : nodes[id].children) {
        int cid = static_cast<int>(unwrapped.nodes_.size());
        unwrapped.nodes_[nid].children.push_back(cid);
        copy(c, nid);
      }
    };
    copy(nodes[0].children[0], -1);
    return unwrapped;
  }
  if (nodes[0].label.empty()) throw FormatError("root constituent has no label");
  return tree;
}

std::string StripFunctionTags(const std::string& label) {
  size_t cut = label.find_first_of("-=", 1);
  if (label.empty() || label[0] == '-' || cut == std::string::npos) return label;
  return label.substr(0, cut);
}

void CheckTreeAlignment(const ConstituencyTree& tree, std::span<const std::string> surfaces) {
  auto leaves = tree.Leaves();
  if (leaves.size() != surfaces.size())
    throw AlignmentError("tree has " + std::to_string(leaves.size()) + " leaves, sentence has " +
                         std::to_string(surfaces.size()) + " tokens");
  for (size_t i = 0; i < leaves.size(); ++i) {
    const std::string& leaf = leaves[i].surface;
    if (leaf != surfaces[i] && Unescape(leaf) != surfaces[i] && leaf != Unescape(surfaces[i]))
      throw AlignmentError("tree leaf " + std::to_string(i) + " is '" + leaf + "', token is '" +
                           surfaces[i] + "'");
  }
}

std::vector<size_t> DependencyGraph::Dependents(size_t i) const {
  std::vector<size_t> out;
  for (size_t j = 0; j < head.size(); ++j)
    if (head[j] == i + 1) out.push_back(j);
  return out;
}

DependencyGraph ReadDependencyBlock(std::span<const std::string> lines,
                                    std::optional<size_t> expected_tokens) {
  DependencyGraph g;
  for (size_t r = 0; r < lines.size(); ++r) {
    std::istringstream ss(lines[r]);
    std::string idx, surface, head, rel, extra;
    if (!(ss >> idx >> surface >> head >> rel))
      throw FormatError("dependency row needs 'index surface head rel': '" + lines[r] + "'");
    size_t index = 0, h = 0;
    try {
      size_t used = 0;
      index = std::stoul(idx, &used);
      if (used != idx.size()) throw std::invalid_argument(idx);
      h = std::stoul(head, &used);
      if (used != head.size()) throw std::invalid_argument(head);
    } catch (const std::logic_error&) {
      throw FormatError("non-numeric index or head in dependency row: '" + lines[r] + "'");
    }
    if (index != r + 1)
      throw FormatError("dependency rows must be numbered 1..n, found " + idx + " at row " +
                        std::to_string(r + 1));
    g.head.push_back(h);
    g.rel.push_back(rel);
    g.surface.push_back(surface);
  }
  size_t n = g.size();
  if (n == 0) throw FormatError("empty dependency block");
  if (expected_tokens && *expected_tokens != n)
    throw AlignmentError("dependency block has " + std::to_string(n) + " rows, sentence has " +
                         std::to_string(*expected_tokens) + " tokens");
  size_t roots = 0;
  for (size_t i = 0; i < n; ++i) {
    if (g.head[i] > n)
      throw StructureError("head " + std::to_string(g.head[i]) + " of token " +
                           std::to_string(i + 1) + " is out of range");
    if (g.head[i] == i + 1)
      throw StructureError("token " + std::to_string(i + 1) + " is its own head");
    if (g.head[i] == 0) ++roots;
  }
  if (roots != 1)
    throw StructureError("dependency tree must have exactly one root, found " +
                         std::to_string(roots));
  for (size_t i = 0; i < n; ++i) {
    size_t cur = i + 1, steps = 0;
    while (cur != 0) {
      cur = g.head[cur - 1];
      if (++steps > n)
        throw StructureError("cycle through token " + std::to_string(i + 1));
    }
  }
  return g;
}

std::vector<ConstituencyTree> ReadTreesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trees file: " + path);
  std::vector<ConstituencyTree> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseBracketed(line));
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what(), line_no);
    }
  }
  return out;
}

std::vector<DependencyGraph> ReadDepsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open deps file: " + path);
  std::vector<DependencyGraph> out;
  std::vector<std::string> block;
  std::string line;
  size_t line_no = 0, block_start = 0;
  auto flush = [&]() {
    if (block.empty()) return;
    try {
      out.push_back(ReadDependencyBlock(block));
    } catch (const FormatError& e) {
      throw FormatError(path + ": block starting at line " + std::to_string(block_start) + ": " +
                        e.what());
    } catch (const StructureError& e) {
      throw StructureError(path + ": block starting at line " + std::to_string(block_start) +
                           ": " + e.what());
    }
    block.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    if (block.empty()) block_start = line_no;
    block.push_back(line);
  }
  flush();
  return out;
}

void WriteDependencyBlock(std::ostream& out, const DependencyGraph& graph) {
  for (size_t i = 0; i < graph.size(); ++i)
    out << (i + 1) << '\t' << graph.surface[i] << '\t' << graph.head[i] << '\t' << graph.rel[i]
        << '\n';
}

}  // namespace aesn
