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

#include "aesn/synextract.h"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

const char* SyntaxTypeName(SyntaxType type) {
  switch (type) {
    case SyntaxType::kPos: return "POS";
    case SyntaxType::kCon: return "CON";
    case SyntaxType::kDep: return "DEP";
  }
  return "?";
}

SyntaxType ParseSyntaxType(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "pos") return SyntaxType::kPos;
  if (lower == "con") return SyntaxType::kCon;
  if (lower == "dep") return SyntaxType::kDep;
  throw ConfigError("unknown syntax type '" + name + "' (expected pos, con or dep)");
}

std::vector<SyntaxType> ParseSyntaxTypes(const std::string& list) {
  std::set<SyntaxType> picked;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    picked.insert(ParseSyntaxType(item));
  }
  return {picked.begin(), picked.end()};
}

bool IsWhitelistedConstituent(const std::string& label) {
  static const std::set<std::string> kAccepted = {"NP",   "VP",  "PP",   "ADVP",  "SBAR",
                                                  "ADJP", "PRT", "INTJ", "CONJP", "LST"};
  return kAccepted.count(StripFunctionTags(label)) > 0;
}

MemoryStrings ExtractPos(std::span<const std::string> surfaces,
                         std::span<const std::string> pos_tags, size_t i, size_t window) {
  size_t n = surfaces.size();
  if (i >= n) throw Error("ExtractPos: token index out of range");
  if (pos_tags.size() != n) throw AlignmentError("ExtractPos: POS tag count differs from tokens");
  if (window < 1) throw ConfigError("POS window must be >= 1");
  MemoryStrings m;
  size_t lo = i >= window ? i - window : 0;
  size_t hi = std::min(n - 1, i + window);
  for (size_t j = lo; j <= hi; ++j) {
    m.keys.push_back(surfaces[j]);
    m.values.push_back(surfaces[j] + "_" + pos_tags[j]);
  }
  return m;
}

MemoryStrings ExtractConstituent(const ConstituencyTree& tree, size_t i) {
  if (i >= tree.num_leaves()) throw Error("ExtractConstituent: token index out of range");
  const auto& nodes = tree.nodes();
  // Search starts above the preterminal: POS nodes are not constituents.
  int node = nodes[tree.leaf_node(i)].parent;
  while (node >= 0 && !IsWhitelistedConstituent(nodes[node].label)) node = nodes[node].parent;
  if (node < 0) node = tree.root();
  std::string label = StripFunctionTags(nodes[node].label);
  MemoryStrings m;
  for (size_t leaf : tree.Yield(node)) {
    const std::string& word = nodes[tree.leaf_node(leaf)].word;
    m.keys.push_back(word);
    m.values.push_back(word + "_" + label);
  }
  return m;
}

MemoryStrings ExtractDependency(const DependencyGraph& graph, std::span<const std::string> surfaces,
                                size_t i) {
  size_t n = graph.size();
  if (i >= n) throw Error("ExtractDependency: token index out of range");
  if (surfaces.size() != n) throw AlignmentError("ExtractDependency: token count mismatch");
  std::vector<size_t> context = graph.Dependents(i);
  context.push_back(i);
  if (graph.head[i] != 0) context.push_back(graph.head[i] - 1);
  std::sort(context.begin(), context.end());
  context.erase(std::unique(context.begin(), context.end()), context.end());
  MemoryStrings m;
  for (size_t j : context) {
    m.keys.push_back(surfaces[j]);
    m.values.push_back(surfaces[j] + "_" + graph.rel[j]);
  }
  return m;
}

std::vector<AnnotatedSentence> AttachSyntax(const LabeledCorpus& corpus,
                                            std::vector<ConstituencyTree> trees,
                                            std::vector<DependencyGraph> deps,
                                            AttachStats* stats) {
  size_t count = corpus.sentences.size();
  if (!trees.empty() && trees.size() != count)
    throw AlignmentError("trees file has " + std::to_string(trees.size()) +
                         " trees, corpus has " + std::to_string(count) + " sentences");
  if (!deps.empty() && deps.size() != count)
    throw AlignmentError("deps file has " + std::to_string(deps.size()) +
                         " blocks, corpus has " + std::to_string(count) + " sentences");
  std::vector<AnnotatedSentence> out;
  out.reserve(count);
  for (size_t k = 0; k < count; ++k) {
    AnnotatedSentence a;
    a.sentence = corpus.sentences[k];
    std::vector<std::string> surfaces = a.sentence.Surfaces();
    try {
      if (!trees.empty()) {
        CheckTreeAlignment(trees[k], surfaces);
        a.tree = std::move(trees[k]);
      }
      if (!deps.empty()) {
        if (deps[k].size() != surfaces.size())
          throw AlignmentError("dependency block has " + std::to_string(deps[k].size()) +
                               " rows, sentence has " + std::to_string(surfaces.size()) +
                               " tokens");
        for (size_t i = 0; i < surfaces.size(); ++i)
          if (deps[k].surface[i] != surfaces[i])
            throw AlignmentError("dependency row " + std::to_string(i + 1) + " is '" +
                                 deps[k].surface[i] + "', token is '" + surfaces[i] + "'");
        a.deps = std::move(deps[k]);
      }
    } catch (const AlignmentError& e) {
      throw AlignmentError("sentence " + std::to_string(k + 1) + ": " + e.what());
    }
    a.pos.resize(surfaces.size());
    std::vector<LeafInfo> leaves;
    if (a.tree) leaves = a.tree->Leaves();
    for (size_t i = 0; i < surfaces.size(); ++i) {
      const std::string& column = a.sentence.tokens[i].pos;
      if (!column.empty()) {
        a.pos[i] = column;
        if (a.tree && leaves[i].pos != column && stats) ++stats->pos_conflicts;
      } else if (a.tree) {
        a.pos[i] = leaves[i].pos;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

SentenceMemory ExtractMemory(const AnnotatedSentence& sentence,
                             const std::vector<SyntaxType>& types, size_t pos_window) {
  SentenceMemory mem;
  std::vector<std::string> surfaces = sentence.sentence.Surfaces();
  size_t n = surfaces.size();
  for (SyntaxType type : types) {
    auto& slot = mem.per_type[static_cast<size_t>(type)];
    slot.reserve(n);
    switch (type) {
      case SyntaxType::kPos:
        if (std::any_of(sentence.pos.begin(), sentence.pos.end(),
                        [](const std::string& t) { return t.empty(); }))
          throw AlignmentError("POS memory requested but no POS column or tree is available");
        for (size_t i = 0; i < n; ++i) slot.push_back(ExtractPos(surfaces, sentence.pos, i, pos_window));
        break;
      case SyntaxType::kCon:
        if (!sentence.tree) throw AlignmentError("CON memory requested but no tree is attached");
        for (size_t i = 0; i < n; ++i) slot.push_back(ExtractConstituent(*sentence.tree, i));
        break;
      case SyntaxType::kDep:
        if (!sentence.deps)
          throw AlignmentError("DEP memory requested but no dependency parse is attached");
        for (size_t i = 0; i < n; ++i) slot.push_back(ExtractDependency(*sentence.deps, surfaces, i));
        break;
    }
  }
  return mem;
}

SyntaxVocab BuildSyntaxVocab(const std::vector<SentenceMemory>& train_memories, SyntaxType type,
                             size_t min_count) {
  if (train_memories.empty()) throw Error("cannot build a syntax vocabulary from an empty split");
  size_t t = static_cast<size_t>(type);
  std::vector<std::string> key_order, value_order;
  std::map<std::string, size_t> key_freq, value_freq;
  for (const auto& mem : train_memories) {
    for (const auto& tok : mem.per_type[t]) {
      for (const auto& k : tok.keys)
        if (key_freq[k]++ == 0) key_order.push_back(k);
      for (const auto& v : tok.values)
        if (value_freq[v]++ == 0) value_order.push_back(v);
    }
  }
  SyntaxVocab vocab;
  vocab.type = type;
  for (const auto& k : key_order)
    if (key_freq[k] >= min_count) vocab.keys.Add(k);
  for (const auto& v : value_order)
    if (value_freq[v] >= min_count) vocab.values.Add(v);
  return vocab;
}

MemoryIds LookupMemory(const SyntaxVocab& vocab, const MemoryStrings& memory) {
  MemoryIds ids;
  ids.keys.reserve(memory.keys.size());
  ids.values.reserve(memory.values.size());
  for (const auto& k : memory.keys) ids.keys.push_back(vocab.keys.Lookup(k));
  for (const auto& v : memory.values) ids.values.push_back(vocab.values.Lookup(v));
  return ids;
}

void WriteMemoryDump(std::ostream& out, size_t sentence_index, const SentenceMemory& memory,
                     const std::vector<SyntaxType>& types) {
  auto join = [](const std::vector<std::string>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ",";
      s += xs[i];
    }
    return s;
  };
  size_t n = 0;
  for (SyntaxType t : types) n = std::max(n, memory.per_type[static_cast<size_t>(t)].size());
  for (size_t i = 0; i < n; ++i) {
    for (SyntaxType t : types) {
      const auto& m = memory.per_type[static_cast<size_t>(t)][i];
      out << sentence_index << '\t' << i << '\t' << SyntaxTypeName(t) << '\t' << join(m.keys)
          << '\t' << join(m.values) << '\n';
    }
  }
}

}  // namespace aesn
