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

#include "aesn/dataset.h"

#include <filesystem>
#include <map>
#include <set>

#include "aesn/encoder.h"
#include "aesn/error.h"

namespace aesn {

namespace fs = std::filesystem;

SplitPaths ResolveSplitPaths(const std::string& conll, const std::string& trees_override,
                             const std::string& deps_override) {
  SplitPaths paths{conll, trees_override, deps_override};
  fs::path base(conll);
  if (paths.trees.empty()) {
    fs::path p = fs::path(base).replace_extension(".trees");
    if (fs::exists(p)) paths.trees = p.string();
  }
  if (paths.deps.empty()) {
    fs::path p = fs::path(base).replace_extension(".deps");
    if (fs::exists(p)) paths.deps = p.string();
  }
  return paths;
}

Split LoadSplit(const SplitPaths& paths, const ColumnMap& columns) {
  LabeledCorpus corpus = LoadConllFile(paths.conll, columns);
  Split split;
  split.source_scheme = corpus.scheme;
  if (corpus.scheme == LabelScheme::kBio) {
    for (Sentence& s : corpus.sentences) {
      BioesResult converted = ToBioes(s.labels);
      s.labels = std::move(converted.labels);
      split.repairs += converted.repairs;
    }
    corpus.scheme = LabelScheme::kBioes;
  }
  std::vector<ConstituencyTree> trees;
  std::vector<DependencyGraph> deps;
  if (!paths.trees.empty()) trees = ReadTreesFile(paths.trees);
  if (!paths.deps.empty()) deps = ReadDepsFile(paths.deps);
  try {
    split.sentences = AttachSyntax(corpus, std::move(trees), std::move(deps), &split.stats);
  } catch (const AlignmentError& e) {
    throw AlignmentError(paths.conll + ": " + e.what());
  }
  return split;
}

std::vector<std::string> CompleteLabelSet(const std::vector<const Split*>& splits) {
  std::vector<std::string> types;
  std::set<std::string> seen;
  for (const Split* split : splits)
    for (const auto& s : split->sentences)
      for (const auto& label : s.sentence.labels) {
        ParsedLabel parsed = ParseLabel(label);
        if (parsed.tag == 'O') continue;
        if (seen.insert(parsed.type).second) types.push_back(parsed.type);
      }
  std::vector<std::string> labels = {"O"};
  for (const auto& t : types)
    for (const char* prefix : {"B-", "I-", "E-", "S-"}) labels.push_back(prefix + t);
  return labels;
}

BuiltVocabs BuildVocabs(const TrainConfig& config, const Split& train, const Split* dev) {
  BuiltVocabs built;
  ModelVocabs& v = built.vocabs;

  std::map<std::string, size_t> counts;
  std::vector<std::string> order;
  for (const auto& s : train.sentences)
    for (const auto& tok : s.sentence.tokens)
      if (counts[tok.surface]++ == 0) order.push_back(tok.surface);
  for (const auto& w : order)
    if (counts[w] >= config.min_word_count) v.words.Add(w);

  std::vector<const Split*> label_sources = {&train};
  if (dev) label_sources.push_back(dev);
  v.labels = CompleteLabelSet(label_sources);

  if (!config.model.syntax.empty()) {
    std::vector<SentenceMemory> memories;
    memories.reserve(train.sentences.size());
    for (const auto& s : train.sentences)
      memories.push_back(ExtractMemory(s, config.model.syntax, config.model.pos_window));
    for (SyntaxType type : config.model.syntax)
      v.syntax[static_cast<size_t>(type)] =
          BuildSyntaxVocab(memories, type, config.syntax_min_count);
  }

  if (!config.static_vectors.empty()) {
    StaticVectors vectors = ReadStaticVectors(config.static_vectors);
    v.static_dim = vectors.table.cols();
    v.static_words = std::move(vectors.vocab);
    built.static_table = std::move(vectors.table);
  }
  return built;
}

}  // namespace aesn
