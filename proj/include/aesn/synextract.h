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

// Turns each token into a memory of (context feature, syntactic information)
// pairs, one memory per syntax type:
//
//   POS  keys are the words in a +/-window around the token, values are
//        "word_TAG" with each word's own POS tag.
//   CON  keys are the words under the token's lowest whitelisted constituent,
//        values are "word_LABEL" with that constituent's label.
//   DEP  keys are the token, its dependents and its governor, values are
//        "word_REL" with each word's own in-bound relation.
//
// Keys and values are index-parallel and listed in sentence order.

#ifndef AESN_SYNEXTRACT_H_
#define AESN_SYNEXTRACT_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aesn/corpus.h"
#include "aesn/synparse.h"
#include "aesn/vocab.h"

namespace aesn {

enum class SyntaxType { kPos = 0, kCon = 1, kDep = 2 };
inline constexpr size_t kNumSyntaxTypes = 3;
inline constexpr std::array<SyntaxType, kNumSyntaxTypes> kAllSyntaxTypes = {
    SyntaxType::kPos, SyntaxType::kCon, SyntaxType::kDep};

const char* SyntaxTypeName(SyntaxType type);  // "POS", "CON", "DEP"
// Accepts "pos", "con", "dep" in any case. Throws ConfigError otherwise.
SyntaxType ParseSyntaxType(const std::string& name);
// Comma-separated list; result is in canonical POS, CON, DEP order.
std::vector<SyntaxType> ParseSyntaxTypes(const std::string& list);

// Accepted constituents for the CON memory.
bool IsWhitelistedConstituent(const std::string& label);

struct MemoryStrings {
  std::vector<std::string> keys;
  std::vector<std::string> values;
};

MemoryStrings ExtractPos(std::span<const std::string> surfaces,
                         std::span<const std::string> pos_tags, size_t i, size_t window = 1);
// Falls back to the root when no ancestor is whitelisted.
MemoryStrings ExtractConstituent(const ConstituencyTree& tree, size_t i);
MemoryStrings ExtractDependency(const DependencyGraph& graph, std::span<const std::string> surfaces,
                                size_t i);

// A corpus sentence with its aligned annotations.
struct AnnotatedSentence {
  Sentence sentence;
  std::optional<ConstituencyTree> tree;
  std::optional<DependencyGraph> deps;
  // Effective POS tags: the corpus column when present, else tree preterminals.
  std::vector<std::string> pos;
};

struct AttachStats {
  // Tokens where the corpus POS column and the tree preterminal disagree.
  size_t pos_conflicts = 0;
};

// Pairs sentence k with tree k and dependency block k. Empty `trees` / `deps`
// mean the annotation is absent. Count or token mismatches throw
// AlignmentError naming the sentence.
std::vector<AnnotatedSentence> AttachSyntax(const LabeledCorpus& corpus,
                                            std::vector<ConstituencyTree> trees,
                                            std::vector<DependencyGraph> deps,
                                            AttachStats* stats = nullptr);

// Per token memories for each requested type. Types whose annotation is
// missing throw AlignmentError.
struct SentenceMemory {
  // [type][token]
  std::array<std::vector<MemoryStrings>, kNumSyntaxTypes> per_type;
};

SentenceMemory ExtractMemory(const AnnotatedSentence& sentence,
                             const std::vector<SyntaxType>& types, size_t pos_window = 1);

struct SyntaxVocab {
  SyntaxType type = SyntaxType::kPos;
  Vocab keys;
  Vocab values;
};

// Entries seen at least `min_count` times get ids in first-seen order; the
// rest look up to UNK. Throws Error on an empty training split.
SyntaxVocab BuildSyntaxVocab(const std::vector<SentenceMemory>& train_memories, SyntaxType type,
                             size_t min_count = 1);

struct MemoryIds {
  std::vector<int> keys;
  std::vector<int> values;
};

MemoryIds LookupMemory(const SyntaxVocab& vocab, const MemoryStrings& memory);

// One line per (sentence, token, type):
// "sent\ttok\tTYPE\tkey1,key2,...\tval1,val2,...".
void WriteMemoryDump(std::ostream& out, size_t sentence_index, const SentenceMemory& memory,
                     const std::vector<SyntaxType>& types);

}  // namespace aesn

#endif  // AESN_SYNEXTRACT_H_
