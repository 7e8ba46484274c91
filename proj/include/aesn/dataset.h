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

#ifndef AESN_DATASET_H_
#define AESN_DATASET_H_

#include <optional>
#include <string>
#include <vector>

#include "aesn/config.h"
#include "aesn/corpus.h"
#include "aesn/model.h"
#include "aesn/synextract.h"

namespace aesn {

struct SplitPaths {
  std::string conll;
  std::string trees;  // empty: no constituency parses
  std::string deps;   // empty: no dependency parses
};

// For "dir/x.conll" returns dir/x.trees and dir/x.deps when those files
// exist. Explicit overrides win over the sibling files.
SplitPaths ResolveSplitPaths(const std::string& conll, const std::string& trees_override = "",
                             const std::string& deps_override = "");

struct Split {
  std::vector<AnnotatedSentence> sentences;  // labels in BIOES
  LabelScheme source_scheme = LabelScheme::kBio;
  // Orphan I- labels promoted to B- while converting to BIOES.
  size_t repairs = 0;
  AttachStats stats;
};

// Loads a CoNLL file plus its parses and converts labels to BIOES.
Split LoadSplit(const SplitPaths& paths, const ColumnMap& columns);

// Every label the model can emit: "O", then for each entity type (in
// first-seen order across `splits`) its B-, I-, E-, S- labels.
std::vector<std::string> CompleteLabelSet(const std::vector<const Split*>& splits);

struct BuiltVocabs {
  ModelVocabs vocabs;
  std::optional<Tensor> static_table;
};

// Word vocabulary from training surfaces seen at least `min_word_count`
// times, label set from train and dev, syntax vocabularies from training
// memories only.
BuiltVocabs BuildVocabs(const TrainConfig& config, const Split& train, const Split* dev);

}  // namespace aesn

#endif  // AESN_DATASET_H_
