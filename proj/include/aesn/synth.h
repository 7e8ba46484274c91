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

#ifndef AESN_SYNTH_H_
#define AESN_SYNTH_H_

#include <cstdint>
#include <string>

namespace aesn {

// A toy corpus whose entity types are decided by a syntactic cue.
//
// Every sentence holds one or two units followed by a verb and a period. A
// unit has a run of names (the entity) between two cue words, one cue tied to
// the true type and one tied to a distractor type, in random order. Name
// words are shared by all types, so surface context alone is ambiguous. The
// clean parses put the true cue and the names inside one NP, with the
// distractor in an ADVP, and make the true cue the governor of the entity's
// head word.
//
// With probability `noise`, each of a sentence's POS tags, constituency tree
// and dependency tree is independently replaced by a random one.
struct SynthOptions {
  size_t train_sentences = 500;
  size_t dev_sentences = 100;
  size_t test_sentences = 100;
  size_t entity_types = 4;
  size_t name_vocab = 60;
  size_t filler_vocab = 20;
  size_t cues_per_type = 3;
  size_t verb_vocab = 8;
  double noise = 0.1;
  uint64_t seed = 7;
};

struct SynthSplit {
  std::string conll;  // "token POS label" rows, BIO labels
  std::string trees;  // one bracketed tree per line
  std::string deps;   // "index token head rel" blocks
};

struct SynthCorpus {
  SynthSplit train, dev, test;
};

// Entity type names: PER, LOC, ORG, MISC, then T4, T5, ...
std::string SynthTypeName(size_t type);

// Throws ConfigError on out-of-range options.
SynthCorpus GenerateSynth(const SynthOptions& options);

// Writes {train,dev,test}.{conll,trees,deps} into `dir`, creating it.
void WriteSynth(const SynthCorpus& corpus, const std::string& dir);

}  // namespace aesn

#endif  // AESN_SYNTH_H_
