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

#include "aesn/synth.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "aesn/error.h"
#include "aesn/tensor.h"

namespace aesn {

namespace {

const char* const kPosTags[] = {"NN", "DT", "NNP", "VBZ", ".", "JJ", "IN"};
const char* const kPhraseLabels[] = {"NP", "VP", "PP", "ADVP", "ADJP", "SBAR", "FRAG"};
const char* const kRelations[] = {"nsubj", "obj", "nmod", "compound", "det", "advmod", "punct"};

size_t Draw(Rng& rng, size_t n) { return static_cast<size_t>(rng() % n); }

bool Chance(Rng& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

template <typename T, size_t N>
const T& Pick(Rng& rng, const T (&items)[N]) {
  return items[Draw(rng, N)];
}

struct Word {
  std::string surface;
  std::string pos;
  std::string label;
  size_t head = 0;  // 1-based, 0 = root
  std::string rel;
};

// A labeled phrase spanning words [begin, end).
struct Phrase {
  std::string label;
  size_t begin, end;
};

class Generator {
 public:
  explicit Generator(const SynthOptions& o) : o_(o), rng_(o.seed) {}

  SynthSplit Split(size_t count) {
    std::ostringstream conll, trees, deps;
    for (size_t s = 0; s < count; ++s) {
      if (s) {
        conll << '\n';
        deps << '\n';
      }
      EmitSentence(conll, trees, deps);
    }
    return {conll.str(), trees.str(), deps.str()};
  }

 private:
  std::string Name(size_t i) const { return "Name" + std::to_string(i); }
  std::string Filler(size_t i) const { return "w" + std::to_string(i); }
  std::string Cue(size_t type, size_t i) const {
    return "cue" + std::to_string(type * o_.cues_per_type + i);
  }

  // Appends one unit; returns the phrases it adds below the sentence or VP.
  std::vector<Phrase> Unit(std::vector<Word>& words, size_t verb, bool subject) {
    size_t real = Draw(rng_, o_.entity_types);
    size_t distractor = (real + 1 + Draw(rng_, o_.entity_types - 1)) % o_.entity_types;
    size_t a = Draw(rng_, 3), b = Draw(rng_, 3), k = 1 + Draw(rng_, 3);
    bool real_first = Chance(rng_, 0.5);
    std::string type = SynthTypeName(real);

    auto add = [&](std::string surface, std::string pos) {
      words.push_back({std::move(surface), std::move(pos), "O", 0, ""});
      return words.size();  // 1-based id
    };
    auto fillers = [&](size_t count, std::vector<size_t>& ids) {
      for (size_t j = 0; j < count; ++j) ids.push_back(add(Filler(Draw(rng_, o_.filler_vocab)), "DT"));
    };
    std::vector<size_t> names, np_fill, adv_fill;
    size_t real_cue = 0, distractor_cue = 0;
    auto add_names = [&]() {
      for (size_t j = 0; j < k; ++j) {
        names.push_back(add(Name(Draw(rng_, o_.name_vocab)), "NNP"));
        words.back().label = (j == 0 ? "B-" : "I-") + type;
      }
    };

    std::vector<Phrase> phrases;
    size_t start = words.size();
    if (real_first) {
      real_cue = add(Cue(real, Draw(rng_, o_.cues_per_type)), "NN");
      fillers(a, np_fill);
      add_names();
      phrases.push_back({"NP", start, words.size()});
      size_t mid = words.size();
      fillers(b, adv_fill);
      distractor_cue = add(Cue(distractor, Draw(rng_, o_.cues_per_type)), "NN");
      phrases.push_back({"ADVP", mid, words.size()});
    } else {
      distractor_cue = add(Cue(distractor, Draw(rng_, o_.cues_per_type)), "NN");
      fillers(a, adv_fill);
      phrases.push_back({"ADVP", start, words.size()});
      size_t mid = words.size();
      add_names();
      fillers(b, np_fill);
      real_cue = add(Cue(real, Draw(rng_, o_.cues_per_type)), "NN");
      phrases.push_back({"NP", mid, words.size()});
    }
    size_t name_head = names.back();
    auto attach = [&](size_t id, size_t head, const char* rel) {
      words[id - 1].head = head;
      words[id - 1].rel = rel;
    };
    attach(real_cue, verb, subject ? "nsubj" : "obj");
    attach(name_head, real_cue, "nmod");
    for (size_t id : names)
      if (id != name_head) attach(id, name_head, "compound");
    for (size_t id : np_fill) attach(id, real_cue, "det");
    attach(distractor_cue, verb, "advmod");
    for (size_t id : adv_fill) attach(id, distractor_cue, "det");
    return phrases;
  }

  static std::string Leaf(const Word& w) { return "(" + w.pos + " " + w.surface + ")"; }

  static std::string Bracket(const std::vector<Word>& words, const Phrase& p) {
    std::string out = "(" + p.label;
    for (size_t i = p.begin; i < p.end; ++i) out += " " + Leaf(words[i]);
    return out + ")";
  }

  std::string RandomTree(const std::vector<Word>& words, size_t begin, size_t end, bool top) {
    if (end - begin == 1 && !top) return Leaf(words[begin]);
    std::string out = std::string("(") + (top ? "S" : Pick(rng_, kPhraseLabels));
    if (end - begin == 1) return out + " " + Leaf(words[begin]) + ")";
    size_t parts = std::min<size_t>(end - begin, 2 + Draw(rng_, 2));
    std::vector<size_t> cuts;
    while (cuts.size() < parts - 1) {
      size_t c = begin + 1 + Draw(rng_, end - begin - 1);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(end);
    size_t from = begin;
    for (size_t c : cuts) {
      out += " " + RandomTree(words, from, c, false);
      from = c;
    }
    return out + ")";
  }

  void RandomDeps(std::vector<Word>& words) {
    std::vector<size_t> order(words.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[Draw(rng_, i)]);
    words[order[0]].head = 0;
    words[order[0]].rel = "root";
    for (size_t j = 1; j < order.size(); ++j) {
      words[order[j]].head = order[Draw(rng_, j)] + 1;
      words[order[j]].rel = Pick(rng_, kRelations);
    }
  }

  void EmitSentence(std::ostream& conll, std::ostream& trees, std::ostream& deps) {
    std::vector<Word> words;
    bool two_units = Chance(rng_, 0.5);
    // The verb's id is known once the first unit is laid out, so attach
    // unit heads to a placeholder and patch afterwards.
    constexpr size_t kVerb = static_cast<size_t>(-1);
    std::vector<Phrase> first = Unit(words, kVerb, true);
    size_t verb = words.size() + 1;
    words.push_back({"v" + std::to_string(Draw(rng_, o_.verb_vocab)), "VBZ", "O", 0, "root"});
    std::vector<Phrase> second;
    if (two_units) second = Unit(words, kVerb, false);
    words.push_back({".", ".", "O", verb, "punct"});
    for (Word& w : words)
      if (w.head == kVerb) w.head = verb;

    if (Chance(rng_, o_.noise))
      for (Word& w : words) w.pos = Pick(rng_, kPosTags);

    std::string tree;
    if (Chance(rng_, o_.noise)) {
      tree = RandomTree(words, 0, words.size(), true);
    } else {
      tree = "(S";
      for (const Phrase& p : first) tree += " " + Bracket(words, p);
      tree += " (VP " + Leaf(words[verb - 1]);
      for (const Phrase& p : second) tree += " " + Bracket(words, p);
      tree += ") " + Leaf(words.back()) + ")";
    }
    trees << tree << '\n';

    if (Chance(rng_, o_.noise)) RandomDeps(words);

    for (size_t i = 0; i < words.size(); ++i) {
      const Word& w = words[i];
      conll << w.surface << ' ' << w.pos << ' ' << w.label << '\n';
      deps << (i + 1) << '\t' << w.surface << '\t' << w.head << '\t' << w.rel << '\n';
    }
  }

  SynthOptions o_;
  Rng rng_;
};

}  // namespace

std::string SynthTypeName(size_t type) {
  static const char* const kNames[] = {"PER", "LOC", "ORG", "MISC"};
  return type < 4 ? kNames[type] : "T" + std::to_string(type);
}

SynthCorpus GenerateSynth(const SynthOptions& options) {
  if (options.entity_types < 2) throw ConfigError("gen-synth needs at least 2 entity types");
  if (options.name_vocab < 1 || options.filler_vocab < 1 || options.cues_per_type < 1 ||
      options.verb_vocab < 1)
    throw ConfigError("gen-synth vocabulary sizes must be positive");
  if (options.noise < 0.0 || options.noise > 1.0)
    throw ConfigError("gen-synth noise must lie in [0, 1]");
  if (options.train_sentences == 0 || options.dev_sentences == 0 || options.test_sentences == 0)
    throw ConfigError("gen-synth split sizes must be positive");
  Generator gen(options);
  SynthCorpus corpus;
  corpus.train = gen.Split(options.train_sentences);
  corpus.dev = gen.Split(options.dev_sentences);
  corpus.test = gen.Split(options.test_sentences);
  return corpus;
}

void WriteSynth(const SynthCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
    out << text;
  };
  const std::pair<const char*, const SynthSplit*> splits[] = {
      {"train", &corpus.train}, {"dev", &corpus.dev}, {"test", &corpus.test}};
  for (const auto& [name, split] : splits) {
    write(std::string(name) + ".conll", split->conll);
    write(std::string(name) + ".trees", split->trees);
    write(std::string(name) + ".deps", split->deps);
  }
}

}  // namespace aesn
