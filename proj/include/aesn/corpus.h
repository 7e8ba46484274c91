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

#ifndef AESN_CORPUS_H_
#define AESN_CORPUS_H_

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace aesn {

struct Token {
  std::string surface;
  std::string pos;  // empty when the corpus has no POS column
  size_t index = 0;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> labels;

  size_t size() const { return tokens.size(); }
  std::vector<std::string> Surfaces() const;
};

enum class LabelScheme { kBio, kBioes };

struct LabeledCorpus {
  std::vector<Sentence> sentences;
  // Labels in first-seen order.
  std::vector<std::string> label_set;
  LabelScheme scheme = LabelScheme::kBio;
};

// Column indices into whitespace-separated rows. pos_col < 0 means the file
// carries no POS column; label_col < 0 reads unlabeled text and fills every
// label with "O".
struct ColumnMap {
  int token_col = 0;
  int pos_col = 1;
  int label_col = 2;
};

// Reads blank-line separated CoNLL blocks. "-DOCSTART-" lines are skipped.
// The scheme is BIOES when any label uses an E- or S- prefix, BIO otherwise.
// Throws FormatError (with line number) on short rows or an empty input.
LabeledCorpus LoadConll(std::istream& in, const ColumnMap& columns);
LabeledCorpus LoadConllFile(const std::string& path, const ColumnMap& columns);

// Writes "token pos label" rows (pos omitted when empty) in CoNLL layout.
void WriteConll(std::ostream& out, const std::vector<Sentence>& sentences);

// Entity prefix and type of a label: "B-PER" -> ('B', "PER"), "O" -> ('O', "").
struct ParsedLabel {
  char tag = 'O';
  std::string type;
};
// Throws FormatError for anything other than O or [BIES]-TYPE.
ParsedLabel ParseLabel(const std::string& label);

struct BioesResult {
  std::vector<std::string> labels;
  // I-X tags that were promoted to B-X because they opened an entity.
  size_t repairs = 0;
};

// BIO -> BIOES. An I-X that does not continue a B-X/I-X is first promoted to
// B-X. Length and O positions are preserved.
BioesResult ToBioes(const std::vector<std::string>& bio);

// BIOES -> BIO (S-X -> B-X, E-X -> I-X).
std::vector<std::string> ToBio(const std::vector<std::string>& bioes);

struct EntitySpan {
  size_t start = 0;
  size_t end = 0;  // inclusive
  std::string etype;

  auto operator<=>(const EntitySpan&) const = default;
};

// Spans of well-formed S-X and B-X I-X* E-X segments, sorted by start. Any
// segment that is not closed by a matching E-X is dropped. Throws FormatError
// on an unknown label string.
std::vector<EntitySpan> DecodeSpans(const std::vector<std::string>& bioes);

// Spans of a BIO sequence read with conlleval chunk semantics: an entity starts
// at B-X or at an I-X whose predecessor is not of type X.
std::vector<EntitySpan> DecodeBioSpans(const std::vector<std::string>& bio);

}  // namespace aesn

#endif  // AESN_CORPUS_H_
