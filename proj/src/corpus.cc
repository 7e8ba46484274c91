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

#include "aesn/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

std::vector<std::string> Sentence::Surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

namespace {

std::vector<std::string> SplitWhitespace(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

LabeledCorpus LoadConll(std::istream& in, const ColumnMap& columns) {
  int needed = std::max({columns.token_col, columns.pos_col, columns.label_col}) + 1;
  if (columns.token_col < 0) throw ConfigError("token column must be non-negative");
  bool labeled = columns.label_col >= 0;

  LabeledCorpus corpus;
  std::set<std::string> seen_labels;
  Sentence current;
  auto flush = [&]() {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = Sentence();
  };

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (IsBlank(line)) {
      flush();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) continue;
    auto fields = SplitWhitespace(line);
    if (static_cast<int>(fields.size()) < needed)
      throw FormatError("expected at least " + std::to_string(needed) + " columns, found " +
                            std::to_string(fields.size()),
                        line_no);
    Token tok;
    tok.surface = fields[columns.token_col];
    if (columns.pos_col >= 0) tok.pos = fields[columns.pos_col];
    tok.index = current.tokens.size();
    std::string label = labeled ? fields[columns.label_col] : "O";
    ParseLabel(label);  // validates
    if (seen_labels.insert(label).second) corpus.label_set.push_back(label);
    current.tokens.push_back(std::move(tok));
    current.labels.push_back(label);
  }
  flush();
  if (corpus.sentences.empty()) throw FormatError("corpus contains no sentences");

  bool bioes = std::any_of(corpus.label_set.begin(), corpus.label_set.end(),
                           [](const std::string& l) {
                             char t = ParseLabel(l).tag;
                             return t == 'E' || t == 'S';
                           });
  corpus.scheme = bioes ? LabelScheme::kBioes : LabelScheme::kBio;
  return corpus;
}

LabeledCorpus LoadConllFile(const std::string& path, const ColumnMap& columns) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  try {
    return LoadConll(in, columns);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteConll(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (size_t s = 0; s < sentences.size(); ++s) {
    if (s) out << '\n';
    const Sentence& sent = sentences[s];
    for (size_t i = 0; i < sent.size(); ++i) {
      out << sent.tokens[i].surface;
      if (!sent.tokens[i].pos.empty()) out << ' ' << sent.tokens[i].pos;
      out << ' ' << sent.labels[i] << '\n';
    }
  }
}

ParsedLabel ParseLabel(const std::string& label) {
  if (label == "O") return {'O', ""};
  if (label.size() >= 3 && label[1] == '-' &&
      (label[0] == 'B' || label[0] == 'I' || label[0] == 'E' || label[0] == 'S')) {
    return {label[0], label.substr(2)};
  }
  throw FormatError("unknown label: " + label);
}

BioesResult ToBioes(const std::vector<std::string>& bio) {
  size_t n = bio.size();
  std::vector<ParsedLabel> parsed;
  parsed.reserve(n);
  for (const auto& l : bio) {
    ParsedLabel p = ParseLabel(l);
    if (p.tag == 'E' || p.tag == 'S') throw FormatError("not a BIO label: " + l);
    parsed.push_back(std::move(p));
  }
  BioesResult result;
  for (size_t i = 0; i < n; ++i) {
    ParsedLabel& p = parsed[i];
    if (p.tag == 'I' && (i == 0 || parsed[i - 1].tag == 'O' || parsed[i - 1].type != p.type)) {
      p.tag = 'B';
      ++result.repairs;
    }
  }
  result.labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const ParsedLabel& p = parsed[i];
    if (p.tag == 'O') {
      result.labels[i] = "O";
      continue;
    }
    bool continues = i + 1 < n && parsed[i + 1].tag == 'I' && parsed[i + 1].type == p.type;
    char tag;
    if (p.tag == 'B') {
      tag = continues ? 'B' : 'S';
    } else {
      tag = continues ? 'I' : 'E';
    }
    result.labels[i] = std::string(1, tag) + "-" + p.type;
  }
  return result;
}

std::vector<std::string> ToBio(const std::vector<std::string>& bioes) {
  std::vector<std::string> out;
  out.reserve(bioes.size());
  for (const auto& l : bioes) {
    ParsedLabel p = ParseLabel(l);
    switch (p.tag) {
      case 'O': out.push_back("O"); break;
      case 'B':
      case 'S': out.push_back("B-" + p.type); break;
      default: out.push_back("I-" + p.type); break;
    }
  }
  return out;
}

std::vector<EntitySpan> DecodeSpans(const std::vector<std::string>& bioes) {
  std::vector<EntitySpan> spans;
  bool open = false;
  size_t start = 0;
  std::string type;
  for (size_t i = 0; i < bioes.size(); ++i) {
    ParsedLabel p = ParseLabel(bioes[i]);
    switch (p.tag) {
      case 'S':
        open = false;
        spans.push_back({i, i, p.type});
        break;
      case 'B':
        open = true;
        start = i;
        type = p.type;
        break;
      case 'I':
        if (open && p.type != type) open = false;
        break;
      case 'E':
        if (open && p.type == type) spans.push_back({start, i, type});
        open = false;
        break;
      default:
        open = false;
        break;
    }
  }
  return spans;
}

std::vector<EntitySpan> DecodeBioSpans(const std::vector<std::string>& bio) {
  std::vector<EntitySpan> spans;
  bool open = false;
  EntitySpan cur;
  for (size_t i = 0; i < bio.size(); ++i) {
    ParsedLabel p = ParseLabel(bio[i]);
    bool starts = p.tag == 'B' || (p.tag == 'I' && (!open || cur.etype != p.type));
    if (open && (p.tag != 'I' || starts)) {
      spans.push_back(cur);
      open = false;
    }
    if (p.tag == 'O') continue;
    if (p.tag == 'E' || p.tag == 'S') throw FormatError("not a BIO label: " + bio[i]);
    if (starts) {
      cur = {i, i, p.type};
      open = true;
    } else {
      cur.end = i;
    }
  }
  if (open) spans.push_back(cur);
  return spans;
}

}  // namespace aesn
