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

#include "aesn/evaluate.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

namespace {

double Round2(double x) { return std::round(x * 100.0) / 100.0; }

double Percent(size_t num, size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::string> AsBioes(const std::vector<std::string>& labels) {
  bool bioes = false;
  for (const auto& l : labels) {
    char t = ParseLabel(l).tag;
    if (t == 'E' || t == 'S') bioes = true;
  }
  return bioes ? labels : ToBioes(labels).labels;
}

}  // namespace

void FinalizeScore(SpanScore& s) {
  double p = Percent(s.correct, s.predicted);
  double r = Percent(s.correct, s.gold);
  s.precision = Round2(p);
  s.recall = Round2(r);
  s.f1 = p + r == 0.0 ? 0.0 : Round2(2.0 * p * r / (p + r));
}

EvalReport ScoreSequences(const std::vector<std::vector<std::string>>& gold,
                          const std::vector<std::vector<std::string>>& predicted) {
  if (gold.size() != predicted.size())
    throw Error("evaluation: " + std::to_string(gold.size()) + " gold sentences vs " +
                std::to_string(predicted.size()) + " predicted");
  EvalReport report;
  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw Error("evaluation: sentence " + std::to_string(s) + " length mismatch");
    for (size_t i = 0; i < gold[s].size(); ++i) {
      ++report.tokens;
      if (gold[s][i] == predicted[s][i]) ++report.tokens_correct;
    }
    std::vector<EntitySpan> g = DecodeSpans(gold[s]);
    std::vector<EntitySpan> p = DecodeSpans(predicted[s]);
    std::set<EntitySpan> gold_set(g.begin(), g.end());
    for (const auto& span : g) {
      ++report.micro.gold;
      ++report.per_type[span.etype].gold;
    }
    for (const auto& span : p) {
      ++report.micro.predicted;
      SpanScore& t = report.per_type[span.etype];
      ++t.predicted;
      if (gold_set.count(span)) {
        ++report.micro.correct;
        ++t.correct;
      }
    }
  }
  FinalizeScore(report.micro);
  for (auto& [type, score] : report.per_type) FinalizeScore(score);
  report.token_accuracy = Round2(Percent(report.tokens_correct, report.tokens));
  return report;
}

EvalReport ScoreConllPairs(std::istream& in) {
  std::vector<std::vector<std::string>> gold, pred;
  std::vector<std::string> g, p;
  auto flush = [&]() {
    if (g.empty()) return;
    gold.push_back(AsBioes(g));
    pred.push_back(AsBioes(p));
    g.clear();
    p.clear();
  };
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) fields.push_back(f);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields[0] == "-DOCSTART-") continue;
    if (fields.size() < 3) throw FormatError("expected token, gold and predicted columns", line_no);
    g.push_back(fields[fields.size() - 2]);
    p.push_back(fields.back());
  }
  flush();
  return ScoreSequences(gold, pred);
}

EvalReport ScoreConllPairsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open evaluation file: " + path);
  return ScoreConllPairs(in);
}

std::string FormatReport(const EvalReport& r) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "tokens: %zu; gold spans: %zu; predicted spans: %zu; correct: %zu\n"
                "accuracy: %6.2f%%; precision: %6.2f%%; recall: %6.2f%%; FB1: %6.2f\n",
                r.tokens, r.micro.gold, r.micro.predicted, r.micro.correct, r.token_accuracy,
                r.micro.precision, r.micro.recall, r.micro.f1);
  out << buf;
  for (const auto& [type, s] : r.per_type) {
    std::snprintf(buf, sizeof(buf),
                  "%17s: precision: %6.2f%%; recall: %6.2f%%; FB1: %6.2f  %zu\n", type.c_str(),
                  s.precision, s.recall, s.f1, s.predicted);
    out << buf;
  }
  return out.str();
}

}  // namespace aesn
