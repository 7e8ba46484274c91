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

#ifndef AESN_EVALUATE_H_
#define AESN_EVALUATE_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aesn/corpus.h"

namespace aesn {

// Span counts and the derived scores, in percent rounded to 2 decimals.
struct SpanScore {
  size_t gold = 0;
  size_t predicted = 0;
  size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  SpanScore micro;
  std::map<std::string, SpanScore> per_type;
  size_t tokens = 0;
  size_t tokens_correct = 0;
  double token_accuracy = 0.0;  // percent, 2 decimals
};

// Fills precision/recall/f1 from the counts; 0/0 scores as 0. F1 is computed
// from the unrounded precision and recall.
void FinalizeScore(SpanScore& score);

// Exact span-and-type matching over BIOES label sequences.
EvalReport ScoreSequences(const std::vector<std::vector<std::string>>& gold,
                          const std::vector<std::vector<std::string>>& predicted);

// Reads "token ... gold predicted" rows (last two columns), blank-line
// separated. BIO input is converted to BIOES first, so I- labels that open a
// chunk count as entity starts, as conlleval does.
EvalReport ScoreConllPairs(std::istream& in);
EvalReport ScoreConllPairsFile(const std::string& path);

// Human-readable summary: a micro line then one line per type.
std::string FormatReport(const EvalReport& report);

}  // namespace aesn

#endif  // AESN_EVALUATE_H_
