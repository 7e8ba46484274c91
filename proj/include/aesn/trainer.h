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

#ifndef AESN_TRAINER_H_
#define AESN_TRAINER_H_

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aesn/config.h"
#include "aesn/dataset.h"
#include "aesn/evaluate.h"
#include "aesn/model.h"

namespace aesn {

struct EpochRecord {
  size_t epoch = 0;   // 1-based
  double loss = 0.0;  // mean training NLL per sentence
  SpanScore dev;
};

struct TrainResult {
  std::unique_ptr<NerModel> model;  // parameters of the best dev epoch
  std::vector<EpochRecord> log;
  size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains from scratch. Initialization, shuffling and dropout draw from
// separate generators derived from config.seed, so a run is reproducible.
// Dev F1 selects the returned parameters; ties keep the earlier epoch.
TrainResult Train(const TrainConfig& config, const Split& train, const Split& dev,
                  const EpochCallback& on_epoch = nullptr);

// Rows "epoch loss dev_P dev_R dev_F1", tab-separated, with a header.
std::string FormatMetricsLog(const std::vector<EpochRecord>& log);

// Viterbi labels (BIOES strings) for every sentence.
std::vector<std::vector<std::string>> PredictLabels(const NerModel& model,
                                                    const std::vector<AnnotatedSentence>& data);

// Decodes and scores against the gold labels. Throws Error when the data uses
// a label the model cannot produce.
EvalReport Evaluate(const NerModel& model, const std::vector<AnnotatedSentence>& data);

// Writes "token [pos] label" rows with predicted labels in `scheme`.
void WritePredictions(std::ostream& out, const NerModel& model,
                      const std::vector<AnnotatedSentence>& data, LabelScheme scheme);

// One tab-separated row per token: sentence, token, surface, predicted
// label, the memory weights of each active type as key:weight lists, the
// syntax-type weights, and the L2 norm of the reset gate. Entries the model
// does not compute print as "-". `token` restricts the dump to one row.
void WriteInspection(std::ostream& out, const NerModel& model, const AnnotatedSentence& sentence,
                     size_t sentence_index, std::optional<size_t> token = std::nullopt);

}  // namespace aesn

#endif  // AESN_TRAINER_H_
