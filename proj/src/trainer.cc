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

#include "aesn/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "aesn/error.h"
#include "aesn/optim.h"

namespace aesn {

namespace {

// Independent generator streams for one run.
Rng DeriveRng(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream)};
  return Rng(seq);
}

std::vector<Instance> MakeInstances(const NerModel& model,
                                    const std::vector<AnnotatedSentence>& data, bool with_gold) {
  std::vector<Instance> out;
  out.reserve(data.size());
  for (size_t s = 0; s < data.size(); ++s) {
    try {
      out.push_back(model.MakeInstance(data[s], with_gold));
    } catch (const Error& e) {
      throw Error("sentence " + std::to_string(s) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> LabelStrings(const NerModel& model, const std::vector<int>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(model.vocabs().labels.at(static_cast<size_t>(id)));
  return out;
}

EvalReport ScoreInstances(const NerModel& model, const std::vector<AnnotatedSentence>& data,
                          const std::vector<Instance>& instances) {
  std::vector<std::vector<std::string>> gold, pred;
  gold.reserve(data.size());
  pred.reserve(data.size());
  for (size_t s = 0; s < data.size(); ++s) {
    gold.push_back(data[s].sentence.labels);
    pred.push_back(LabelStrings(model, model.Decode(instances[s])));
  }
  return ScoreSequences(gold, pred);
}

void CheckLabels(const NerModel& model, const std::vector<AnnotatedSentence>& data) {
  for (const auto& s : data)
    for (const auto& label : s.sentence.labels)
      if (model.vocabs().LabelId(label) < 0)
        throw Error("label-set mismatch: '" + label + "' is not among the model's labels");
}

std::string FormatWeights(const std::vector<std::string>& names, const std::vector<double>& w) {
  std::string out;
  char buf[64];
  for (size_t k = 0; k < w.size(); ++k) {
    if (k) out += ',';
    std::snprintf(buf, sizeof(buf), ":%.6f", w[k]);
    out += names.at(k) + buf;
  }
  return out;
}

}  // namespace

TrainResult Train(const TrainConfig& config, const Split& train, const Split& dev,
                  const EpochCallback& on_epoch) {
  ValidateTrainConfig(config);
  if (train.sentences.empty()) throw ConfigError("training split is empty");
  if (dev.sentences.empty()) throw ConfigError("development split is empty");

  BuiltVocabs built = BuildVocabs(config, train, &dev);
  TrainResult result;
  result.model = std::make_unique<NerModel>(
      config.model, std::move(built.vocabs), DeriveRng(config.seed, 0)(),
      built.static_table ? &*built.static_table : nullptr);
  NerModel& model = *result.model;
  ParamRegistry& params = model.params();

  // Surfaces alignment and label problems before the first epoch.
  std::vector<Instance> train_inst = MakeInstances(model, train.sentences, true);
  std::vector<Instance> dev_inst = MakeInstances(model, dev.sentences, true);

  Rng shuffle_rng = DeriveRng(config.seed, 1);
  Rng dropout_rng = DeriveRng(config.seed, 2);
  Adam adam({config.learning_rate, config.beta1, config.beta2, config.epsilon});

  std::vector<size_t> order(train_inst.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<double>> best;
  double best_f1 = -1.0;
  size_t stale = 0;

  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(order.size(), start + config.batch_size);
      params.ZeroGrad();
      for (size_t k = start; k < end; ++k) {
        ad::Graph g;
        ad::Var loss = model.Loss(g, train_inst[order[k]], &dropout_rng);
        double value = loss.scalar();
        if (!std::isfinite(value))
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
        total += value;
        g.Backward(loss);
      }
      adam.Step(params, 1.0 / static_cast<double>(end - start));
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = total / static_cast<double>(order.size());
    record.dev = ScoreInstances(model, dev.sentences, dev_inst).micro;
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.dev.f1 > best_f1) {
      best_f1 = record.dev.f1;
      result.best_epoch = epoch;
      best.resize(params.size());
      for (size_t i = 0; i < params.size(); ++i)
        best[i].assign(params.at(i).data().begin(), params.at(i).data().end());
      stale = 0;
    } else if (config.patience > 0 && ++stale >= config.patience) {
      break;
    }
  }
  for (size_t i = 0; i < best.size(); ++i)
    std::copy(best[i].begin(), best[i].end(), params.at(i).data().begin());
  params.ZeroGrad();
  return result;
}

std::string FormatMetricsLog(const std::vector<EpochRecord>& log) {
  std::ostringstream out;
  out << "epoch\tloss\tdev_P\tdev_R\tdev_F1\n";
  char buf[128];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.2f\t%.2f\t%.2f\n", r.epoch, r.loss,
                  r.dev.precision, r.dev.recall, r.dev.f1);
    out << buf;
  }
  return out.str();
}

std::vector<std::vector<std::string>> PredictLabels(const NerModel& model,
                                                    const std::vector<AnnotatedSentence>& data) {
  std::vector<Instance> inst = MakeInstances(model, data, false);
  std::vector<std::vector<std::string>> out;
  out.reserve(inst.size());
  for (const auto& i : inst) out.push_back(LabelStrings(model, model.Decode(i)));
  return out;
}

EvalReport Evaluate(const NerModel& model, const std::vector<AnnotatedSentence>& data) {
  CheckLabels(model, data);
  std::vector<Instance> inst = MakeInstances(model, data, false);
  return ScoreInstances(model, data, inst);
}

void WritePredictions(std::ostream& out, const NerModel& model,
                      const std::vector<AnnotatedSentence>& data, LabelScheme scheme) {
  std::vector<std::vector<std::string>> labels = PredictLabels(model, data);
  std::vector<Sentence> sentences;
  sentences.reserve(data.size());
  for (size_t s = 0; s < data.size(); ++s) {
    Sentence sent = data[s].sentence;
    sent.labels = scheme == LabelScheme::kBio ? ToBio(labels[s]) : labels[s];
    sentences.push_back(std::move(sent));
  }
  WriteConll(out, sentences);
}

void WriteInspection(std::ostream& out, const NerModel& model, const AnnotatedSentence& sentence,
                     size_t sentence_index, std::optional<size_t> token) {
  Instance inst = model.MakeInstance(sentence, false);
  size_t n = inst.surfaces.size();
  if (token && *token >= n)
    throw Error("token index " + std::to_string(*token) + " out of range for a sentence of " +
                std::to_string(n) + " tokens");
  ad::Graph g;
  ForwardResult fwd = model.Forward(g, inst, nullptr, true);
  std::vector<std::string> labels = LabelStrings(model, model.Decode(inst));
  const ModelConfig& config = model.config();

  std::vector<std::string> type_names;
  for (SyntaxType t : config.syntax) type_names.push_back(SyntaxTypeName(t));

  out << "sent\ttok\tsurface\tlabel";
  for (const auto& t : type_names) out << '\t' << t;
  out << "\ttypes\tgate_norm\n";
  for (size_t i = 0; i < n; ++i) {
    if (token && i != *token) continue;
    const TokenTrace& trace = fwd.trace[i];
    out << sentence_index << '\t' << i << '\t' << inst.surfaces[i] << '\t' << labels[i];
    for (SyntaxType t : config.syntax) {
      size_t c = static_cast<size_t>(t);
      out << '\t' << FormatWeights(inst.memory_strings.per_type[c][i].keys, trace.memory_weights[c]);
    }
    out << '\t';
    if (config.fusion == Fusion::kSyntaxAttention)
      out << FormatWeights(type_names, trace.type_weights);
    else
      out << '-';
    out << '\t';
    if (config.gate) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", trace.gate_norm);
      out << buf;
    } else {
      out << '-';
    }
    out << '\n';
  }
}

}  // namespace aesn
