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

#ifndef AESN_MODEL_H_
#define AESN_MODEL_H_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aesn/autodiff.h"
#include "aesn/encoder.h"
#include "aesn/ensemble.h"
#include "aesn/synextract.h"
#include "aesn/tensor.h"
#include "aesn/vocab.h"

namespace aesn {

// How per-type syntax summaries reach the output layer.
enum class Fusion {
  kNone,             // no syntax: u = W_o h
  kDirectConcat,     // u = W_o (h ++ s^POS ++ s^CON ++ s^DEP)
  kSyntaxAttention,  // u = W_o (h ++ s), or W_o o with the gate
};

const char* FusionName(Fusion f);  // "none", "dc", "sa"
Fusion ParseFusion(const std::string& name);

struct ModelConfig {
  EncoderConfig encoder;
  size_t word_dim = 64;
  std::vector<SyntaxType> syntax = {SyntaxType::kPos, SyntaxType::kCon, SyntaxType::kDep};
  Fusion fusion = Fusion::kSyntaxAttention;
  bool gate = true;
  bool crf_mask = false;
  size_t pos_window = 1;
};

// Throws ConfigError unless: fusion none <=> no syntax types, and gate => SA.
void ValidateModelConfig(const ModelConfig& config);

struct ModelVocabs {
  Vocab words;
  std::vector<std::string> labels;  // BIOES label set, id = position
  std::array<std::optional<SyntaxVocab>, kNumSyntaxTypes> syntax;
  // Vocabulary of a frozen pre-computed embedding table, when one is used.
  std::optional<Vocab> static_words;
  size_t static_dim = 0;

  int LabelId(const std::string& label) const;  // -1 when absent
};

// A sentence mapped to model ids.
struct Instance {
  std::vector<std::string> surfaces;
  std::vector<int> gold;  // label ids; empty for unlabeled input
  SentenceMemory memory_strings;
  std::array<std::vector<MemoryIds>, kNumSyntaxTypes> memory;  // [type][token]
};

// Weights the model assigned while labeling one token.
struct TokenTrace {
  std::array<std::vector<double>, kNumSyntaxTypes> memory_weights;  // p per type
  std::vector<double> type_weights;                                 // a, active types
  double gate_norm = 0.0;                                           // ||r||_2
};

struct ForwardResult {
  ad::Var emissions;  // u_i rows, [n, T]
  std::vector<TokenTrace> trace;  // filled when requested
};

class NerModel {
 public:
  // Builds and randomly initializes every parameter from `seed`.
  // `static_table` provides the values of the frozen table described by
  // vocabs.static_words.
  NerModel(ModelConfig config, ModelVocabs vocabs, uint64_t seed,
           const Tensor* static_table = nullptr);

  NerModel(const NerModel&) = delete;
  NerModel& operator=(const NerModel&) = delete;

  const ModelConfig& config() const { return config_; }
  const ModelVocabs& vocabs() const { return vocabs_; }
  ParamRegistry& params() { return params_; }
  const ParamRegistry& params() const { return params_; }
  const ContextEncoder& encoder() const { return *encoder_; }
  size_t num_labels() const { return vocabs_.labels.size(); }

  // Extracts memories and maps strings to ids. Labels must already be BIOES;
  // an unknown label throws Error.
  Instance MakeInstance(const AnnotatedSentence& sentence, bool with_gold = true) const;

  // `dropout_rng` null runs in evaluation mode.
  ForwardResult Forward(ad::Graph& g, const Instance& inst, Rng* dropout_rng,
                        bool with_trace = false) const;
  ad::Var Loss(ad::Graph& g, const Instance& inst, Rng* dropout_rng) const;
  std::vector<int> Decode(const Instance& inst) const;

  // CRF transition scores with the optional scheme mask applied.
  ad::Var Transitions(ad::Graph& g) const;

 private:
  ModelConfig config_;
  ModelVocabs vocabs_;
  ParamRegistry params_;
  EmbeddingBank bank_;
  std::unique_ptr<ContextEncoder> encoder_;
  std::array<KvmnTables, kNumSyntaxTypes> kvmn_;
  std::array<Tensor*, kNumSyntaxTypes> sa_w_{};
  std::array<Tensor*, kNumSyntaxTypes> sa_b_{};
  Tensor* gate_wh_ = nullptr;
  Tensor* gate_ws_ = nullptr;
  Tensor* gate_b_ = nullptr;
  Tensor* out_w_ = nullptr;
  Tensor* crf_trans_ = nullptr;
  Tensor* crf_bias_ = nullptr;
  Tensor mask_;
};

}  // namespace aesn

#endif  // AESN_MODEL_H_
