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

#include "aesn/model.h"

#include <cmath>

#include "aesn/crf.h"
#include "aesn/error.h"

namespace aesn {

using ad::Graph;
using ad::Var;

namespace {
constexpr double kTableStddev = 0.1;
}  // namespace

const char* FusionName(Fusion f) {
  switch (f) {
    case Fusion::kNone: return "none";
    case Fusion::kDirectConcat: return "dc";
    case Fusion::kSyntaxAttention: return "sa";
  }
  return "?";
}

Fusion ParseFusion(const std::string& name) {
  if (name == "none") return Fusion::kNone;
  if (name == "dc") return Fusion::kDirectConcat;
  if (name == "sa") return Fusion::kSyntaxAttention;
  throw ConfigError("unknown fusion '" + name + "' (expected none, dc or sa)");
}

void ValidateModelConfig(const ModelConfig& config) {
  ValidateEncoderConfig(config.encoder);
  if (config.word_dim < 1) throw ConfigError("word_dim must be positive");
  if (config.pos_window < 1) throw ConfigError("pos_window must be >= 1");
  if (config.fusion == Fusion::kNone) {
    if (!config.syntax.empty()) throw ConfigError("fusion=none takes no syntax types");
    if (config.gate) throw ConfigError("the gate requires fusion=sa");
  } else {
    if (config.syntax.empty()) throw ConfigError("fusion needs at least one syntax type");
    if (config.gate && config.fusion != Fusion::kSyntaxAttention)
      throw ConfigError("the gate requires fusion=sa");
  }
}

int ModelVocabs::LabelId(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

NerModel::NerModel(ModelConfig config, ModelVocabs vocabs, uint64_t seed,
                   const Tensor* static_table)
    : config_(std::move(config)), vocabs_(std::move(vocabs)) {
  ValidateModelConfig(config_);
  if (vocabs_.labels.empty()) throw ConfigError("model needs a non-empty label set");
  Rng rng(seed);
  size_t d = static_cast<size_t>(config_.encoder.hidden);
  size_t t = vocabs_.labels.size();

  bank_.AddTable("word", vocabs_.words, config_.word_dim, params_, rng);
  if (vocabs_.static_words) {
    bank_.AddEmptyTable("static", *vocabs_.static_words, vocabs_.static_dim, false, params_);
    if (static_table) {
      Tensor& dst = params_.Get("embed.static");
      if (static_table->size() != dst.size())
        throw ShapeError("static table " + static_table->ShapeString() + " vs " +
                         dst.ShapeString());
      std::copy(static_table->data().begin(), static_table->data().end(), dst.data().begin());
    }
  }
  encoder_ = std::make_unique<ContextEncoder>(config_.encoder, bank_.dim(), params_, rng);

  for (SyntaxType type : config_.syntax) {
    size_t c = static_cast<size_t>(type);
    if (!vocabs_.syntax[c])
      throw ConfigError(std::string("missing vocabulary for syntax type ") + SyntaxTypeName(type));
    std::string p = std::string("kvmn.") + SyntaxTypeName(type) + ".";
    kvmn_[c].keys = &params_.Add(p + "keys", {vocabs_.syntax[c]->keys.size(), d});
    InitNormal(*kvmn_[c].keys, kTableStddev, rng);
    kvmn_[c].values = &params_.Add(p + "values", {vocabs_.syntax[c]->values.size(), d});
    InitNormal(*kvmn_[c].values, kTableStddev, rng);
    if (config_.fusion == Fusion::kSyntaxAttention) {
      std::string q = std::string("sa.") + SyntaxTypeName(type) + ".";
      sa_w_[c] = &params_.Add(q + "w", {1, 2 * d});
      InitGlorot(*sa_w_[c], rng);
      sa_b_[c] = &params_.Add(q + "b", {1, 1});
    }
  }
  if (config_.gate) {
    gate_wh_ = &params_.Add("gate.w_context", {d, d});
    InitGlorot(*gate_wh_, rng);
    gate_ws_ = &params_.Add("gate.w_syntax", {d, d});
    InitGlorot(*gate_ws_, rng);
    gate_b_ = &params_.Add("gate.b", {1, d});
  }
  size_t fused = d;
  if (config_.fusion == Fusion::kDirectConcat) fused = d + config_.syntax.size() * d;
  if (config_.fusion == Fusion::kSyntaxAttention) fused = 2 * d;
  out_w_ = &params_.Add("output.w", {t, fused});
  InitGlorot(*out_w_, rng);
  crf_trans_ = &params_.Add("crf.transitions", {t + 2, t + 2});
  InitGlorot(*crf_trans_, rng);
  crf_bias_ = &params_.Add("crf.bias", {1, t});
  mask_ = config_.crf_mask ? crf::BioesTransitionMask(vocabs_.labels) : Tensor(t + 2, t + 2);
}

Instance NerModel::MakeInstance(const AnnotatedSentence& sentence, bool with_gold) const {
  Instance inst;
  inst.surfaces = sentence.sentence.Surfaces();
  if (with_gold) {
    for (const auto& label : sentence.sentence.labels) {
      int id = vocabs_.LabelId(label);
      if (id < 0) throw Error("label '" + label + "' is not in the model's label set");
      inst.gold.push_back(id);
    }
  }
  if (!config_.syntax.empty()) {
    inst.memory_strings = ExtractMemory(sentence, config_.syntax, config_.pos_window);
    for (SyntaxType type : config_.syntax) {
      size_t c = static_cast<size_t>(type);
      for (const auto& m : inst.memory_strings.per_type[c])
        inst.memory[c].push_back(LookupMemory(*vocabs_.syntax[c], m));
    }
  }
  return inst;
}

ForwardResult NerModel::Forward(Graph& g, const Instance& inst, Rng* dropout_rng,
                                bool with_trace) const {
  size_t n = inst.surfaces.size();
  if (n == 0) throw Error("cannot label an empty sentence");
  ForwardResult result;
  if (with_trace) result.trace.resize(n);

  Var e = bank_.Embed(g, inst.surfaces);
  if (dropout_rng) e = ad::Dropout(e, config_.encoder.dropout, *dropout_rng);
  Var h = encoder_->Encode(g, e, dropout_rng);

  Var fused = h;
  if (config_.fusion != Fusion::kNone) {
    std::vector<SyntaxAttentionWeights> sa;
    if (config_.fusion == Fusion::kSyntaxAttention)
      for (SyntaxType type : config_.syntax) {
        size_t c = static_cast<size_t>(type);
        sa.push_back({g.Param(*sa_w_[c]), g.Param(*sa_b_[c])});
      }
    std::vector<Var> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      Var hi = ad::SliceRows(h, i, 1);
      std::vector<Var> summaries;
      for (SyntaxType type : config_.syntax) {
        size_t c = static_cast<size_t>(type);
        const MemoryIds& mem = inst.memory[c].at(i);
        KvmnOutput out = KvmnForward(g, hi, kvmn_[c], mem.keys, mem.values);
        summaries.push_back(out.summary);
        if (with_trace) {
          const Tensor& p = out.weights.value();
          result.trace[i].memory_weights[c].assign(p.data().begin(), p.data().end());
        }
      }
      if (config_.fusion == Fusion::kDirectConcat) {
        rows.push_back(DirectConcat(summaries));
      } else {
        SyntaxAttentionOutput out = SyntaxAttention(hi, summaries, sa);
        rows.push_back(out.summary);
        if (with_trace) {
          const Tensor& a = out.weights.value();
          result.trace[i].type_weights.assign(a.data().begin(), a.data().end());
        }
      }
    }
    Var s = ad::ConcatRows(rows);
    if (config_.gate) {
      GateOutput gate =
          GateFuse(h, s, {g.Param(*gate_wh_), g.Param(*gate_ws_), g.Param(*gate_b_)});
      fused = gate.fused;
      if (with_trace) {
        const Tensor& r = gate.reset.value();
        for (size_t i = 0; i < n; ++i) {
          double sq = 0.0;
          for (size_t j = 0; j < r.cols(); ++j) sq += r(i, j) * r(i, j);
          result.trace[i].gate_norm = std::sqrt(sq);
        }
      }
    } else {
      Var parts[] = {h, s};
      fused = ad::ConcatCols(parts);
    }
  }
  result.emissions = Project(fused, g.Param(*out_w_));
  return result;
}

Var NerModel::Transitions(Graph& g) const {
  Var trans = g.Param(*crf_trans_);
  if (config_.crf_mask) trans = ad::Add(trans, g.Constant(mask_));
  return trans;
}

Var NerModel::Loss(Graph& g, const Instance& inst, Rng* dropout_rng) const {
  if (inst.gold.size() != inst.surfaces.size()) throw Error("instance has no gold labels");
  ForwardResult fwd = Forward(g, inst, dropout_rng);
  return crf::Nll(fwd.emissions, Transitions(g), g.Param(*crf_bias_), inst.gold);
}

std::vector<int> NerModel::Decode(const Instance& inst) const {
  Graph g;
  ForwardResult fwd = Forward(g, inst, nullptr);
  Tensor trans = *crf_trans_;
  for (size_t k = 0; k < trans.size(); ++k) trans[k] += mask_[k];
  return crf::Viterbi(fwd.emissions.value(), trans, *crf_bias_).labels;
}

}  // namespace aesn
