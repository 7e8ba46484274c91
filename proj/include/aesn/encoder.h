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

#ifndef AESN_ENCODER_H_
#define AESN_ENCODER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aesn/autodiff.h"
#include "aesn/tensor.h"
#include "aesn/vocab.h"

namespace aesn {

// ---- Word embeddings ----

struct EmbeddingTable {
  std::string name;
  Vocab vocab;
  Tensor* matrix = nullptr;  // [vocab.size(), dim], owned by the registry
};

// Pre-computed vectors read from "surface v1 ... vd" lines; the dimension
// comes from the first line and an optional "count dim" header is skipped.
// Row 0 (UNK) is zero.
struct StaticVectors {
  Vocab vocab;
  Tensor table;  // [vocab.size(), dim]
};
StaticVectors ReadStaticVectors(const std::string& path);

// The set of embedding tables whose lookups are concatenated per token.
class EmbeddingBank {
 public:
  // Trainable table initialized from N(0, 0.1). Registered as "embed.<name>".
  void AddTable(const std::string& name, Vocab vocab, size_t dim, ParamRegistry& params, Rng& rng);
  // Frozen table filled by ReadStaticVectors.
  void AddStaticTable(const std::string& name, const std::string& path, ParamRegistry& params);
  // Registers a table whose values will be restored later (checkpoint load).
  void AddEmptyTable(const std::string& name, Vocab vocab, size_t dim, bool trainable,
                     ParamRegistry& params);

  const std::vector<EmbeddingTable>& tables() const { return tables_; }
  // Total dimension, the sum over tables.
  size_t dim() const;

  // [n, dim()]: per token, the concatenation of every table's row in table
  // order. Unknown surfaces use each table's UNK row. Throws ConfigError when
  // the bank is empty.
  ad::Var Embed(ad::Graph& g, std::span<const std::string> surfaces) const;

 private:
  std::vector<EmbeddingTable> tables_;
};

// ---- Context encoders ----

enum class EncoderKind { kBiLstm, kTransformer, kAdapted };

const char* EncoderKindName(EncoderKind kind);  // "bilstm", "transformer", "adapted"
EncoderKind ParseEncoderKind(const std::string& name);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kAdapted;
  int layers = 2;
  int hidden = 128;
  int heads = 8;
  double dropout = 0.2;
};

// Throws ConfigError on layers < 1, hidden < 1, or (attention kinds) hidden not
// divisible by heads.
void ValidateEncoderConfig(const EncoderConfig& config);

// Attention logits for one head, over queries q and keys k of width dh:
//
//   logit[i][j] = q_i.k_j                  content-content
//               + q_i.r(i-j)               content-position   (relative)
//               + u.k_j + v.r(i-j)         learned biases     (relative)
//
// with r(.) a sinusoidal encoding of the signed distance, whose sine
// components flip sign with direction. The sum is scaled by 1/sqrt(dh) when
// `scaled_logits`. Absolute sinusoidal positions are added to the input when
// `absolute_positions`.
struct AttentionStyle {
  bool absolute_positions = true;
  bool relative_positions = false;
  bool scaled_logits = true;
};

// TRANSFORMER: absolute, scaled. ADAPTED: relative, unscaled.
AttentionStyle DefaultAttentionStyle(EncoderKind kind);

// Sinusoidal encoding of position (or signed offset) `pos` with `dim` entries:
// [sin(pos*w_0), cos(pos*w_0), sin(pos*w_1), ...], w_m = 10000^(-2m/dim).
std::vector<double> SinusoidEncoding(double pos, size_t dim);

// Optional per-forward record of attention internals, [layer * heads + head].
struct EncoderTrace {
  std::vector<Tensor> logits;
  std::vector<Tensor> weights;
};

class ContextEncoder {
 public:
  // Registers parameters under "encoder." in `params`. `style` overrides the
  // kind's default attention style.
  ContextEncoder(const EncoderConfig& config, size_t input_dim, ParamRegistry& params, Rng& rng,
                 std::optional<AttentionStyle> style = std::nullopt);

  const EncoderConfig& config() const { return config_; }
  const AttentionStyle& style() const { return style_; }
  size_t output_dim() const { return static_cast<size_t>(config_.hidden); }

  // E [n, input_dim] -> H [n, hidden]. `dropout_rng` null disables dropout.
  ad::Var Encode(ad::Graph& g, ad::Var embeddings, Rng* dropout_rng,
                 EncoderTrace* trace = nullptr) const;

 private:
  struct LstmDirection {
    Tensor* wx;  // [4h, in]
    Tensor* wh;  // [4h, h]
    Tensor* b;   // [1, 4h]
  };
  struct LstmLayer {
    LstmDirection fwd, bwd;
    Tensor* proj_w;  // [d, 2h]
    Tensor* proj_b;  // [1, d]
  };
  struct AttentionLayer {
    Tensor *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    Tensor *rel_u = nullptr, *rel_v = nullptr;  // [1, d], split per head
    Tensor *ln1_g, *ln1_b;
    Tensor *ff1_w, *ff1_b, *ff2_w, *ff2_b;
    Tensor *ln2_g, *ln2_b;
  };

  ad::Var EncodeLstm(ad::Graph& g, ad::Var x, Rng* rng) const;
  ad::Var RunDirection(ad::Graph& g, ad::Var x, const LstmDirection& dir, bool reverse) const;
  ad::Var EncodeAttention(ad::Graph& g, ad::Var x, Rng* rng, EncoderTrace* trace) const;
  ad::Var SelfAttention(ad::Graph& g, ad::Var x, const AttentionLayer& layer,
                        EncoderTrace* trace) const;

  EncoderConfig config_;
  AttentionStyle style_;
  size_t input_dim_;
  Tensor* in_w_ = nullptr;  // attention kinds: [d, input_dim]
  Tensor* in_b_ = nullptr;
  std::vector<LstmLayer> lstm_;
  std::vector<AttentionLayer> attn_;
};

}  // namespace aesn

#endif  // AESN_ENCODER_H_
