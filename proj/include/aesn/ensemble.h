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

// Attentive ensemble of syntactic information.
//
// For token i with context state h_i [1, d]:
//
//   memory (per syntax type c, entries j = 1..m_i)
//     p_ij = softmax_j(h_i . key_ij)         s^c_i = sum_j p_ij value_ij
//
//   syntax attention over the active types
//     q^c = sigmoid(w^c . (h_i ++ s^c_i) + b^c)
//     a   = softmax_c(q)                     s_i = sum_c a^c s^c_i
//
//   gate
//     r_i = sigmoid(W_h h_i + W_s s_i + b)   o_i = (r_i * h_i) ++ ((1 - r_i) * s_i)
//
//   output
//     u_i = W_o o_i
//
// Direct concatenation (s_i = s^POS ++ s^CON ++ s^DEP) is the unweighted
// alternative to syntax attention; it feeds h_i ++ s_i straight to W_o.

#ifndef AESN_ENSEMBLE_H_
#define AESN_ENSEMBLE_H_

#include <span>

#include "aesn/autodiff.h"
#include "aesn/tensor.h"

namespace aesn {

struct KvmnTables {
  Tensor* keys = nullptr;    // [key vocab, d]
  Tensor* values = nullptr;  // [value vocab, d]
};

struct KvmnOutput {
  ad::Var summary;  // s^c_i, [1, d]
  ad::Var weights;  // p^c_i, [1, m]
};

// Throws Error on an empty memory and ShapeError when keys/values disagree in
// length or the key width differs from h.
KvmnOutput KvmnForward(ad::Graph& g, ad::Var h, const KvmnTables& tables,
                       std::span<const int> key_ids, std::span<const int> value_ids);

// Concatenates per-type summaries in the order given.
ad::Var DirectConcat(std::span<const ad::Var> summaries);

struct SyntaxAttentionWeights {
  ad::Var weight;  // w^c, [1, 2d]
  ad::Var bias;    // b^c, [1, 1]
};

struct SyntaxAttentionOutput {
  ad::Var summary;  // s_i, [1, d]
  ad::Var weights;  // a_i, [1, |C|]
};

// One weights entry per summary, same order.
SyntaxAttentionOutput SyntaxAttention(ad::Var h, std::span<const ad::Var> summaries,
                                      std::span<const SyntaxAttentionWeights> params);

struct GateWeights {
  ad::Var w_context;  // W_h, [d, d]
  ad::Var w_syntax;   // W_s, [d, d]
  ad::Var bias;       // b, [1, d]
};

struct GateOutput {
  ad::Var fused;  // o, [n, 2d]
  ad::Var reset;  // r, [n, d]
};

// Row-wise over n tokens: h and s are both [n, d]. Throws ShapeError otherwise.
GateOutput GateFuse(ad::Var h, ad::Var s, const GateWeights& params);

// u = o · W_oᵀ with W_o [d_out, d_in]. No bias.
ad::Var Project(ad::Var o, ad::Var w_out);

}  // namespace aesn

#endif  // AESN_ENSEMBLE_H_
