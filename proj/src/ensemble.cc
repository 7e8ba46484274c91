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

#include "aesn/ensemble.h"

#include <string>
#include <vector>

#include "aesn/error.h"

namespace aesn {

using ad::Var;

KvmnOutput KvmnForward(ad::Graph& g, Var h, const KvmnTables& tables,
                       std::span<const int> key_ids, std::span<const int> value_ids) {
  if (key_ids.empty()) throw Error("kvmn: memory must hold at least one entry");
  if (key_ids.size() != value_ids.size())
    throw ShapeError("kvmn: " + std::to_string(key_ids.size()) + " keys vs " +
                     std::to_string(value_ids.size()) + " values");
  if (h.rows() != 1 || tables.keys->cols() != h.cols() || tables.values->cols() != h.cols())
    throw ShapeError("kvmn: query " + h.value().ShapeString() + " vs key table " +
                     tables.keys->ShapeString() + " and value table " +
                     tables.values->ShapeString());
  Var keys = ad::Lookup(g, *tables.keys, key_ids);        // [m, d]
  Var values = ad::Lookup(g, *tables.values, value_ids);  // [m, d]
  Var p = ad::SoftmaxRows(ad::MatMulNT(h, keys));         // [1, m]
  return {ad::MatMul(p, values), p};
}

Var DirectConcat(std::span<const Var> summaries) { return ad::ConcatCols(summaries); }

SyntaxAttentionOutput SyntaxAttention(Var h, std::span<const Var> summaries,
                                      std::span<const SyntaxAttentionWeights> params) {
  if (summaries.empty()) throw Error("syntax attention needs at least one syntax type");
  if (summaries.size() != params.size())
    throw ShapeError("syntax attention: " + std::to_string(summaries.size()) + " summaries vs " +
                     std::to_string(params.size()) + " weight sets");
  std::vector<Var> scores;
  scores.reserve(summaries.size());
  for (size_t c = 0; c < summaries.size(); ++c) {
    Var joined[] = {h, summaries[c]};
    Var logit = ad::Add(ad::MatMulNT(ad::ConcatCols(joined), params[c].weight), params[c].bias);
    scores.push_back(ad::Sigmoid(logit));  // q^c, [1, 1]
  }
  Var a = ad::SoftmaxRows(ad::ConcatCols(scores));           // [1, |C|]
  Var stacked = ad::ConcatRows(summaries);                   // [|C|, d]
  return {ad::MatMul(a, stacked), a};
}

GateOutput GateFuse(Var h, Var s, const GateWeights& params) {
  if (h.rows() != s.rows() || h.cols() != s.cols())
    throw ShapeError("gate: context " + h.value().ShapeString() + " vs syntax " +
                     s.value().ShapeString());
  Var pre = ad::Add(ad::MatMulNT(h, params.w_context), ad::MatMulNT(s, params.w_syntax));
  Var r = ad::Sigmoid(ad::AddRow(pre, params.bias));
  Var kept = ad::Mul(r, h);
  Var admitted = ad::Mul(ad::Affine(r, -1.0, 1.0), s);
  Var parts[] = {kept, admitted};
  return {ad::ConcatCols(parts), r};
}

Var Project(Var o, Var w_out) { return ad::MatMulNT(o, w_out); }

}  // namespace aesn
