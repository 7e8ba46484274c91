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

#include "aesn/encoder.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aesn/error.h"

namespace aesn {

using ad::Graph;
using ad::Var;

namespace {

constexpr double kEmbeddingStddev = 0.1;

Var Linear(Graph& g, Var x, Tensor& w, Tensor& b) {
  return ad::AddRow(ad::MatMulNT(x, g.Param(w)), g.Param(b));
}

Var MaybeDropout(Var x, double rate, Rng* rng) {
  return rng ? ad::Dropout(x, rate, *rng) : x;
}

}  // namespace

// ---- EmbeddingBank ----

void EmbeddingBank::AddTable(const std::string& name, Vocab vocab, size_t dim,
                             ParamRegistry& params, Rng& rng) {
  Tensor& m = params.Add("embed." + name, {vocab.size(), dim});
  InitNormal(m, kEmbeddingStddev, rng);
  tables_.push_back({name, std::move(vocab), &m});
}

void EmbeddingBank::AddEmptyTable(const std::string& name, Vocab vocab, size_t dim,
                                  bool trainable, ParamRegistry& params) {
  Tensor& m = params.Add("embed." + name, {vocab.size(), dim});
  m.set_trainable(trainable);
  tables_.push_back({name, std::move(vocab), &m});
}

StaticVectors ReadStaticVectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path);
  Vocab vocab;
  std::vector<std::vector<double>> rows;
  size_t dim = 0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (!ss.eof()) throw FormatError(path + ": non-numeric vector entry", line_no);
    if (line_no == 1 && vec.size() == 1) continue;  // "count dim" header
    if (dim == 0) dim = vec.size();
    if (dim == 0 || vec.size() != dim)
      throw FormatError(path + ": expected " + std::to_string(dim) + " values, found " +
                            std::to_string(vec.size()),
                        line_no);
    if (vocab.Contains(word)) continue;
    vocab.Add(word);
    rows.push_back(std::move(vec));
  }
  if (rows.empty()) throw FormatError(path + ": no vectors");
  StaticVectors out{std::move(vocab), Tensor(rows.size() + 1, dim)};
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < dim; ++c) out.table(r + 1, c) = rows[r][c];
  return out;
}

void EmbeddingBank::AddStaticTable(const std::string& name, const std::string& path,
                                   ParamRegistry& params) {
  StaticVectors vectors = ReadStaticVectors(path);
  AddEmptyTable(name, std::move(vectors.vocab), vectors.table.cols(), false, params);
  Tensor& m = *tables_.back().matrix;
  std::copy(vectors.table.data().begin(), vectors.table.data().end(), m.data().begin());
}

size_t EmbeddingBank::dim() const {
  size_t d = 0;
  for (const auto& t : tables_) d += t.matrix->cols();
  return d;
}

Var EmbeddingBank::Embed(Graph& g, std::span<const std::string> surfaces) const {
  if (tables_.empty()) throw ConfigError("embedding bank has no tables");
  std::vector<Var> parts;
  for (const auto& t : tables_) {
    std::vector<int> ids;
    ids.reserve(surfaces.size());
    for (const auto& s : surfaces) ids.push_back(t.vocab.Lookup(s));
    parts.push_back(ad::Lookup(g, *t.matrix, ids));
  }
  return parts.size() == 1 ? parts[0] : ad::ConcatCols(parts);
}

// ---- Encoder configuration ----

const char* EncoderKindName(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kBiLstm: return "bilstm";
    case EncoderKind::kTransformer: return "transformer";
    case EncoderKind::kAdapted: return "adapted";
  }
  return "?";
}

EncoderKind ParseEncoderKind(const std::string& name) {
  if (name == "bilstm") return EncoderKind::kBiLstm;
  if (name == "transformer") return EncoderKind::kTransformer;
  if (name == "adapted") return EncoderKind::kAdapted;
  throw ConfigError("unknown encoder '" + name + "' (expected bilstm, transformer or adapted)");
}

void ValidateEncoderConfig(const EncoderConfig& config) {
  if (config.layers < 1) throw ConfigError("encoder needs at least one layer");
  if (config.hidden < 1) throw ConfigError("encoder hidden size must be positive");
  if (config.dropout < 0.0 || config.dropout >= 1.0)
    throw ConfigError("dropout must be in [0, 1)");
  if (config.kind == EncoderKind::kBiLstm) return;
  if (config.heads < 1) throw ConfigError("attention encoders need at least one head");
  if (config.hidden % config.heads != 0) {
    std::string msg = "hidden size " + std::to_string(config.hidden) +
                      " is not divisible by " + std::to_string(config.heads) + " heads";
    if (config.hidden == 128 && config.heads == 12)
      msg += "; the commonly quoted 128-unit/12-head setting cannot split evenly into heads, "
             "use 8 heads (the default) instead";
    throw ConfigError(msg);
  }
}

AttentionStyle DefaultAttentionStyle(EncoderKind kind) {
  if (kind == EncoderKind::kAdapted) return {false, true, false};
  return {true, false, true};
}

std::vector<double> SinusoidEncoding(double pos, size_t dim) {
  std::vector<double> out(dim);
  for (size_t k = 0; k < dim; ++k) {
    size_t m = k / 2;
    double freq = std::pow(10000.0, -2.0 * static_cast<double>(m) / static_cast<double>(dim));
    out[k] = (k % 2 == 0) ? std::sin(pos * freq) : std::cos(pos * freq);
  }
  return out;
}

// ---- ContextEncoder ----

ContextEncoder::ContextEncoder(const EncoderConfig& config, size_t input_dim,
                               ParamRegistry& params, Rng& rng,
                               std::optional<AttentionStyle> style)
    : config_(config),
      style_(style.value_or(DefaultAttentionStyle(config.kind))),
      input_dim_(input_dim) {
  ValidateEncoderConfig(config);
  size_t d = static_cast<size_t>(config.hidden);
  auto matrix = [&](const std::string& name, size_t rows, size_t cols) {
    Tensor& t = params.Add(name, {rows, cols});
    InitGlorot(t, rng);
    return &t;
  };
  auto bias = [&](const std::string& name, size_t cols) { return &params.Add(name, {1, cols}); };
  auto ones = [&](const std::string& name, size_t cols) {
    Tensor* t = &params.Add(name, {1, cols});
    for (double& v : t->data()) v = 1.0;
    return t;
  };

  if (config.kind == EncoderKind::kBiLstm) {
    size_t in = input_dim;
    for (int l = 0; l < config.layers; ++l) {
      std::string p = "encoder.lstm" + std::to_string(l) + ".";
      LstmLayer layer;
      for (auto [dir, tag] : {std::pair{&layer.fwd, "fwd"}, std::pair{&layer.bwd, "bwd"}}) {
        std::string q = p + tag + ".";
        dir->wx = matrix(q + "wx", 4 * d, in);
        dir->wh = matrix(q + "wh", 4 * d, d);
        dir->b = bias(q + "b", 4 * d);
      }
      layer.proj_w = matrix(p + "proj.w", d, 2 * d);
      layer.proj_b = bias(p + "proj.b", d);
      lstm_.push_back(layer);
      in = d;
    }
    return;
  }

  in_w_ = matrix("encoder.input.w", d, input_dim);
  in_b_ = bias("encoder.input.b", d);
  for (int l = 0; l < config.layers; ++l) {
    std::string p = "encoder.layer" + std::to_string(l) + ".";
    AttentionLayer a;
    a.wq = matrix(p + "wq", d, d);
    a.bq = bias(p + "bq", d);
    a.wk = matrix(p + "wk", d, d);
    a.bk = bias(p + "bk", d);
    a.wv = matrix(p + "wv", d, d);
    a.bv = bias(p + "bv", d);
    a.wo = matrix(p + "wo", d, d);
    a.bo = bias(p + "bo", d);
    a.ln1_g = ones(p + "ln1.g", d);
    a.ln1_b = bias(p + "ln1.b", d);
    a.ff1_w = matrix(p + "ff1.w", 2 * d, d);
    a.ff1_b = bias(p + "ff1.b", 2 * d);
    a.ff2_w = matrix(p + "ff2.w", d, 2 * d);
    a.ff2_b = bias(p + "ff2.b", d);
    a.ln2_g = ones(p + "ln2.g", d);
    a.ln2_b = bias(p + "ln2.b", d);
    if (style_.relative_positions) {
      a.rel_u = bias(p + "rel.u", d);
      a.rel_v = bias(p + "rel.v", d);
    }
    attn_.push_back(a);
  }
}

Var ContextEncoder::Encode(Graph& g, Var embeddings, Rng* dropout_rng,
                           EncoderTrace* trace) const {
  if (embeddings.rows() == 0) throw ShapeError("encoder: empty sentence");
  if (embeddings.cols() != input_dim_)
    throw ShapeError("encoder: expected input width " + std::to_string(input_dim_) + ", got " +
                     embeddings.value().ShapeString());
  if (config_.kind == EncoderKind::kBiLstm) return EncodeLstm(g, embeddings, dropout_rng);
  return EncodeAttention(g, embeddings, dropout_rng, trace);
}

Var ContextEncoder::RunDirection(Graph& g, Var x, const LstmDirection& dir, bool reverse) const {
  size_t n = x.rows();
  size_t h = static_cast<size_t>(config_.hidden);
  Var xw = ad::AddRow(ad::MatMulNT(x, g.Param(*dir.wx)), g.Param(*dir.b));  // [n, 4h]
  Var wh = g.Param(*dir.wh);
  Var hidden = g.Constant(Tensor(1, h));
  Var cell = g.Constant(Tensor(1, h));
  std::vector<Var> outputs(n);
  for (size_t step = 0; step < n; ++step) {
    size_t t = reverse ? n - 1 - step : step;
    Var gates = ad::Add(ad::SliceRows(xw, t, 1), ad::MatMulNT(hidden, wh));
    Var in_gate = ad::Sigmoid(ad::SliceCols(gates, 0, h));
    Var forget = ad::Sigmoid(ad::SliceCols(gates, h, h));
    Var candidate = ad::Tanh(ad::SliceCols(gates, 2 * h, h));
    Var out_gate = ad::Sigmoid(ad::SliceCols(gates, 3 * h, h));
    cell = ad::Add(ad::Mul(forget, cell), ad::Mul(in_gate, candidate));
    hidden = ad::Mul(out_gate, ad::Tanh(cell));
    outputs[t] = hidden;
  }
  return ad::ConcatRows(outputs);
}

Var ContextEncoder::EncodeLstm(Graph& g, Var x, Rng* rng) const {
  for (const LstmLayer& layer : lstm_) {
    Var fwd = RunDirection(g, x, layer.fwd, false);
    Var bwd = RunDirection(g, x, layer.bwd, true);
    std::vector<Var> both = {fwd, bwd};
    Var cat = MaybeDropout(ad::ConcatCols(both), config_.dropout, rng);
    x = Linear(g, cat, *layer.proj_w, *layer.proj_b);
  }
  return x;
}

Var ContextEncoder::SelfAttention(Graph& g, Var x, const AttentionLayer& layer,
                                  EncoderTrace* trace) const {
  size_t n = x.rows();
  size_t d = static_cast<size_t>(config_.hidden);
  size_t heads = static_cast<size_t>(config_.heads);
  size_t dh = d / heads;
  Var q = Linear(g, x, *layer.wq, *layer.bq);
  Var k = Linear(g, x, *layer.wk, *layer.bk);
  Var v = Linear(g, x, *layer.wv, *layer.bv);

  std::optional<Var> rel, u, w;
  if (style_.relative_positions) {
    // Row r holds the encoding of signed offset r - (n - 1).
    Tensor table(2 * n - 1, dh);
    for (size_t r = 0; r < 2 * n - 1; ++r) {
      auto enc = SinusoidEncoding(static_cast<double>(r) - static_cast<double>(n - 1), dh);
      std::copy(enc.begin(), enc.end(), table.ptr() + r * dh);
    }
    rel = g.Constant(std::move(table));
    u = g.Param(*layer.rel_u);
    w = g.Param(*layer.rel_v);
  }

  std::vector<Var> outputs;
  outputs.reserve(heads);
  for (size_t h = 0; h < heads; ++h) {
    Var qh = ad::SliceCols(q, h * dh, dh);
    Var kh = ad::SliceCols(k, h * dh, dh);
    Var vh = ad::SliceCols(v, h * dh, dh);
    Var logits = ad::MatMulNT(qh, kh);  // [n, n]
    if (rel) {
      Var content_pos = ad::RelShift(ad::MatMulNT(qh, *rel), n);
      Var key_bias = ad::MatMulNT(ad::SliceCols(*u, h * dh, dh), kh);  // [1, n]
      Var pos_bias = ad::RelShift(ad::MatMulNT(ad::SliceCols(*w, h * dh, dh), *rel), n);
      logits = ad::AddRow(ad::Add(ad::Add(logits, content_pos), pos_bias), key_bias);
    }
    if (style_.scaled_logits) logits = ad::Scale(logits, 1.0 / std::sqrt(static_cast<double>(dh)));
    Var weights = ad::SoftmaxRows(logits);
    if (trace) {
      trace->logits.push_back(logits.value());
      trace->weights.push_back(weights.value());
    }
    outputs.push_back(ad::MatMul(weights, vh));
  }
  Var joined = heads == 1 ? outputs[0] : ad::ConcatCols(outputs);
  return Linear(g, joined, *layer.wo, *layer.bo);
}

Var ContextEncoder::EncodeAttention(Graph& g, Var x, Rng* rng, EncoderTrace* trace) const {
  size_t n = x.rows();
  size_t d = static_cast<size_t>(config_.hidden);
  x = Linear(g, x, *in_w_, *in_b_);
  if (style_.absolute_positions) {
    Tensor pe(n, d);
    for (size_t i = 0; i < n; ++i) {
      auto enc = SinusoidEncoding(static_cast<double>(i), d);
      std::copy(enc.begin(), enc.end(), pe.ptr() + i * d);
    }
    x = ad::Add(x, g.Constant(std::move(pe)));
  }
  for (const AttentionLayer& layer : attn_) {
    Var attended = MaybeDropout(SelfAttention(g, x, layer, trace), config_.dropout, rng);
    x = ad::LayerNorm(ad::Add(x, attended), g.Param(*layer.ln1_g), g.Param(*layer.ln1_b));
    Var ff = Linear(g, ad::Relu(Linear(g, x, *layer.ff1_w, *layer.ff1_b)), *layer.ff2_w,
                    *layer.ff2_b);
    ff = MaybeDropout(ff, config_.dropout, rng);
    x = ad::LayerNorm(ad::Add(x, ff), g.Param(*layer.ln2_g), g.Param(*layer.ln2_b));
  }
  return x;
}

}  // namespace aesn
