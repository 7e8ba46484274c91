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

#include "aesn/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aesn/error.h"

namespace aesn::ad {

const Tensor& Var::value() const { return graph->value(id); }

double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw ShapeError("scalar(): tensor has shape " + v.ShapeString());
  return v[0];
}

Var Graph::Constant(Tensor value) { return AddNode(std::move(value), nullptr); }

Var Graph::Param(Tensor& p) {
  Tensor copy(p.shape());
  std::copy(p.data().begin(), p.data().end(), copy.data().begin());
  if (!p.tracked()) return AddNode(std::move(copy), nullptr);
  Tensor* target = &p;
  return AddNode(std::move(copy), [target](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto dst = target->grad();
    for (size_t i = 0; i < up.size(); ++i) dst[i] += up[i];
  });
}

Var Graph::AddNode(Tensor value, BackwardFn backward) {
  nodes_.push_back({std::move(value), {}, std::move(backward)});
  return Var{this, nodes_.size() - 1};
}

std::span<double> Graph::grad(size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Graph::Backward(Var loss) {
  if (loss.graph != this) throw Error("Backward: loss belongs to another graph");
  if (value(loss.id).size() != 1)
    throw ShapeError("Backward: loss must be scalar, got " + value(loss.id).ShapeString());
  grad(loss.id)[0] += 1.0;
  for (size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
}

namespace {

[[noreturn]] void Mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + a.ShapeString() + " vs " +
                   b.ShapeString());
}

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) Mismatch(op, a, b);
}

void RequireSameGraph(Var a, Var b) {
  if (a.graph != b.graph) throw Error("operands belong to different graphs");
}

// out[m,p] += a[m,k] * b[k,p]
void GemmNN(const double* a, const double* b, double* out, size_t m, size_t k, size_t p) {
  for (size_t i = 0; i < m; ++i) {
    double* orow = out + i * p;
    const double* arow = a + i * k;
    for (size_t t = 0; t < k; ++t) {
      double av = arow[t];
      if (av == 0.0) continue;
      const double* brow = b + t * p;
      for (size_t j = 0; j < p; ++j) orow[j] += av * brow[j];
    }
  }
}

// out[m,p] += a[m,k] * b[p,k]ᵀ
void GemmNT(const double* a, const double* b, double* out, size_t m, size_t k, size_t p) {
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (size_t j = 0; j < p; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (size_t t = 0; t < k; ++t) acc += arow[t] * brow[t];
      out[i * p + j] += acc;
    }
  }
}

// out[k,p] += a[m,k]ᵀ * b[m,p]
void GemmTN(const double* a, const double* b, double* out, size_t m, size_t k, size_t p) {
  for (size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * p;
    for (size_t t = 0; t < k; ++t) {
      double av = arow[t];
      if (av == 0.0) continue;
      double* orow = out + t * p;
      for (size_t j = 0; j < p; ++j) orow[j] += av * brow[j];
    }
  }
}

// Applies an elementwise map with derivative expressed through the output.
template <typename Fwd, typename Deriv>
Var Unary(Var a, Fwd fwd, Deriv deriv) {
  const Tensor& x = a.value();
  Tensor y(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  size_t in = a.id;
  return a.graph->AddNode(std::move(y), [in, deriv](Graph& g, size_t self) {
    const Tensor& x = g.value(in);
    const Tensor& y = g.value(self);
    auto up = g.grad(self);
    auto dx = g.grad(in);
    for (size_t i = 0; i < up.size(); ++i) dx[i] += up[i] * deriv(x[i], y[i]);
  });
}

}  // namespace

Var MatMul(Var a, Var b) {
  RequireSameGraph(a, b);
  const Tensor& x = a.value();
  const Tensor& w = b.value();
  if (x.cols() != w.rows()) Mismatch("matmul", x, w);
  size_t m = x.rows(), k = x.cols(), p = w.cols();
  Tensor y(m, p);
  GemmNN(x.ptr(), w.ptr(), y.ptr(), m, k, p);
  size_t ia = a.id, ib = b.id;
  return a.graph->AddNode(std::move(y), [ia, ib, m, k, p](Graph& g, size_t self) {
    const double* up = g.grad(self).data();
    // dA = up · Bᵀ ; dB = Aᵀ · up
    GemmNT(up, g.value(ib).ptr(), g.grad(ia).data(), m, p, k);
    GemmTN(g.value(ia).ptr(), up, g.grad(ib).data(), m, k, p);
  });
}

Var MatMulNT(Var a, Var b) {
  RequireSameGraph(a, b);
  const Tensor& x = a.value();
  const Tensor& w = b.value();
  if (x.cols() != w.cols()) Mismatch("matmul_nt", x, w);
  size_t m = x.rows(), k = x.cols(), p = w.rows();
  Tensor y(m, p);
  GemmNT(x.ptr(), w.ptr(), y.ptr(), m, k, p);
  size_t ia = a.id, ib = b.id;
  return a.graph->AddNode(std::move(y), [ia, ib, m, k, p](Graph& g, size_t self) {
    const double* up = g.grad(self).data();
    // dA = up · B ; dB = upᵀ · A
    GemmNN(up, g.value(ib).ptr(), g.grad(ia).data(), m, p, k);
    GemmTN(up, g.value(ia).ptr(), g.grad(ib).data(), m, p, k);
  });
}

Var Add(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("add", a.value(), b.value());
  Tensor y(a.rows(), a.cols());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] + b.value()[i];
  size_t ia = a.id, ib = b.id;
  return a.graph->AddNode(std::move(y), [ia, ib](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) da[i] += up[i];
    auto db = g.grad(ib);
    for (size_t i = 0; i < up.size(); ++i) db[i] += up[i];
  });
}

Var Sub(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("sub", a.value(), b.value());
  Tensor y(a.rows(), a.cols());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] - b.value()[i];
  size_t ia = a.id, ib = b.id;
  return a.graph->AddNode(std::move(y), [ia, ib](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) da[i] += up[i];
    auto db = g.grad(ib);
    for (size_t i = 0; i < up.size(); ++i) db[i] -= up[i];
  });
}

Var Mul(Var a, Var b) {
  RequireSameGraph(a, b);
  RequireSameShape("mul", a.value(), b.value());
  Tensor y(a.rows(), a.cols());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * b.value()[i];
  size_t ia = a.id, ib = b.id;
  return a.graph->AddNode(std::move(y), [ia, ib](Graph& g, size_t self) {
    auto up = g.grad(self);
    const Tensor& x = g.value(ia);
    const Tensor& z = g.value(ib);
    auto da = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) da[i] += up[i] * z[i];
    auto db = g.grad(ib);
    for (size_t i = 0; i < up.size(); ++i) db[i] += up[i] * x[i];
  });
}

Var Scale(Var a, double c) { return Affine(a, c, 0.0); }

Var Affine(Var a, double alpha, double beta) {
  Tensor y(a.rows(), a.cols());
  for (size_t i = 0; i < y.size(); ++i) y[i] = alpha * a.value()[i] + beta;
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, alpha](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) da[i] += alpha * up[i];
  });
}

Var AddRow(Var a, Var row) {
  RequireSameGraph(a, row);
  const Tensor& x = a.value();
  const Tensor& b = row.value();
  if (b.rows() != 1 || b.cols() != x.cols()) Mismatch("add_row", x, b);
  size_t r = x.rows(), c = x.cols();
  Tensor y(r, c);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) y[i * c + j] = x[i * c + j] + b[j];
  size_t ia = a.id, ib = row.id;
  return a.graph->AddNode(std::move(y), [ia, ib, r, c](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) da[i] += up[i];
    auto db = g.grad(ib);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j) db[j] += up[i * c + j];
  });
}

Var Sigmoid(Var a) {
  return Unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Tanh(Var a) {
  return Unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var Relu(Var a) {
  return Unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Var SoftmaxRows(Var a) {
  const Tensor& x = a.value();
  size_t r = x.rows(), c = x.cols();
  if (c == 0) throw ShapeError("softmax over empty row");
  Tensor y(r, c);
  for (size_t i = 0; i < r; ++i) {
    const double* xr = x.ptr() + i * c;
    double* yr = y.ptr() + i * c;
    double mx = *std::max_element(xr, xr + c);
    double z = 0.0;
    for (size_t j = 0; j < c; ++j) z += (yr[j] = std::exp(xr[j] - mx));
    for (size_t j = 0; j < c; ++j) yr[j] /= z;
  }
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, r, c](Graph& g, size_t self) {
    const Tensor& y = g.value(self);
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (size_t j = 0; j < c; ++j) dot += up[i * c + j] * y[i * c + j];
      for (size_t j = 0; j < c; ++j) da[i * c + j] += y[i * c + j] * (up[i * c + j] - dot);
    }
  });
}

Var LogSumExpRows(Var a) {
  const Tensor& x = a.value();
  size_t r = x.rows(), c = x.cols();
  if (c == 0) throw ShapeError("logsumexp over empty row");
  Tensor y(r, 1);
  for (size_t i = 0; i < r; ++i) {
    const double* xr = x.ptr() + i * c;
    double mx = *std::max_element(xr, xr + c);
    double z = 0.0;
    for (size_t j = 0; j < c; ++j) z += std::exp(xr[j] - mx);
    y[i] = mx + std::log(z);
  }
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, r, c](Graph& g, size_t self) {
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(self);
    auto up = g.grad(self);
    auto da = g.grad(ia);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j) da[i * c + j] += up[i] * std::exp(x[i * c + j] - y[i]);
  });
}

Var Sum(Var a) {
  Tensor y(1, 1);
  for (double v : a.value().data()) y[0] += v;
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia](Graph& g, size_t self) {
    double up = g.grad(self)[0];
    for (double& d : g.grad(ia)) d += up;
  });
}

Var ConcatCols(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("concat of zero tensors");
  size_t r = xs[0].rows();
  size_t c = 0;
  std::vector<size_t> ids, widths;
  for (Var v : xs) {
    RequireSameGraph(xs[0], v);
    if (v.rows() != r) Mismatch("concat_cols", xs[0].value(), v.value());
    ids.push_back(v.id);
    widths.push_back(v.cols());
    c += v.cols();
  }
  Tensor y(r, c);
  size_t off = 0;
  for (Var v : xs) {
    const Tensor& x = v.value();
    size_t w = x.cols();
    for (size_t i = 0; i < r; ++i)
      std::copy(x.ptr() + i * w, x.ptr() + (i + 1) * w, y.ptr() + i * c + off);
    off += w;
  }
  return xs[0].graph->AddNode(std::move(y), [ids, widths, r, c](Graph& g, size_t self) {
    auto up = g.grad(self);
    size_t off = 0;
    for (size_t k = 0; k < ids.size(); ++k) {
      size_t w = widths[k];
      auto d = g.grad(ids[k]);
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < w; ++j) d[i * w + j] += up[i * c + off + j];
      off += w;
    }
  });
}

Var ConcatRows(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("concat of zero tensors");
  size_t c = xs[0].cols();
  size_t r = 0;
  std::vector<size_t> ids;
  for (Var v : xs) {
    RequireSameGraph(xs[0], v);
    if (v.cols() != c) Mismatch("concat_rows", xs[0].value(), v.value());
    ids.push_back(v.id);
    r += v.rows();
  }
  Tensor y(r, c);
  size_t off = 0;
  for (Var v : xs) {
    const Tensor& x = v.value();
    std::copy(x.data().begin(), x.data().end(), y.ptr() + off);
    off += x.size();
  }
  return xs[0].graph->AddNode(std::move(y), [ids](Graph& g, size_t self) {
    auto up = g.grad(self);
    size_t off = 0;
    for (size_t id : ids) {
      auto d = g.grad(id);
      for (size_t i = 0; i < d.size(); ++i) d[i] += up[off + i];
      off += d.size();
    }
  });
}

Var SliceCols(Var a, size_t begin, size_t count) {
  const Tensor& x = a.value();
  size_t r = x.rows(), c = x.cols();
  if (begin + count > c)
    throw ShapeError("slice_cols: [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                     ") out of " + x.ShapeString());
  Tensor y(r, count);
  for (size_t i = 0; i < r; ++i)
    std::copy(x.ptr() + i * c + begin, x.ptr() + i * c + begin + count, y.ptr() + i * count);
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, r, c, begin, count](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto d = g.grad(ia);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < count; ++j) d[i * c + begin + j] += up[i * count + j];
  });
}

Var SliceRows(Var a, size_t begin, size_t count) {
  const Tensor& x = a.value();
  size_t c = x.cols();
  if (begin + count > x.rows())
    throw ShapeError("slice_rows: [" + std::to_string(begin) + "," + std::to_string(begin + count) +
                     ") out of " + x.ShapeString());
  Tensor y(count, c);
  std::copy(x.ptr() + begin * c, x.ptr() + (begin + count) * c, y.ptr());
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, begin, c](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto d = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) d[begin * c + i] += up[i];
  });
}

Var Dropout(Var a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw ConfigError("dropout rate must be < 1");
  const Tensor& x = a.value();
  std::bernoulli_distribution keep(1.0 - rate);
  double s = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = keep(rng) ? s : 0.0;
  Tensor y(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask[i];
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, mask = std::move(mask)](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto d = g.grad(ia);
    for (size_t i = 0; i < up.size(); ++i) d[i] += up[i] * mask[i];
  });
}

Var Lookup(Graph& g, Tensor& table, std::span<const int> ids) {
  size_t c = table.cols();
  size_t vocab = table.rows();
  Tensor y(ids.size(), c);
  std::vector<int> rows(ids.begin(), ids.end());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<size_t>(rows[i]) >= vocab)
      throw ShapeError("lookup: id " + std::to_string(rows[i]) + " outside table " +
                       table.ShapeString());
    std::copy(table.ptr() + rows[i] * c, table.ptr() + (rows[i] + 1) * c, y.ptr() + i * c);
  }
  if (!table.tracked()) return g.AddNode(std::move(y), nullptr);
  Tensor* target = &table;
  return g.AddNode(std::move(y), [target, rows = std::move(rows), c](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto dst = target->grad();
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < c; ++j) dst[rows[i] * c + j] += up[i * c + j];
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  RequireSameGraph(x, gain);
  RequireSameGraph(x, bias);
  const Tensor& in = x.value();
  size_t r = in.rows(), c = in.cols();
  if (gain.rows() != 1 || gain.cols() != c) Mismatch("layer_norm", in, gain.value());
  if (bias.rows() != 1 || bias.cols() != c) Mismatch("layer_norm", in, bias.value());
  Tensor y(r, c);
  // Normalized activations and inverse std are kept for the backward pass.
  std::vector<double> xhat(r * c), inv_std(r);
  const Tensor& gv = gain.value();
  const Tensor& bv = bias.value();
  for (size_t i = 0; i < r; ++i) {
    const double* row = in.ptr() + i * c;
    double mean = 0.0;
    for (size_t j = 0; j < c; ++j) mean += row[j];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (size_t j = 0; j < c; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (row[j] - mean) * inv_std[i];
      y[i * c + j] = xhat[i * c + j] * gv[j] + bv[j];
    }
  }
  size_t ix = x.id, ig = gain.id, ib = bias.id;
  return x.graph->AddNode(
      std::move(y), [ix, ig, ib, r, c, xhat = std::move(xhat),
                     inv_std = std::move(inv_std)](Graph& g, size_t self) {
        auto up = g.grad(self);
        const Tensor& gv = g.value(ig);
        auto dg = g.grad(ig);
        auto db = g.grad(ib);
        auto dx = g.grad(ix);
        double cn = static_cast<double>(c);
        for (size_t i = 0; i < r; ++i) {
          double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
          for (size_t j = 0; j < c; ++j) {
            size_t k = i * c + j;
            dg[j] += up[k] * xhat[k];
            db[j] += up[k];
            double dxh = up[k] * gv[j];
            sum_dxhat += dxh;
            sum_dxhat_xhat += dxh * xhat[k];
          }
          for (size_t j = 0; j < c; ++j) {
            size_t k = i * c + j;
            double dxh = up[k] * gv[j];
            dx[k] += inv_std[i] / cn * (cn * dxh - sum_dxhat - xhat[k] * sum_dxhat_xhat);
          }
        }
      });
}

Var RelShift(Var a, size_t n) {
  const Tensor& x = a.value();
  size_t width = 2 * n - 1;
  if (x.cols() != width || (x.rows() != 1 && x.rows() != n))
    throw ShapeError("rel_shift: expected [1 or " + std::to_string(n) + "," +
                     std::to_string(width) + "], got " + x.ShapeString());
  bool broadcast = x.rows() == 1;
  Tensor y(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      y[i * n + j] = x[(broadcast ? 0 : i) * width + (i + n - 1 - j)];
  size_t ia = a.id;
  return a.graph->AddNode(std::move(y), [ia, n, width, broadcast](Graph& g, size_t self) {
    auto up = g.grad(self);
    auto d = g.grad(ia);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) d[(broadcast ? 0 : i) * width + (i + n - 1 - j)] += up[i * n + j];
  });
}

double FiniteDiffCheck(const std::function<Var(Graph&)>& build,
                       std::span<Tensor* const> params, const GradCheckOptions& options) {
  for (Tensor* p : params) {
    if (!p->tracked()) p->EnableGrad();
    p->ZeroGrad();
  }
  {
    Graph g;
    Var loss = build(g);
    g.Backward(loss);
  }
  auto eval = [&build]() {
    Graph g;
    return build(g).scalar();
  };
  Rng rng(options.seed);
  double worst = 0.0;
  for (Tensor* p : params) {
    std::vector<size_t> coords(p->size());
    for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (options.max_coords_per_tensor && coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
    }
    for (size_t i : coords) {
      double saved = (*p)[i];
      (*p)[i] = saved + options.h;
      double up = eval();
      (*p)[i] = saved - options.h;
      double down = eval();
      (*p)[i] = saved;
      double numeric = (up - down) / (2.0 * options.h);
      double analytic = p->grad()[i];
      double rel = std::abs(analytic - numeric) /
                   std::max(options.denominator_floor, std::abs(analytic) + std::abs(numeric));
      worst = std::max(worst, rel);
    }
  }
  for (Tensor* p : params) p->ZeroGrad();
  return worst;
}

}  // namespace aesn::ad
