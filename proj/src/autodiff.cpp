#include "pru/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace pru {

double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    double* g = p->grad.mut();
    std::fill(g, g + p->grad.size(), 0.0);
  }
}

void zero_grads(std::vector<Parameter*>& params) {
  zero_grads(std::span<Parameter* const>(params.data(), params.size()));
}

Var Tape::push(Tensor value, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back)});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) {
  if (!v.valid() || v.idx >= static_cast<int>(nodes_.size())) {
    throw ContractError("Var does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.idx)];
}

const Tape::Node& Tape::cnode(Var v) const {
  if (!v.valid() || v.idx >= static_cast<int>(nodes_.size())) {
    throw ContractError("Var does not belong to this tape");
  }
  return nodes_[static_cast<std::size_t>(v.idx)];
}

Tensor& Tape::grad_buf(int idx) { return nodes_[static_cast<std::size_t>(idx)].grad; }

const Tensor& Tape::value(Var v) const { return cnode(v).value; }

const Tensor& Tape::grad(Var v) const {
  if (!grads_ready_) throw ContractError("grad() called before backward()");
  return cnode(v).grad;
}

void Tape::reset() {
  nodes_.clear();
  grads_ready_ = false;
}

Var Tape::leaf(Tensor value) { return push(std::move(value), nullptr); }

Var Tape::param(Parameter& p) {
  Parameter* pp = &p;
  int self = static_cast<int>(nodes_.size());
  return push(p.value, [pp, self](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    double* acc = pp->grad.mut();
    const double* gs = g.data();
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] += gs[i];
  });
}

Var Tape::add(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) throw ShapeError("add: shape mismatch");
  Tensor out(ta.shape());
  double* o = out.mut();
  const double* pa = ta.data();
  const double* pb = tb.data();
  for (std::size_t i = 0; i < ta.size(); ++i) o[i] = pa[i] + pb[i];
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx, ib = b.idx;
  return push(std::move(out), [self, ia, ib](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    const double* gs = g.data();
    double* ga = t.grad_buf(ia).mut();
    double* gb = t.grad_buf(ib).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += gs[i];
      gb[i] += gs[i];
    }
  });
}

Var Tape::add_rowwise(Var x, Var bias) {
  const Tensor& tx = value(x);
  const Tensor& tb = value(bias);
  if (tb.rank() != 1 || tb.size() != tx.cols()) {
    throw ShapeError("add_rowwise: bias length must equal column count");
  }
  std::size_t rows = tx.rows(), cols = tx.cols();
  Tensor out(tx.shape());
  double* o = out.mut();
  const double* px = tx.data();
  const double* pb = tb.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) o[r * cols + c] = px[r * cols + c] + pb[c];
  }
  int self = static_cast<int>(nodes_.size());
  int ix = x.idx, ib = bias.idx;
  return push(std::move(out), [self, ix, ib, rows, cols](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    double* gx = t.grad_buf(ix).mut();
    double* gb = t.grad_buf(ib).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        gx[r * cols + c] += gs[r * cols + c];
        gb[c] += gs[r * cols + c];
      }
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) throw ShapeError("mul: shape mismatch");
  Tensor out(ta.shape());
  double* o = out.mut();
  const double* pa = ta.data();
  const double* pb = tb.data();
  for (std::size_t i = 0; i < ta.size(); ++i) o[i] = pa[i] * pb[i];
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx, ib = b.idx;
  return push(std::move(out), [self, ia, ib](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    const double* gs = g.data();
    const double* va = t.nodes_[ia].value.data();
    const double* vb = t.nodes_[ib].value.data();
    double* ga = t.grad_buf(ia).mut();
    double* gb = t.grad_buf(ib).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += gs[i] * vb[i];
      gb[i] += gs[i] * va[i];
    }
  });
}

Var Tape::scale(Var a, double s) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  double* o = out.mut();
  const double* pa = ta.data();
  for (std::size_t i = 0; i < ta.size(); ++i) o[i] = pa[i] * s;
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx;
  return push(std::move(out), [self, ia, s](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    const double* gs = g.data();
    double* ga = t.grad_buf(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += gs[i] * s;
  });
}

Var Tape::matmul(Var x, Var w) {
  const Tensor& tx = value(x);
  const Tensor& tw = value(w);
  if (tw.rank() != 2) throw ShapeError("matmul: weight must be rank 2");
  std::size_t m = tw.extent(0), n = tw.extent(1);
  if (tx.cols() != n) throw ShapeError("matmul: inner extents differ");
  std::size_t rows = tx.rows();
  Shape out_shape = tx.rank() == 1 ? Shape{m} : Shape{rows, m};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  const double* px = tx.data();
  const double* pw = tw.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      const double* wr = pw + j * n;
      const double* xr = px + r * n;
      for (std::size_t k = 0; k < n; ++k) acc += wr[k] * xr[k];
      o[r * m + j] = acc;
    }
  }
  int self = static_cast<int>(nodes_.size());
  int ix = x.idx, iw = w.idx;
  return push(std::move(out), [self, ix, iw, rows, m, n](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    const double* px = t.nodes_[ix].value.data();
    const double* pw = t.nodes_[iw].value.data();
    double* gx = t.grad_buf(ix).mut();
    double* gw = t.grad_buf(iw).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < m; ++j) {
        double gj = gs[r * m + j];
        if (gj == 0.0) continue;
        const double* wr = pw + j * n;
        const double* xr = px + r * n;
        double* gwr = gw + j * n;
        double* gxr = gx + r * n;
        for (std::size_t k = 0; k < n; ++k) {
          gxr[k] += gj * wr[k];
          gwr[k] += gj * xr[k];
        }
      }
    }
  });
}

Var Tape::sigmoid(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  double* o = out.mut();
  const double* pa = ta.data();
  for (std::size_t i = 0; i < ta.size(); ++i) o[i] = sigmoid_scalar(pa[i]);
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx;
  return push(std::move(out), [self, ia](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    const double* gs = g.data();
    const double* y = t.nodes_[self].value.data();
    double* ga = t.grad_buf(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += gs[i] * y[i] * (1.0 - y[i]);
  });
}

Var Tape::tanh(Var a) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  double* o = out.mut();
  const double* pa = ta.data();
  for (std::size_t i = 0; i < ta.size(); ++i) o[i] = std::tanh(pa[i]);
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx;
  return push(std::move(out), [self, ia](Tape& t) {
    const Tensor& g = t.grad_buf(self);
    const double* gs = g.data();
    const double* y = t.nodes_[self].value.data();
    double* ga = t.grad_buf(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += gs[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::concat(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  const Tensor& first = value(parts[0]);
  std::size_t rows = first.rows();
  std::size_t rank = first.rank();
  std::size_t total_cols = 0;
  for (Var p : parts) {
    const Tensor& tp = value(p);
    if (tp.rank() != rank || tp.rows() != rows) {
      throw ShapeError("concat: rank or leading extent mismatch");
    }
    total_cols += tp.cols();
  }
  Shape out_shape = rank == 1 ? Shape{total_cols} : Shape{rows, total_cols};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  std::size_t col_off = 0;
  std::vector<std::pair<int, std::size_t>> layout;  // (node, cols)
  layout.reserve(parts.size());
  for (Var p : parts) {
    const Tensor& tp = value(p);
    std::size_t c = tp.cols();
    const double* src = tp.data();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(src + r * c, src + (r + 1) * c, o + r * total_cols + col_off);
    }
    layout.emplace_back(p.idx, c);
    col_off += c;
  }
  int self = static_cast<int>(nodes_.size());
  return push(std::move(out), [self, rows, total_cols, layout](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    std::size_t off = 0;
    for (auto [idx, c] : layout) {
      double* gp = t.grad_buf(idx).mut();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < c; ++k) gp[r * c + k] += gs[r * total_cols + off + k];
      }
      off += c;
    }
  });
}

Var Tape::slice(Var a, std::size_t offset, std::size_t len) {
  const Tensor& ta = value(a);
  std::size_t rows = ta.rows(), cols = ta.cols();
  if (offset + len > cols) throw ShapeError("slice: range exceeds extent");
  Shape out_shape = ta.rank() == 1 ? Shape{len} : Shape{rows, len};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  const double* pa = ta.data();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(pa + r * cols + offset, pa + r * cols + offset + len, o + r * len);
  }
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx;
  return push(std::move(out), [self, ia, offset, len, rows, cols](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    double* ga = t.grad_buf(ia).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < len; ++k) ga[r * cols + offset + k] += gs[r * len + k];
    }
  });
}

Var Tape::sum(Var a) {
  const Tensor& ta = value(a);
  double acc = 0.0;
  const double* pa = ta.data();
  for (std::size_t i = 0; i < ta.size(); ++i) acc += pa[i];
  int self = static_cast<int>(nodes_.size());
  int ia = a.idx;
  return push(Tensor::scalar(acc), [self, ia](Tape& t) {
    double g = t.grad_buf(self)[0];
    Tensor& ga = t.grad_buf(ia);
    double* p = ga.mut();
    for (std::size_t i = 0; i < ga.size(); ++i) p[i] += g;
  });
}

Var Tape::gather_rows(Var matrix, std::span<const int> ids) {
  const Tensor& tm = value(matrix);
  if (tm.rank() != 2) throw ShapeError("gather_rows: matrix must be rank 2");
  std::size_t v = tm.extent(0), d = tm.extent(1);
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= v) {
      throw ContractError("gather_rows: row id out of range");
    }
  }
  std::size_t b = ids.size();
  Shape out_shape = b == 1 ? Shape{d} : Shape{b, d};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  const double* pm = tm.data();
  std::vector<int> idv(ids.begin(), ids.end());
  for (std::size_t r = 0; r < b; ++r) {
    std::copy(pm + static_cast<std::size_t>(idv[r]) * d,
              pm + (static_cast<std::size_t>(idv[r]) + 1) * d, o + r * d);
  }
  int self = static_cast<int>(nodes_.size());
  int im = matrix.idx;
  return push(std::move(out), [self, im, idv, d](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    double* gm = t.grad_buf(im).mut();
    for (std::size_t r = 0; r < idv.size(); ++r) {
      double* row = gm + static_cast<std::size_t>(idv[r]) * d;
      for (std::size_t k = 0; k < d; ++k) row[k] += gs[r * d + k];
    }
  });
}

namespace {
inline std::size_t clamp_index(long i, std::size_t n) {
  if (i < 0) return 0;
  if (i >= static_cast<long>(n)) return n - 1;
  return static_cast<std::size_t>(i);
}
}  // namespace

Var Tape::kernel_subsample(Var x, Var kappa) {
  const Tensor& tx = value(x);
  const Tensor& tk = value(kappa);
  if (tk.size() != 3) throw ShapeError("kernel_subsample: kappa must have 3 taps");
  std::size_t rows = tx.rows(), n = tx.cols();
  if (n < 2 || n % 2 != 0) throw ShapeError("kernel_subsample: length must be even");
  std::size_t half = n / 2;
  Shape out_shape = tx.rank() == 1 ? Shape{half} : Shape{rows, half};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  const double* px = tx.data();
  const double* pk = tk.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = px + r * n;
    for (std::size_t i = 0; i < half; ++i) {
      double acc = 0.0;
      for (int j = -1; j <= 1; ++j) {
        acc += pk[j + 1] * xr[clamp_index(static_cast<long>(2 * i) + j, n)];
      }
      o[r * half + i] = acc;
    }
  }
  int self = static_cast<int>(nodes_.size());
  int ix = x.idx, ik = kappa.idx;
  return push(std::move(out), [self, ix, ik, rows, n, half](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    const double* px = t.nodes_[ix].value.data();
    const double* pk = t.nodes_[ik].value.data();
    double* gx = t.grad_buf(ix).mut();
    double* gk = t.grad_buf(ik).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* xr = px + r * n;
      double* gxr = gx + r * n;
      for (std::size_t i = 0; i < half; ++i) {
        double g = gs[r * half + i];
        if (g == 0.0) continue;
        for (int j = -1; j <= 1; ++j) {
          std::size_t src = clamp_index(static_cast<long>(2 * i) + j, n);
          gxr[src] += g * pk[j + 1];
          gk[j + 1] += g * xr[src];
        }
      }
    }
  });
}

Var Tape::max_subsample(Var x) {
  const Tensor& tx = value(x);
  std::size_t rows = tx.rows(), n = tx.cols();
  if (n < 2 || n % 2 != 0) throw ShapeError("max_subsample: length must be even");
  std::size_t half = n / 2;
  Shape out_shape = tx.rank() == 1 ? Shape{half} : Shape{rows, half};
  Tensor out(std::move(out_shape));
  double* o = out.mut();
  const double* px = tx.data();
  std::vector<std::size_t> argmax(rows * half);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = px + r * n;
    for (std::size_t i = 0; i < half; ++i) {
      std::size_t best = clamp_index(static_cast<long>(2 * i) - 1, n);
      double bv = xr[best];
      for (int j = 0; j <= 1; ++j) {
        std::size_t idx = clamp_index(static_cast<long>(2 * i) + j, n);
        if (xr[idx] > bv) {  // strict: first maximal index wins ties
          bv = xr[idx];
          best = idx;
        }
      }
      o[r * half + i] = bv;
      argmax[r * half + i] = best;
    }
  }
  int self = static_cast<int>(nodes_.size());
  int ix = x.idx;
  return push(std::move(out), [self, ix, rows, n, half, argmax](Tape& t) {
    const double* gs = t.grad_buf(self).data();
    double* gx = t.grad_buf(ix).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < half; ++i) {
        gx[r * n + argmax[r * half + i]] += gs[r * half + i];
      }
    }
  });
}

Var Tape::nll(Var logits, std::span<const int> targets) {
  const Tensor& tl = value(logits);
  std::size_t rows = tl.rows(), v = tl.cols();
  if (targets.size() != rows) throw ShapeError("nll: one target per row required");
  for (int tgt : targets) {
    if (tgt < 0 || static_cast<std::size_t>(tgt) >= v) {
      throw ContractError("nll: target out of range");
    }
  }
  const double* pl = tl.data();
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* lr = pl + r * v;
    double mx = lr[0];
    for (std::size_t k = 1; k < v; ++k) mx = std::max(mx, lr[k]);
    double se = 0.0;
    for (std::size_t k = 0; k < v; ++k) se += std::exp(lr[k] - mx);
    double lse = mx + std::log(se);
    total += lse - lr[static_cast<std::size_t>(targets[r])];
  }
  int self = static_cast<int>(nodes_.size());
  int il = logits.idx;
  std::vector<int> tv(targets.begin(), targets.end());
  return push(Tensor::scalar(total), [self, il, tv, rows, v](Tape& t) {
    double g = t.grad_buf(self)[0];
    const double* pl = t.nodes_[il].value.data();
    double* gl = t.grad_buf(il).mut();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* lr = pl + r * v;
      double mx = lr[0];
      for (std::size_t k = 1; k < v; ++k) mx = std::max(mx, lr[k]);
      double se = 0.0;
      for (std::size_t k = 0; k < v; ++k) se += std::exp(lr[k] - mx);
      double* gr = gl + r * v;
      for (std::size_t k = 0; k < v; ++k) {
        gr[k] += g * std::exp(lr[k] - mx) / se;
      }
      gr[static_cast<std::size_t>(tv[r])] -= g;
    }
  });
}

void Tape::backward(Var loss) {
  const Tensor& lv = value(loss);
  if (lv.size() != 1) throw ContractError("backward: loss must be scalar");
  for (Node& nd : nodes_) nd.grad = Tensor::zeros_like(nd.value);
  grad_buf(loss.idx).mut()[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back(*this);
  }
  grads_ready_ = true;
}

}  // namespace pru
