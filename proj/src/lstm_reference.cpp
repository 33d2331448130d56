#include "pru/lstm_reference.hpp"

#include <cmath>

namespace pru {

namespace {

// pre[m] = sum_n wx[m,n] x[n]  +  sum_j wh[m,j] h[j]  +  b[m]
// Accumulation order matches the tape's matmul/add/bias sequence so the
// special-case comparison can demand exact equality.
Tensor gate_preactivation(const Tensor& wx, const Tensor& wh, const Tensor& b,
                          const Tensor& x, const Tensor& h) {
  std::size_t m = wx.extent(0), n = wx.extent(1);
  if (x.size() != n || h.size() != wh.extent(1) || wh.extent(0) != m || b.size() != m) {
    throw ShapeError("lstm_reference_step: weight/state extents disagree");
  }
  Tensor pre({m});
  double* out = pre.mut();
  const double* px = x.data();
  const double* ph = h.data();
  const double* pwx = wx.data();
  const double* pwh = wh.data();
  const double* pb = b.data();
  std::size_t hm = wh.extent(1);
  for (std::size_t r = 0; r < m; ++r) {
    double ax = 0.0;
    for (std::size_t k = 0; k < n; ++k) ax += pwx[r * n + k] * px[k];
    double ah = 0.0;
    for (std::size_t k = 0; k < hm; ++k) ah += pwh[r * hm + k] * ph[k];
    out[r] = (ax + ah) + pb[r];
  }
  return pre;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

LSTMRefState lstm_reference_step(const LSTMReferenceWeights& w, const Tensor& x,
                                 const LSTMRefState& prev) {
  Tensor pre_f = gate_preactivation(w.wx_f, w.wh_f, w.b_f, x, prev.h);
  Tensor pre_i = gate_preactivation(w.wx_i, w.wh_i, w.b_i, x, prev.h);
  Tensor pre_c = gate_preactivation(w.wx_c, w.wh_c, w.b_c, x, prev.h);
  Tensor pre_o = gate_preactivation(w.wx_o, w.wh_o, w.b_o, x, prev.h);

  std::size_t m = pre_f.size();
  Tensor c({m}), h({m});
  double* pc = c.mut();
  double* ph = h.mut();
  const double* pcprev = prev.c.data();
  for (std::size_t j = 0; j < m; ++j) {
    double f = sigmoid(pre_f[j]);
    double i = sigmoid(pre_i[j]);
    double chat = std::tanh(pre_c[j]);
    double o = sigmoid(pre_o[j]);
    pc[j] = f * pcprev[j] + i * chat;
    ph[j] = o * std::tanh(pc[j]);
  }
  return LSTMRefState{std::move(h), std::move(c)};
}

}  // namespace pru
