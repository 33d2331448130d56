// Plain dense-matrix LSTM step, written directly against raw buffers with
// no tape or transform machinery. Serves as an independent oracle for the
// g=1, K=1 special case of the recurrent cell.
#pragma once

#include "pru/tensor.hpp"

namespace pru {

struct LSTMReferenceWeights {
  // One [M x N] input matrix, one [M x M] recurrent matrix, and one [M]
  // bias per gate, in the fixed order f, i, c, o.
  Tensor wx_f, wh_f, b_f;
  Tensor wx_i, wh_i, b_i;
  Tensor wx_c, wh_c, b_c;
  Tensor wx_o, wh_o, b_o;
};

struct LSTMRefState {
  Tensor h, c;  // [M]
};

LSTMRefState lstm_reference_step(const LSTMReferenceWeights& w, const Tensor& x,
                                 const LSTMRefState& prev);

}  // namespace pru
