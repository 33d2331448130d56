// Reverse-mode differentiation over a fixed primitive set: matmul,
// elementwise add/mul, sigmoid, tanh, concat, slice, sum, row gather,
// stride-2 subsampling, and fused log-softmax + NLL.
//
// A Tape records forward primitives; backward() replays them in exact
// reverse order and accumulates d(loss)/d(param) into each reachable
// Parameter. A Tape and its Parameters are a single-writer unit.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pru/tensor.hpp"

namespace pru {

// Trainable value. grad always has the same shape as value and is all-zero
// right after zero_grads().
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros_like(value)) {}

  std::size_t size() const { return value.size(); }
};

void zero_grads(std::span<Parameter* const> params);
void zero_grads(std::vector<Parameter*>& params);

// Handle to a node on a Tape. Only meaningful together with the tape that
// created it.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

class Tape {
 public:
  // Leaves.
  Var leaf(Tensor value);                 // constant input
  Var param(Parameter& p);                // trainable; shares the value buffer

  // Elementwise / structural primitives. All operate along the last
  // dimension where an axis matters; leading dimension is the batch.
  Var add(Var a, Var b);                  // same shape
  Var add_rowwise(Var x, Var bias);       // [B x M] + [M] (or [M] + [M])
  Var mul(Var a, Var b);                  // Hadamard
  Var scale(Var a, double s);
  Var matmul(Var x, Var w);               // x: [N] or [B x N], w: [M x N]
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var concat(std::span<const Var> parts); // along last dim
  Var slice(Var a, std::size_t offset, std::size_t len);  // along last dim
  Var sum(Var a);                         // -> scalar
  Var gather_rows(Var matrix, std::span<const int> ids);  // [V x D] -> [B x D]

  // Stride-2, width-3 window reductions with edge-replicate padding,
  // centered at even indices. Input length along the last dim must be even.
  Var kernel_subsample(Var x, Var kappa);  // weighted window sum, kappa: [3]
  Var max_subsample(Var x);                // window max; first max wins ties

  // Fused log-softmax + negative log-likelihood, summed over rows.
  // logits: [B x V] (or [V] with one target). Uses max-subtraction.
  Var nll(Var logits, std::span<const int> targets);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;     // valid after backward()

  // loss must be scalar. Accumulates into Parameter::grad for every
  // parameter recorded on this tape; leaves other parameters untouched.
  void backward(Var loss);

  void reset();                        // drop all nodes, keep capacity
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;   // empty for constant leaves
  };

  Var push(Tensor value, std::function<void(Tape&)> back);
  Node& node(Var v);
  const Node& cnode(Var v) const;
  Tensor& grad_buf(int idx);

  std::vector<Node> nodes_;
  bool grads_ready_ = false;
};

// Scalar activations shared with the reference LSTM oracle.
double sigmoid_scalar(double x);

}  // namespace pru
