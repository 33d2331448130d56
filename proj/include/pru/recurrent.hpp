// The recurrent cell: pyramidal transform on the input, grouped linear
// transform on the context, combined under LSTM-style gating. With g=1 and
// K=1 (residual off) the cell reduces to a plain LSTM.
#pragma once

#include <string>
#include <vector>

#include "pru/dropout.hpp"
#include "pru/transforms.hpp"

namespace pru {

// Detached per-layer state carried across BPTT segments.
struct CellState {
  Tensor h, c;
};

struct CellStateVar {
  Var h, c;
};

class PRUCell {
 public:
  // One bias per gate, added once to the combined pre-activation; the
  // pyramidal and grouped halves carry no bias of their own. residual is
  // forced off when input_dim != hidden_dim.
  PRUCell(std::size_t input_dim, std::size_t hidden_dim, std::size_t levels,
          std::size_t groups, SubsampleMode mode, bool residual, Rng& rng,
          const std::string& name);

  CellStateVar step(Tape& tape, Var x, const CellStateVar& prev);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t levels() const { return levels_; }
  std::size_t groups() const { return groups_; }

  std::size_t weight_param_count() const;  // biases excluded
  void collect_params(std::vector<Parameter*>& out);

  CellState zero_state(std::size_t batch) const;

  struct Gate {
    PyramidalTransform input_tf;
    GroupedLinear context_tf;
    Parameter bias;
  };
  Gate& gate_f() { return gates_[0]; }
  Gate& gate_i() { return gates_[1]; }
  Gate& gate_c() { return gates_[2]; }
  Gate& gate_o() { return gates_[3]; }

 private:
  Var gate_preactivation(Tape& tape, Gate& gate, Var x, Var h);

  std::size_t input_dim_, hidden_dim_, levels_, groups_;
  std::vector<Gate> gates_;  // f, i, c, o
};

class StackedRNN {
 public:
  StackedRNN() = default;
  void add_layer(PRUCell cell);  // input dim must chain with previous layer

  std::size_t layer_count() const { return layers_.size(); }
  PRUCell& layer(std::size_t i) { return layers_[i]; }
  const PRUCell& layer(std::size_t i) const { return layers_[i]; }

  struct UnrollResult {
    std::vector<Var> outputs;              // top-layer h per step
    std::vector<CellState> final_states;   // detached copies, one per layer
  };

  // Time-major unrolling. Dropout is applied to each layer's output except
  // the last (nothing is dropped inside a cell); initial states enter as
  // constants so no gradient crosses a segment boundary.
  UnrollResult unroll(Tape& tape, std::span<const Var> inputs,
                      const std::vector<CellState>& init,
                      const DropoutSpec& inter_layer_dropout, Rng& rng);

  std::vector<CellState> zero_states(std::size_t batch) const;
  std::size_t weight_param_count() const;
  void collect_params(std::vector<Parameter*>& out);

 private:
  std::vector<PRUCell> layers_;
};

}  // namespace pru
