#include "pru/recurrent.hpp"

namespace pru {

PRUCell::PRUCell(std::size_t input_dim, std::size_t hidden_dim, std::size_t levels,
                 std::size_t groups, SubsampleMode mode, bool residual, Rng& rng,
                 const std::string& name)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), levels_(levels), groups_(groups) {
  static const char* kGateNames[4] = {"f", "i", "c", "o"};
  gates_.reserve(4);
  for (const char* g : kGateNames) {
    std::string base = name + "." + g;
    gates_.push_back(Gate{
        PyramidalTransform(input_dim, hidden_dim, levels, mode, residual,
                           /*with_bias=*/false, rng, base + ".pyr"),
        GroupedLinear(hidden_dim, hidden_dim, groups, /*with_bias=*/false, rng,
                      base + ".glt"),
        Parameter(base + ".bias", Tensor({hidden_dim}))});
  }
}

Var PRUCell::gate_preactivation(Tape& tape, Gate& gate, Var x, Var h) {
  Var from_input = gate.input_tf.forward(tape, x);
  Var from_context = gate.context_tf.forward(tape, h);
  return tape.add_rowwise(tape.add(from_input, from_context), tape.param(gate.bias));
}

CellStateVar PRUCell::step(Tape& tape, Var x, const CellStateVar& prev) {
  if (tape.value(x).cols() != input_dim_ || tape.value(prev.h).cols() != hidden_dim_) {
    throw ShapeError("pru step: input/state extents do not match the cell");
  }
  // Fixed f, i, c, o order keeps floating-point accumulation deterministic.
  Var f = tape.sigmoid(gate_preactivation(tape, gates_[0], x, prev.h));
  Var i = tape.sigmoid(gate_preactivation(tape, gates_[1], x, prev.h));
  Var chat = tape.tanh(gate_preactivation(tape, gates_[2], x, prev.h));
  Var o = tape.sigmoid(gate_preactivation(tape, gates_[3], x, prev.h));
  Var c = tape.add(tape.mul(f, prev.c), tape.mul(i, chat));
  Var h = tape.mul(o, tape.tanh(c));
  return CellStateVar{h, c};
}

std::size_t PRUCell::weight_param_count() const {
  std::size_t per_gate = pyramidal_weight_count(input_dim_, hidden_dim_, levels_) +
                         grouped_weight_count(hidden_dim_, hidden_dim_, groups_);
  return 4 * per_gate;
}

void PRUCell::collect_params(std::vector<Parameter*>& out) {
  for (Gate& g : gates_) {
    g.input_tf.collect_params(out);
    g.context_tf.collect_params(out);
    out.push_back(&g.bias);
  }
}

CellState PRUCell::zero_state(std::size_t batch) const {
  Shape s = batch <= 1 ? Shape{hidden_dim_} : Shape{batch, hidden_dim_};
  return CellState{Tensor(s), Tensor(s)};
}

void StackedRNN::add_layer(PRUCell cell) {
  if (!layers_.empty() && layers_.back().hidden_dim() != cell.input_dim()) {
    throw ConfigError("stacked layers: input dim must equal previous hidden dim");
  }
  layers_.push_back(std::move(cell));
}

StackedRNN::UnrollResult StackedRNN::unroll(Tape& tape, std::span<const Var> inputs,
                                            const std::vector<CellState>& init,
                                            const DropoutSpec& inter_layer_dropout,
                                            Rng& rng) {
  if (inputs.empty()) throw ContractError("unroll: empty input sequence");
  if (init.size() != layers_.size()) {
    throw ShapeError("unroll: one initial state per layer required");
  }
  std::vector<CellStateVar> states;
  states.reserve(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    states.push_back(CellStateVar{tape.leaf(init[l].h), tape.leaf(init[l].c)});
  }

  UnrollResult result;
  result.outputs.reserve(inputs.size());
  for (Var x : inputs) {
    Var signal = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      states[l] = layers_[l].step(tape, signal, states[l]);
      signal = states[l].h;
      if (l + 1 < layers_.size()) {
        signal = dropout_apply(tape, inter_layer_dropout, signal, rng);
      }
    }
    result.outputs.push_back(signal);
  }
  result.final_states.reserve(layers_.size());
  for (const CellStateVar& s : states) {
    result.final_states.push_back(CellState{tape.value(s.h), tape.value(s.c)});
  }
  return result;
}

std::vector<CellState> StackedRNN::zero_states(std::size_t batch) const {
  std::vector<CellState> states;
  states.reserve(layers_.size());
  for (const PRUCell& cell : layers_) states.push_back(cell.zero_state(batch));
  return states;
}

std::size_t StackedRNN::weight_param_count() const {
  std::size_t total = 0;
  for (const PRUCell& cell : layers_) total += cell.weight_param_count();
  return total;
}

void StackedRNN::collect_params(std::vector<Parameter*>& out) {
  for (PRUCell& cell : layers_) cell.collect_params(out);
}

}  // namespace pru
