#include "pru/language_model.hpp"

#include <cmath>

namespace pru {

void LMConfig::validate() const {
  if (vocab == 0) throw ConfigError("vocab size must be positive");
  if (layers == 0) throw ConfigError("at least one layer required");
  if (embed_dim == 0 || hidden_dim == 0) throw ConfigError("dims must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  for (std::size_t l = 0; l < layers; ++l) {
    pyramidal_weight_count(layer_input(l), layer_hidden(l), levels);
    grouped_weight_count(layer_hidden(l), layer_hidden(l), groups);
  }
}

double perplexity(double mean_nll) {
  if (mean_nll < 0.0) throw ContractError("perplexity: mean NLL must be >= 0");
  return std::exp(mean_nll);
}

LanguageModel::LanguageModel(LMConfig cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  double bound = 0.1;  // small uniform range, standard for embeddings
  embedding_ = Parameter("embedding", rng.uniform_tensor({cfg_.vocab, cfg_.embed_dim},
                                                         -bound, bound));
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    rnn_.add_layer(PRUCell(cfg_.layer_input(l), cfg_.layer_hidden(l), cfg_.levels,
                           cfg_.groups, cfg_.mode, cfg_.residual, rng,
                           "layer" + std::to_string(l)));
  }
  std::size_t top = cfg_.top_dim();
  if (cfg_.tie_weights) {
    if (top != cfg_.embed_dim) {
      double pb = 1.0 / std::sqrt(static_cast<double>(top));
      proj_ = Parameter("decoder.proj",
                        rng.uniform_tensor({cfg_.embed_dim, top}, -pb, pb));
    }
  } else {
    double db = 1.0 / std::sqrt(static_cast<double>(top));
    dec_w_ = Parameter("decoder.w", rng.uniform_tensor({cfg_.vocab, top}, -db, db));
  }
  dec_b_ = Parameter("decoder.b", Tensor({cfg_.vocab}));
}

std::vector<Parameter*> LanguageModel::parameters() {
  std::vector<Parameter*> out;
  out.push_back(&embedding_);
  rnn_.collect_params(out);
  if (proj_) out.push_back(&*proj_);
  if (dec_w_) out.push_back(&*dec_w_);
  out.push_back(&dec_b_);
  return out;
}

std::size_t LanguageModel::parameter_count() {
  std::size_t total = 0;
  for (Parameter* p : parameters()) total += p->size();
  return total;
}

Var LanguageModel::decode(Tape& tape, Var top, Var emb_leaf) {
  Var z = top;
  if (proj_) z = tape.matmul(z, tape.param(*proj_));
  Var logits = dec_w_ ? tape.matmul(z, tape.param(*dec_w_))
                      : tape.matmul(z, emb_leaf);
  return tape.add_rowwise(logits, tape.param(dec_b_));
}

LanguageModel::Forward LanguageModel::forward(Tape& tape,
                                              std::span<const std::vector<int>> inputs,
                                              std::span<const std::vector<int>> targets,
                                              const std::vector<CellState>& init,
                                              RunMode mode, Rng& rng) {
  if (inputs.empty()) throw ContractError("forward: empty input sequence");
  if (!targets.empty() && targets.size() != inputs.size()) {
    throw ContractError("forward: token/target sequences must have equal length");
  }
  DropoutSpec drop{cfg_.dropout, mode};

  Var emb_leaf = tape.param(embedding_);
  Forward result;
  result.embedded.reserve(inputs.size());
  std::vector<Var> rnn_inputs;
  rnn_inputs.reserve(inputs.size());
  for (const std::vector<int>& ids : inputs) {
    Var e = tape.gather_rows(emb_leaf, std::span<const int>(ids.data(), ids.size()));
    result.embedded.push_back(e);
    rnn_inputs.push_back(dropout_apply(tape, drop, e, rng));
  }

  StackedRNN::UnrollResult un = rnn_.unroll(
      tape, std::span<const Var>(rnn_inputs.data(), rnn_inputs.size()), init, drop, rng);
  result.states = std::move(un.final_states);

  Var total_nll{};
  std::size_t positions = 0;
  result.logits.reserve(inputs.size());
  for (std::size_t t = 0; t < un.outputs.size(); ++t) {
    Var out = dropout_apply(tape, drop, un.outputs[t], rng);
    Var logits = decode(tape, out, emb_leaf);
    result.logits.push_back(logits);
    if (!targets.empty()) {
      const std::vector<int>& tgt = targets[t];
      if (tgt.size() != inputs[t].size()) {
        throw ContractError("forward: target batch width mismatch");
      }
      Var step_nll = tape.nll(logits, std::span<const int>(tgt.data(), tgt.size()));
      total_nll = total_nll.valid() ? tape.add(total_nll, step_nll) : step_nll;
      positions += tgt.size();
    }
  }
  if (positions > 0) {
    result.mean_nll = tape.scale(total_nll, 1.0 / static_cast<double>(positions));
  }
  result.positions = positions;
  return result;
}

LanguageModel::EvalResult LanguageModel::evaluate(
    std::span<const std::vector<int>> inputs, std::span<const std::vector<int>> targets,
    const std::vector<CellState>& init) {
  Tape tape;
  Rng rng(0);  // eval mode draws nothing
  Forward fwd = forward(tape, inputs, targets, init, RunMode::kEval, rng);
  double nll = fwd.mean_nll.valid() ? tape.value(fwd.mean_nll).item() : 0.0;
  return EvalResult{nll, std::move(fwd.states), fwd.positions};
}

}  // namespace pru
