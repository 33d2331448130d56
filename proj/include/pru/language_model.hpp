// Word-level language model: embedding, stacked recurrent layers, dropout
// around them, and a decoder that can tie its weights to the embedding.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pru/recurrent.hpp"

namespace pru {

struct LMConfig {
  std::size_t vocab = 0;
  std::size_t embed_dim = 400;
  std::size_t hidden_dim = 1000;
  std::size_t layers = 3;
  std::size_t levels = 2;       // pyramid levels K
  std::size_t groups = 1;       // context groups g
  SubsampleMode mode = SubsampleMode::kAvgPool;
  double dropout = 0.5;
  bool tie_weights = true;
  bool residual = true;
  bool shrink_last = false;     // last layer hidden = embed_dim (baseline shape)

  std::size_t layer_input(std::size_t l) const {
    return l == 0 ? embed_dim : hidden_dim;
  }
  std::size_t layer_hidden(std::size_t l) const {
    return (shrink_last && l + 1 == layers) ? embed_dim : hidden_dim;
  }
  std::size_t top_dim() const { return layer_hidden(layers - 1); }

  void validate() const;  // throws ConfigError
};

double perplexity(double mean_nll);

class LanguageModel {
 public:
  LanguageModel(LMConfig cfg, Rng& rng);

  const LMConfig& config() const { return cfg_; }
  StackedRNN& rnn() { return rnn_; }
  Parameter& embedding() { return embedding_; }
  Parameter& decoder_bias() { return dec_b_; }
  Parameter* decoder_weight() { return dec_w_ ? &*dec_w_ : nullptr; }
  Parameter* projection() { return proj_ ? &*proj_ : nullptr; }

  std::vector<Parameter*> parameters();
  std::size_t parameter_count();  // every allocated element, grads excluded

  std::vector<CellState> zero_states(std::size_t batch) const {
    return rnn_.zero_states(batch);
  }

  struct Forward {
    Var mean_nll;                    // scalar; invalid when targets absent
    std::vector<Var> logits;         // [B x V] per position
    std::vector<Var> embedded;       // [B x D] per position (pre-dropout)
    std::vector<CellState> states;   // detached finals
    std::size_t positions = 0;       // B*T predictions contributing to mean_nll
  };

  // inputs/targets: time-major id rows, inputs[t].size() == batch. targets
  // may be empty (logits only). Dropout placement: after the embedding,
  // between layers, and after the top layer.
  Forward forward(Tape& tape, std::span<const std::vector<int>> inputs,
                  std::span<const std::vector<int>> targets,
                  const std::vector<CellState>& init, RunMode mode, Rng& rng);

  // Convenience for callers that only need the loss value and next states.
  struct EvalResult {
    double mean_nll;
    std::vector<CellState> states;
    std::size_t positions;
  };
  EvalResult evaluate(std::span<const std::vector<int>> inputs,
                      std::span<const std::vector<int>> targets,
                      const std::vector<CellState>& init);

 private:
  Var decode(Tape& tape, Var top, Var emb_leaf);

  LMConfig cfg_;
  Parameter embedding_;           // [V x D]
  StackedRNN rnn_;
  std::optional<Parameter> proj_;  // [D x top] for tied decoding when top != D
  std::optional<Parameter> dec_w_; // [V x top] untied decoder
  Parameter dec_b_;                // [V]
};

}  // namespace pru
