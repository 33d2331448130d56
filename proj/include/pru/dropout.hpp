// Inverted dropout: survivors are scaled by 1/(1-p) at train time so
// evaluation is the identity map.
#pragma once

#include "pru/autodiff.hpp"
#include "pru/rng.hpp"

namespace pru {

enum class RunMode { kTrain, kEval };

struct DropoutSpec {
  double p = 0.0;                 // drop probability, must be < 1
  RunMode mode = RunMode::kEval;

  bool active() const { return mode == RunMode::kTrain && p > 0.0; }
};

Var dropout_apply(Tape& tape, const DropoutSpec& spec, Var x, Rng& rng);

}  // namespace pru
