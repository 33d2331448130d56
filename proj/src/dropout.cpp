#include "pru/dropout.hpp"

namespace pru {

Var dropout_apply(Tape& tape, const DropoutSpec& spec, Var x, Rng& rng) {
  if (spec.p < 0.0 || spec.p >= 1.0) throw ConfigError("dropout p must be in [0, 1)");
  if (!spec.active()) return x;
  const Tensor& v = tape.value(x);
  Tensor mask(v.shape());
  double* m = mask.mut();
  double keep = 1.0 - spec.p;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    m[i] = rng.uniform() < spec.p ? 0.0 : 1.0 / keep;
  }
  return tape.mul(x, tape.leaf(std::move(mask)));
}

}  // namespace pru
