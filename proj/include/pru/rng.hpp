// Seeded RNG with portable uniform/normal draws (no libstdc++ distribution
// objects, so sequences are identical across standard library versions).
#pragma once

#include <cstdint>
#include <random>

#include "pru/tensor.hpp"

namespace pru {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; the spare draw is cached, so call order defines the sequence.
  double normal(double mean, double stddev);

  Tensor uniform_tensor(Shape shape, double lo, double hi);
  Tensor normal_tensor(Shape shape, double mean, double stddev);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pru
