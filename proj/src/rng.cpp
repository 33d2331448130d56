#include "pru/rng.hpp"

#include <cmath>

namespace pru {

double Rng::normal(double mean, double stddev) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return mean + stddev * r * std::cos(theta);
}

Tensor Rng::uniform_tensor(Shape shape, double lo, double hi) {
  Tensor t(std::move(shape));
  double* p = t.mut();
  for (std::size_t i = 0; i < t.size(); ++i) p[i] = uniform(lo, hi);
  return t;
}

Tensor Rng::normal_tensor(Shape shape, double mean, double stddev) {
  Tensor t(std::move(shape));
  double* p = t.mut();
  for (std::size_t i = 0; i < t.size(); ++i) p[i] = normal(mean, stddev);
  return t;
}

}  // namespace pru
