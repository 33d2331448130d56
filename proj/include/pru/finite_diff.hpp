// Central-difference gradient oracle, independent of the tape machinery.
#pragma once

#include <functional>

#include "pru/tensor.hpp"

namespace pru {

// (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps) per coordinate.
// Throws NumericError if f produces a non-finite value.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double eps);

// |a - b| / max(1, |a|, |b|); stable near zero.
double relative_error(double a, double b);

}  // namespace pru
