#include "pru/finite_diff.hpp"

#include <cmath>

namespace pru {

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double eps) {
  if (eps <= 0.0) throw ContractError("finite_diff_grad: eps must be positive");
  Tensor grad(x.shape());
  double* g = grad.mut();
  Tensor probe = x;
  double* p = probe.mut();
  for (std::size_t i = 0; i < x.size(); ++i) {
    double keep = p[i];
    p[i] = keep + eps;
    double hi = f(probe);
    p[i] = keep - eps;
    double lo = f(probe);
    p[i] = keep;
    if (!std::isfinite(hi) || !std::isfinite(lo)) {
      throw NumericError("finite_diff_grad: function returned non-finite value");
    }
    g[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

double relative_error(double a, double b) {
  double denom = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) / denom;
}

}  // namespace pru
