#include "loudsn/differentiation.hpp"

#include <cmath>

#include "loudsn/errors.hpp"

namespace loudsn {

int DerivativeEstimate::certified_sign() const {
  if (!consistent) return 0;
  if (value > 0.0 && coarse > 0.0 && fine > 0.0) return 1;
  if (value < 0.0 && coarse < 0.0 && fine < 0.0) return -1;
  return 0;
}

DerivativeEstimate richardson_central(const std::function<double(double)>& f, double x, double h,
                                      double consistency_rel) {
  if (!(h > 0.0)) throw ParameterError("richardson_central: step must be positive");
  DerivativeEstimate d;
  d.coarse = (f(x + h) - f(x - h)) / (2.0 * h);
  d.fine = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  d.value = (4.0 * d.fine - d.coarse) / 3.0;
  d.consistent = std::isfinite(d.value) && std::abs(d.fine - d.coarse) <= consistency_rel * std::abs(d.value);
  return d;
}

}  // namespace loudsn
