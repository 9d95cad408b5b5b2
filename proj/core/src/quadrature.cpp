#include "loudsn/quadrature.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "loudsn/errors.hpp"

namespace loudsn {

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                    unsigned max_depth) {
  QuadratureResult r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol,
                                                                          &r.error_estimate, &r.l1_norm);
  if (!std::isfinite(r.value) || r.error_estimate > 10.0 * rel_tol * std::max(r.l1_norm, 1e-300))
    throw ConvergenceError("adaptive quadrature did not reach the requested tolerance");
  return r;
}

}  // namespace loudsn
