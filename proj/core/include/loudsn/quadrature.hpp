#pragma once

#include <functional>

namespace loudsn {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double l1_norm = 0.0;
};

// Adaptive Gauss-Kronrod (15/31) quadrature of f over [a, b]. Throws
// ConvergenceError when the error estimate exceeds rel_tol * L1 after
// max_depth bisections.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-12, unsigned max_depth = 40);

}  // namespace loudsn
