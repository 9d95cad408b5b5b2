#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loudsn/types.hpp"

namespace loudsn {

// Parameter grid used by the conjugacy and first-integral sweeps.
std::vector<LoudParams> default_verification_grid();

struct CheckResult {
  std::string name;
  std::size_t cells = 0;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  std::size_t failures = 0;  // samples that could not be evaluated
  bool passed = false;
};

struct SweepOptions {
  std::size_t points = 100;  // per parameter cell
  std::uint64_t seed = 1;
  double box = 0.2;          // |z|, |w| <= box, z > 0
  std::size_t workers = 0;
};

// Max pullback_residual at seeded random points with 0 < z <= box, |w| <= box.
// Threshold 1e-9.
CheckResult pullback_sweep(std::span<const LoudParams> grid, const SweepOptions& opts);

// Max relative drift of Ibar along arcs of Xbar_a and of I along arcs of the
// polynomial part of X_a. Cells with |F| < 0.05 are skipped. Threshold 1e-6.
CheckResult integral_drift_sweep(std::span<const LoudParams> grid, const SweepOptions& opts);

// Coefficient-exact x U = x U0 + y Uhat for `count` random polynomials of
// degree <= max_degree. Threshold 0 (any mismatch fails).
CheckResult weierstrass_sweep(std::size_t count, int max_degree, std::uint64_t seed);

}  // namespace loudsn
