#pragma once

#include <nlohmann/json.hpp>

#include "loudsn/polynomial.hpp"
#include "loudsn/types.hpp"

namespace loudsn {

// Normal-form data of the saddle-node unfolding
//   X = 1/(x U(x,y)) * ( x (x^mu - eps) d/dx - V(x) y d/dy ).
// Immutable; the constructor enforces U(0,0) > 0, V > 0 on [-radius, radius]
// and |eps| < radius^mu.
class Unfolding {
 public:
  Unfolding(int mu, double eps, BivariatePoly U, UnivariatePoly V, double radius = 1.0);

  int mu() const { return mu_; }
  double eps() const { return eps_; }
  const BivariatePoly& U() const { return U_; }
  const UnivariatePoly& V() const { return V_; }
  double radius() const { return radius_; }

  // Same data with eps replaced (re-validated).
  Unfolding with_eps(double eps) const { return Unfolding(mu_, eps, U_, V_, radius_); }

 private:
  int mu_;
  double eps_;
  BivariatePoly U_;
  UnivariatePoly V_;
  double radius_;
};

// Largest real root of x (x^mu - eps) = 0.
double theta(double eps, int mu);

// L_a = (-v + u v) d/du + (u + D u^2 + F v^2) d/dv, negated when `reversed`.
Vec2 eval_loud(const LoudParams& a, Vec2 uv, bool reversed = false);

// The meromorphic extension of -L_a in the chart (z,w) = (1/v, (1-u)/v).
// Without the polar factor this is the bracketed polynomial field; with it the
// field is divided by z (SingularityError at z = 0).
Vec2 eval_bar_field(const LoudParams& a, Vec2 zw, bool include_polar_factor);

// (x (x^mu - eps), -V(x) y), optionally divided by x U(x, y).
Vec2 eval_normal_field(const Unfolding& unf, Vec2 xy, bool include_polar_factor);

// Closed-form U_a(x,y) = (r(x,y))^(-1/2) with the quadratic radicand
//   r = (2D+1)/(2(2F-1)) x y - D/(4(F-1)) y^2 + (D+1)/2.
double loud_normal_U(const LoudParams& a, Vec2 xy);

// The normalized Loud field X_a with closed-form U_a (polar factor included).
Vec2 eval_loud_normal_field(const LoudParams& a, Vec2 xy);

// Coefficients of the radicand r(x,y) above.
struct LoudRadicand {
  double xy;
  double yy;
  double constant;
};
LoudRadicand loud_radicand(const LoudParams& a);

// mu = 2, eps = -2F, V(x) = 2 - 2F - x^2, U = Taylor truncation of U_a of total
// degree `degree`, obtained from the binomial series of (c + q)^(-1/2).
Unfolding build_loud_unfolding(const LoudParams& a, int degree = 8);

// Linear change x = r x', y = r y'. Time is preserved: eps' = eps / r^mu,
// V'(x') = V(r x') / r^mu, U'(x',y') = U(r x', r y') / r^(mu-1), radius' = radius / r.
Unfolding rescale(const Unfolding& unf, double r);

// Radius on which the Taylor series of U_a at (0,0) converges absolutely:
// sqrt(c / (|r.xy| + |r.yy|)) for the radicand c + r.xy x y + r.yy y^2 (+inf if both vanish).
double loud_absolute_convergence_radius(const LoudParams& a);

// build_loud_unfolding followed by rescale() to min(1, safety * convergence radius),
// so that the truncated series is used only where the Taylor series converges on
// the unit square.
Unfolding build_normalized_loud_unfolding(const LoudParams& a, int degree = 8, double safety = 0.9);

void to_json(nlohmann::json& j, const Unfolding& u);
Unfolding unfolding_from_json(const nlohmann::json& j);

}  // namespace loudsn
