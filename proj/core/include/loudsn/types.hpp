#pragma once

#include <array>
#include <cmath>

namespace loudsn {

struct Vec2 {
  double first = 0.0;
  double second = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.first + b.first, a.second + b.second}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.first - b.first, a.second - b.second}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.first, -a.second}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.first, k * a.second}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;

  bool finite() const { return std::isfinite(first) && std::isfinite(second); }
  double norm() const { return std::hypot(first, second); }
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m[0][0] * v.first + m[0][1] * v.second, m[1][0] * v.first + m[1][1] * v.second};
}

// The parameter a = (D, F) of the dehomogenized Loud family
//   u' = -v + u v,  v' = u + D u^2 + F v^2.
struct LoudParams {
  double D = 0.0;
  double F = 0.0;

  friend constexpr bool operator==(LoudParams, LoudParams) = default;
};

// Open box (D_lo, D_hi) x (F_lo, F_hi) of parameters for which the normal form is built.
struct ParameterBox {
  double D_lo = -1.0;
  double D_hi = 0.0;
  double F_lo = -0.5;
  double F_hi = 0.5;

  bool contains(const LoudParams& a) const {
    return a.D > D_lo && a.D < D_hi && a.F > F_lo && a.F < F_hi;
  }
};

inline constexpr ParameterBox kAdmissibleBox{};

// Throws ParameterError when `a` is outside `box`.
void require_admissible(const LoudParams& a, const ParameterBox& box = kAdmissibleBox);

}  // namespace loudsn
