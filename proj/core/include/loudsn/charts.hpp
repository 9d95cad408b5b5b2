#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "loudsn/fields.hpp"
#include "loudsn/types.hpp"

namespace loudsn {

enum class Chart { AffineUV, ProjectiveZW, NormalXY };

std::string_view to_string(Chart c);
Chart chart_from_string(std::string_view s);

struct ChartPoint {
  Vec2 coords;
  Chart chart = Chart::AffineUV;
};

void to_json(nlohmann::json& j, const ChartPoint& p);
void from_json(const nlohmann::json& j, ChartPoint& p);

// (z, w) = (1/v, (1-u)/v); SingularityError at v = 0.
Vec2 to_projective(Vec2 uv);
// (u, v) = (1 - w/z, 1/z); SingularityError at z = 0 (the line at infinity).
Vec2 from_projective(Vec2 zw);

// g(z,w) = D w^2 / (2(F-1)(D+1)) - (2D+1) w z / ((2F-1)(D+1)) + 1/(2(D+1)).
double g_eval(const LoudParams& a, Vec2 zw);
// Gradient (dg/dz, dg/dw).
Vec2 g_gradient(const LoudParams& a, Vec2 zw);

// Psi(z,w) = (z, w) / sqrt(g(z,w)), positive branch. DomainError when g <= 0.
Vec2 psi(const LoudParams& a, Vec2 zw);
Mat2 psi_jacobian(const LoudParams& a, Vec2 zw);

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;  // sup-norm residual
};

// Newton iteration for Psi(z,w) = q from `guess`. ConvergenceError when the
// residual stays above tolerance after max_iterations; SingularityError when the
// Jacobian degenerates.
Vec2 psi_inverse(const LoudParams& a, Vec2 q, Vec2 guess, const NewtonOptions& opts = {});

// Psi^-1(q) by continuation from the exact preimage of (q.x, 0), which is
// (q.x sqrt(g(0,0)), 0), moving the target along y in `steps` increments.
Vec2 psi_inverse_continued(const LoudParams& a, Vec2 q, int steps = 16, const NewtonOptions& opts = {});

// Points of the section Psi^-1({y = 1}) at x = s + theta for each s, each Newton
// solve seeded by the previous one.
std::vector<Vec2> section_points(const LoudParams& a, std::span<const double> s_values);

// || DPsi(p) Xbar_a(p) - X_a(Psi(p)) || / (1 + ||X_a(Psi(p))||), full fields with polar
// factors. X_a uses the closed-form U_a unless `truncated` supplies a polynomial U.
double pullback_residual(const LoudParams& a, Vec2 zw, const Unfolding* truncated = nullptr);

// Ibar(z,w) = (w/z) (1 + 2F g/z^2)^(-1/(2F)); requires F != 0 (|F| >= 0.01), z != 0,
// positive base.
double first_integral_bar(const LoudParams& a, Vec2 zw);
// I(x,y) = (y/x) (1 + 2F/x^2)^(-1/(2F)); same preconditions.
double first_integral_normal(const LoudParams& a, Vec2 xy);
Vec2 first_integral_normal_gradient(const LoudParams& a, Vec2 xy);

// Smallest |F| for which first integrals are evaluated.
inline constexpr double kFirstIntegralMinAbsF = 0.01;

}  // namespace loudsn
