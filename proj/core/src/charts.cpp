#include "loudsn/charts.hpp"

#include <cmath>
#include <string>

#include "loudsn/errors.hpp"

namespace loudsn {

std::string_view to_string(Chart c) {
  switch (c) {
    case Chart::AffineUV: return "AFFINE_UV";
    case Chart::ProjectiveZW: return "PROJECTIVE_ZW";
    case Chart::NormalXY: return "NORMAL_XY";
  }
  return "?";
}

Chart chart_from_string(std::string_view s) {
  if (s == "AFFINE_UV") return Chart::AffineUV;
  if (s == "PROJECTIVE_ZW") return Chart::ProjectiveZW;
  if (s == "NORMAL_XY") return Chart::NormalXY;
  throw ParameterError("unknown chart tag '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const ChartPoint& p) {
  j = nlohmann::json{{"chart", to_string(p.chart)}, {"coords", {p.coords.first, p.coords.second}}};
}

void from_json(const nlohmann::json& j, ChartPoint& p) {
  const auto& c = j.at("coords");
  if (!c.is_array() || c.size() != 2) throw ParameterError("chart point: coords must be [c1, c2]");
  p.coords = {c[0].get<double>(), c[1].get<double>()};
  p.chart = chart_from_string(j.at("chart").get<std::string>());
  if (!p.coords.finite()) throw ParameterError("chart point: non-finite coordinates");
}

Vec2 to_projective(Vec2 uv) {
  if (uv.second == 0.0) throw SingularityError("projective chart: v = 0");
  return {1.0 / uv.second, (1.0 - uv.first) / uv.second};
}

Vec2 from_projective(Vec2 zw) {
  if (zw.first == 0.0) throw SingularityError("projective chart: z = 0 is the line at infinity");
  return {1.0 - zw.second / zw.first, 1.0 / zw.first};
}

namespace {

struct GCoeffs {
  double ww, wz, c;
};

GCoeffs g_coeffs(const LoudParams& a) {
  require_admissible(a);
  const double d1 = a.D + 1.0;
  return {a.D / (2.0 * (a.F - 1.0) * d1), -(2.0 * a.D + 1.0) / ((2.0 * a.F - 1.0) * d1), 1.0 / (2.0 * d1)};
}

void require_first_integral_domain(const LoudParams& a) {
  if (std::abs(a.F) < kFirstIntegralMinAbsF)
    throw ParameterError("first integral: undefined for F = 0 (|F| below threshold)");
}

}  // namespace

double g_eval(const LoudParams& a, Vec2 zw) {
  const auto k = g_coeffs(a);
  const auto [z, w] = zw;
  return k.ww * w * w + k.wz * w * z + k.c;
}

Vec2 g_gradient(const LoudParams& a, Vec2 zw) {
  const auto k = g_coeffs(a);
  const auto [z, w] = zw;
  return {k.wz * w, 2.0 * k.ww * w + k.wz * z};
}

Vec2 psi(const LoudParams& a, Vec2 zw) {
  const double g = g_eval(a, zw);
  if (!(g > 0.0)) throw DomainError("Psi: g(z,w) <= 0");
  const double s = 1.0 / std::sqrt(g);
  return s * zw;
}

Mat2 psi_jacobian(const LoudParams& a, Vec2 zw) {
  const double g = g_eval(a, zw);
  if (!(g > 0.0)) throw DomainError("Psi: g(z,w) <= 0");
  const auto [gz, gw] = g_gradient(a, zw);
  const auto [z, w] = zw;
  const double s = 1.0 / std::sqrt(g);
  const double h = -0.5 * s / g;  // d(g^-1/2)/dg
  return Mat2{{{s + z * h * gz, z * h * gw}, {w * h * gz, s + w * h * gw}}};
}

Vec2 psi_inverse(const LoudParams& a, Vec2 q, Vec2 guess, const NewtonOptions& opts) {
  Vec2 p = guess;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vec2 r = psi(a, p) - q;
    if (std::max(std::abs(r.first), std::abs(r.second)) <= opts.tolerance) return p;
    const Mat2 J = psi_jacobian(a, p);
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double scale = std::abs(J[0][0] * J[1][1]) + std::abs(J[0][1] * J[1][0]);
    if (!(std::abs(det) > 1e-14 * scale)) throw SingularityError("Psi^-1: singular Jacobian");
    const Vec2 step{(J[1][1] * r.first - J[0][1] * r.second) / det, (-J[1][0] * r.first + J[0][0] * r.second) / det};
    p = p - step;
  }
  const Vec2 r = psi(a, p) - q;
  if (std::max(std::abs(r.first), std::abs(r.second)) <= opts.tolerance) return p;
  throw ConvergenceError("Psi^-1: Newton iteration did not converge");
}

Vec2 psi_inverse_continued(const LoudParams& a, Vec2 q, int steps, const NewtonOptions& opts) {
  if (steps < 1) throw ParameterError("psi_inverse_continued: steps must be >= 1");
  // g(z, 0) = g(0, 0), so Psi^-1(x, 0) = (x sqrt(g(0,0)), 0) exactly.
  Vec2 p{q.first * std::sqrt(g_eval(a, {0.0, 0.0})), 0.0};
  for (int k = 1; k <= steps; ++k) p = psi_inverse(a, {q.first, q.second * k / steps}, p, opts);
  return p;
}

std::vector<Vec2> section_points(const LoudParams& a, std::span<const double> s_values) {
  const double th = theta(-2.0 * a.F, 2);
  std::vector<Vec2> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    const Vec2 q{s + th, 1.0};
    out.push_back(out.empty() ? psi_inverse_continued(a, q) : psi_inverse(a, q, out.back()));
  }
  return out;
}

double pullback_residual(const LoudParams& a, Vec2 zw, const Unfolding* truncated) {
  const Vec2 lhs = psi_jacobian(a, zw) * eval_bar_field(a, zw, true);
  const Vec2 xy = psi(a, zw);
  const Vec2 rhs = truncated ? eval_normal_field(*truncated, xy, true) : eval_loud_normal_field(a, xy);
  return (lhs - rhs).norm() / (1.0 + rhs.norm());
}

double first_integral_bar(const LoudParams& a, Vec2 zw) {
  require_first_integral_domain(a);
  const auto [z, w] = zw;
  if (z == 0.0) throw SingularityError("first integral: z = 0");
  const double base = 1.0 + 2.0 * a.F * g_eval(a, zw) / (z * z);
  if (!(base > 0.0)) throw DomainError("first integral: nonpositive base");
  return (w / z) * std::pow(base, -1.0 / (2.0 * a.F));
}

double first_integral_normal(const LoudParams& a, Vec2 xy) {
  require_first_integral_domain(a);
  const auto [x, y] = xy;
  if (x == 0.0) throw SingularityError("first integral: x = 0");
  const double base = 1.0 + 2.0 * a.F / (x * x);
  if (!(base > 0.0)) throw DomainError("first integral: nonpositive base");
  return (y / x) * std::pow(base, -1.0 / (2.0 * a.F));
}

Vec2 first_integral_normal_gradient(const LoudParams& a, Vec2 xy) {
  require_first_integral_domain(a);
  const auto [x, y] = xy;
  if (x == 0.0) throw SingularityError("first integral: x = 0");
  const double base = 1.0 + 2.0 * a.F / (x * x);
  if (!(base > 0.0)) throw DomainError("first integral: nonpositive base");
  const double p = std::pow(base, -1.0 / (2.0 * a.F));
  // d/dx [(1/x) base^(-1/2F)] = base^(-1/2F) (-1/x^2 + 2/(x^4 base)).
  const double dx = y * p * (-1.0 / (x * x) + 2.0 / (x * x * x * x * base));
  return {dx, p / x};
}

}  // namespace loudsn
