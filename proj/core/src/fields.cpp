#include "loudsn/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "loudsn/errors.hpp"

namespace loudsn {

void require_admissible(const LoudParams& a, const ParameterBox& box) {
  if (!std::isfinite(a.D) || !std::isfinite(a.F) || !box.contains(a))
    throw ParameterError("parameter (D, F) = (" + std::to_string(a.D) + ", " + std::to_string(a.F) +
                         ") outside the admissible box");
}

namespace {

// V > 0 on [-r, r]: sampled minimum must exceed the worst dip allowed by the
// derivative bound between samples.
void require_positive_on_interval(const UnivariatePoly& V, double r) {
  constexpr int kSamples = 512;
  const double spacing = 2.0 * r / kSamples;
  double vmin = V(-r);
  for (int k = 1; k <= kSamples; ++k) vmin = std::min(vmin, V(-r + spacing * k));
  if (!(vmin > 0.5 * spacing * V.derivative_bound(r)))
    throw ParameterError("unfolding: V must be positive on [-radius, radius]");
}

}  // namespace

Unfolding::Unfolding(int mu, double eps, BivariatePoly U, UnivariatePoly V, double radius)
    : mu_(mu), eps_(eps), U_(std::move(U)), V_(std::move(V)), radius_(radius) {
  if (mu_ < 1) throw ParameterError("unfolding: mu must be a positive integer");
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw ParameterError("unfolding: radius must be positive");
  if (!std::isfinite(eps_) || !(std::abs(eps_) < std::pow(radius_, mu_)))
    throw ParameterError("unfolding: |eps| must be below radius^mu");
  if (!(U_.coefficient(0, 0) > 0.0)) throw ParameterError("unfolding: U(0,0) must be positive");
  require_positive_on_interval(V_, radius_);
}

double theta(double eps, int mu) {
  if (eps <= 0.0) return 0.0;
  return mu == 2 ? std::sqrt(eps) : std::pow(eps, 1.0 / mu);
}

Vec2 eval_loud(const LoudParams& a, Vec2 uv, bool reversed) {
  const auto [u, v] = uv;
  const Vec2 f{-v + u * v, u + a.D * u * u + a.F * v * v};
  return reversed ? -f : f;
}

Vec2 eval_bar_field(const LoudParams& a, Vec2 zw, bool include_polar_factor) {
  const auto [z, w] = zw;
  const double p = a.F + (a.D + 1.0) * z * z - (2.0 * a.D + 1.0) * z * w + a.D * w * w;
  Vec2 f{z * p, w * (p - 1.0)};
  if (include_polar_factor) {
    if (z == 0.0) throw SingularityError("bar field: polar locus z = 0");
    f = (1.0 / z) * f;
  }
  return f;
}

Vec2 eval_normal_field(const Unfolding& unf, Vec2 xy, bool include_polar_factor) {
  const auto [x, y] = xy;
  Vec2 f{x * (std::pow(x, unf.mu()) - unf.eps()), -unf.V()(x) * y};
  if (include_polar_factor) {
    const double polar = x * unf.U()(x, y);
    if (polar == 0.0) throw SingularityError("normal field: polar locus x U(x,y) = 0");
    f = (1.0 / polar) * f;
  }
  return f;
}

LoudRadicand loud_radicand(const LoudParams& a) {
  require_admissible(a);
  return {(2.0 * a.D + 1.0) / (2.0 * (2.0 * a.F - 1.0)), -a.D / (4.0 * (a.F - 1.0)), (a.D + 1.0) / 2.0};
}

double loud_normal_U(const LoudParams& a, Vec2 xy) {
  const auto r = loud_radicand(a);
  const auto [x, y] = xy;
  const double rad = r.xy * x * y + r.yy * y * y + r.constant;
  if (!(rad > 0.0)) throw DomainError("U_a: nonpositive radicand");
  return 1.0 / std::sqrt(rad);
}

Vec2 eval_loud_normal_field(const LoudParams& a, Vec2 xy) {
  const auto [x, y] = xy;
  if (x == 0.0) throw SingularityError("X_a: polar locus x = 0");
  const double k = 1.0 / (x * loud_normal_U(a, xy));
  const double s = x * x + 2.0 * a.F;
  return {k * x * s, k * y * (s - 2.0)};
}

Unfolding build_loud_unfolding(const LoudParams& a, int degree) {
  if (degree < 2) throw ParameterError("build_loud_unfolding: degree must be >= 2");
  const auto r = loud_radicand(a);
  // (c + q)^(-1/2) = c^(-1/2) sum_k binom(-1/2, k) (q/c)^k,  q = r.xy x y + r.yy y^2.
  const BivariatePoly q({{{1, 1}, r.xy / r.constant}, {{0, 2}, r.yy / r.constant}}, degree);
  BivariatePoly U = BivariatePoly::constant(1.0, degree);
  BivariatePoly qk = BivariatePoly::constant(1.0, degree);
  double binom = 1.0;
  for (int k = 1; 2 * k <= degree; ++k) {
    binom *= (-0.5 - (k - 1)) / k;
    qk = qk * q;
    U = U + qk * binom;
  }
  U = U * (1.0 / std::sqrt(r.constant));
  return Unfolding(2, 0.0 - 2.0 * a.F, std::move(U), UnivariatePoly({2.0 - 2.0 * a.F, 0.0, -1.0}), 1.0);
}

Unfolding rescale(const Unfolding& unf, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("rescale: factor must be positive");
  const double rmu = std::pow(r, unf.mu());
  return Unfolding(unf.mu(), unf.eps() / rmu, unf.U().scaled_arguments(r, r) * (r / rmu),
                   unf.V().scaled_argument(r) * (1.0 / rmu), unf.radius() / r);
}

double loud_absolute_convergence_radius(const LoudParams& a) {
  const auto r = loud_radicand(a);
  const double k = std::abs(r.xy) + std::abs(r.yy);
  return k > 0.0 ? std::sqrt(r.constant / k) : std::numeric_limits<double>::infinity();
}

Unfolding build_normalized_loud_unfolding(const LoudParams& a, int degree, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ParameterError("normalized unfolding: safety must lie in (0, 1]");
  const double r = std::min(1.0, safety * loud_absolute_convergence_radius(a));
  Unfolding unf = build_loud_unfolding(a, degree);
  return r < 1.0 ? rescale(unf, r) : unf;
}

void to_json(nlohmann::json& j, const Unfolding& u) {
  j = nlohmann::json{{"mu", u.mu()}, {"eps", u.eps()}, {"U", u.U()}, {"V", u.V()}, {"radius", u.radius()}};
}

Unfolding unfolding_from_json(const nlohmann::json& j) {
  return Unfolding(j.at("mu").get<int>(), j.at("eps").get<double>(), j.at("U").get<BivariatePoly>(),
                   j.at("V").get<UnivariatePoly>(), j.value("radius", 1.0));
}

}  // namespace loudsn
