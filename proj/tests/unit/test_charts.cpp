#include <doctest.h>

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "loudsn/charts.hpp"
#include "loudsn/errors.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/integrator.hpp"
#include "oracles.hpp"

using namespace loudsn;
using loudsn::testing::Gen;

namespace {

void check_vec(Vec2 got, Vec2 want, double tol = 1e-15) {
  CHECK(got.first == doctest::Approx(want.first).epsilon(tol).scale(1.0));
  CHECK(got.second == doctest::Approx(want.second).epsilon(tol).scale(1.0));
}

// Random (z, w) in the sampling box with z > 0 and g > 0.
Vec2 box_point(Gen& gen, const LoudParams& a, double box = 0.2) {
  for (;;) {
    const Vec2 p{gen.uniform(1e-3, box), gen.uniform(-box, box)};
    if (g_eval(a, p) > 0.0) return p;
  }
}

}  // namespace

TEST_SUITE("charts") {
  TEST_CASE("projective chart examples") {
    check_vec(to_projective({0.0, 1.0}), {1.0, 1.0});
    check_vec(to_projective({1.0, 2.0}), {0.5, 0.0});
    check_vec(to_projective({-3.0, 0.5}), {2.0, 8.0});
    check_vec(from_projective({1.0, 1.0}), {0.0, 1.0});
    check_vec(from_projective({0.5, 0.0}), {1.0, 2.0});
    CHECK_THROWS_AS(to_projective({0.3, 0.0}), SingularityError);
    CHECK_THROWS_AS(from_projective({0.0, 0.3}), SingularityError);
  }

  TEST_CASE("property: projective round trip") {
    Gen gen(41);
    for (int n = 0; n < 1000; ++n) {
      Vec2 p{gen.uniform(-5, 5), gen.uniform(-5, 5)};
      if (std::abs(p.second) < 1e-3) continue;
      const Vec2 back = from_projective(to_projective(p));
      REQUIRE((back - p).norm() <= 1e-14 * (1.0 + p.norm()) * 1e1);
    }
  }

  TEST_CASE("g examples") {
    CHECK(g_eval({-0.5, 0.2}, {0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(g_eval({-0.2, 0.1}, {0.0, 0.0}) == doctest::Approx(0.625));
    const double D = -0.5, F = 0.1, z = 0.3, w = 0.2;
    const double hand = D * w * w / (2 * (F - 1) * (D + 1)) - (2 * D + 1) * w * z / ((2 * F - 1) * (D + 1)) +
                        1 / (2 * (D + 1));
    CHECK(g_eval({D, F}, {z, w}) == doctest::Approx(hand).epsilon(1e-15));
    CHECK(hand == doctest::Approx(1.0 + 0.02 / 0.9));
  }

  TEST_CASE("psi examples") {
    check_vec(psi({-0.3, 0.1}, {0.0, 0.0}), {0.0, 0.0});
    check_vec(psi({-0.5, 0.2}, {0.17, 0.0}), {0.17, 0.0});
    const LoudParams a{-0.2, 0.1};
    const Vec2 p{0.1, 0.05};
    const Vec2 q = psi(a, p);
    const Vec2 back = psi_inverse(a, q, p + Vec2{1e-3, -1e-3});
    CHECK((back - p).norm() <= 1e-10);
    check_vec(psi_inverse(a, {0.0, 0.0}, {1e-3, 1e-3}), {0.0, 0.0}, 1e-12);
  }

  TEST_CASE("psi jacobian") {
    for (double D : {-0.8, -0.5, -0.2}) {
      const Mat2 J = psi_jacobian({D, 0.1}, {0.0, 0.0});
      CHECK(J[0][0] == doctest::Approx(std::sqrt(2 * (D + 1))));
      CHECK(J[1][1] == doctest::Approx(std::sqrt(2 * (D + 1))));
      CHECK(J[0][1] == 0.0);
      CHECK(J[1][0] == 0.0);
    }
    const Mat2 I = psi_jacobian({-0.5, -0.3}, {0.0, 0.0});
    CHECK(I[0][0] == doctest::Approx(1.0));
    CHECK(I[1][1] == doctest::Approx(1.0));

    Gen gen(43);
    const double h = 1e-6;
    for (int n = 0; n < 200; ++n) {
      const LoudParams a = gen.params();
      const Vec2 p = box_point(gen, a);
      const Mat2 J = psi_jacobian(a, p);
      const Vec2 dz = (1.0 / (2 * h)) * (psi(a, p + Vec2{h, 0}) - psi(a, p - Vec2{h, 0}));
      const Vec2 dw = (1.0 / (2 * h)) * (psi(a, p + Vec2{0, h}) - psi(a, p - Vec2{0, h}));
      const double scale = 1.0 + std::abs(J[0][0]) + std::abs(J[1][1]);
      REQUIRE(std::abs(J[0][0] - dz.first) <= 1e-6 * scale);
      REQUIRE(std::abs(J[1][0] - dz.second) <= 1e-6 * scale);
      REQUIRE(std::abs(J[0][1] - dw.first) <= 1e-6 * scale);
      REQUIRE(std::abs(J[1][1] - dw.second) <= 1e-6 * scale);
    }
  }

  TEST_CASE("property: psi round trips") {
    Gen gen(47);
    for (int n = 0; n < 500; ++n) {
      const LoudParams a = gen.params();
      const Vec2 p = box_point(gen, a);
      const Vec2 q = psi(a, p);
      const Vec2 back = psi_inverse_continued(a, q);
      REQUIRE((back - p).norm() <= 1e-10 * (1.0 + p.norm()));
      REQUIRE((psi(a, back) - q).norm() <= 1e-10 * (1.0 + q.norm()));
    }
  }

  TEST_CASE("psi domain errors") {
    const LoudParams a{-0.1, 0.4};
    CHECK(g_eval(a, {3.0, -3.0}) < 0.0);
    CHECK_THROWS_AS(psi(a, {3.0, -3.0}), DomainError);
    CHECK_THROWS_AS(psi_jacobian(a, {3.0, -3.0}), DomainError);
  }

  TEST_CASE("section points lie on y = 1") {
    const LoudParams a{-0.5, 0.1};
    const double th = theta(-2.0 * a.F, 2);
    const std::vector<double> s{0.2, 0.1, 0.05};
    const auto pts = section_points(a, s);
    REQUIRE(pts.size() == 3);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Vec2 q = psi(a, pts[k]);
      CHECK(q.first == doctest::Approx(s[k] + th).epsilon(1e-10));
      CHECK(q.second == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("pullback residual at random points") {
    Gen gen(53);
    const LoudParams a{-0.5, 0.1};
    for (int n = 0; n < 100; ++n) REQUIRE(pullback_residual(a, box_point(gen, a)) <= 1e-9);
    for (int n = 0; n < 100; ++n) REQUIRE(pullback_residual(a, {gen.uniform(1e-3, 0.2), 0.0}) <= 1e-9);
  }

  TEST_CASE("property: pullback residual on a 10x10 parameter grid") {
    Gen gen(59);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const LoudParams a{-1.0 + (i + 0.5) / 10.0, -0.5 + (j + 0.5) / 10.0};
        REQUIRE(std::abs(a.F) >= 0.01);
        for (int n = 0; n < 100; ++n) worst = std::max(worst, pullback_residual(a, box_point(gen, a)));
      }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("pullback with the degree-8 truncation") {
    Gen gen(61);
    for (const LoudParams a : {LoudParams{-0.5, 0.1}, LoudParams{-0.8, -0.3}, LoudParams{-0.2, 0.3}}) {
      const Unfolding unf = build_loud_unfolding(a, 8);
      double worst = 0.0;
      for (int n = 0; n < 100; ++n) {
        const Vec2 q{gen.uniform(0.01, 0.1), gen.uniform(-0.1, 0.1)};
        const Vec2 p = psi_inverse_continued(a, q);
        worst = std::max(worst, pullback_residual(a, p, &unf));
      }
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("first integral examples and errors") {
    const LoudParams a{-0.5, 0.1};
    CHECK(first_integral_bar(a, {0.3, 0.0}) == 0.0);
    CHECK(first_integral_normal(a, {0.3, 0.0}) == 0.0);
    CHECK_THROWS_AS(first_integral_bar({-0.5, 0.0}, {0.3, 0.1}), ParameterError);
    CHECK_THROWS_AS(first_integral_normal({-0.5, 0.005}, {0.3, 0.1}), ParameterError);
    CHECK_THROWS_AS(first_integral_normal({-0.5, -0.3}, {0.3, 0.1}), DomainError);
    CHECK_THROWS_AS(first_integral_normal(a, {0.0, 0.1}), SingularityError);
  }

  TEST_CASE("property: chart identity of the first integrals") {
    Gen gen(67);
    int checked = 0;
    for (int n = 0; n < 1000; ++n) {
      const LoudParams a = gen.params_nonzero_F(0.01);
      const Vec2 p = box_point(gen, a);
      const Vec2 q = psi(a, p);
      if (!(1.0 + 2.0 * a.F * g_eval(a, p) / (p.first * p.first) > 1e-3)) continue;
      const double ib = first_integral_bar(a, p), in = first_integral_normal(a, q);
      if (ib == 0.0) continue;
      REQUIRE(loudsn::testing::rel_diff(ib, in) <= 1e-10);
      ++checked;
    }
    CHECK(checked > 500);
  }

  TEST_CASE("property: dI is parallel to the dual of the polynomial field") {
    Gen gen(71);
    for (int n = 0; n < 500; ++n) {
      const LoudParams a = gen.params_nonzero_F(0.01);
      const double xlo = a.F < 0 ? std::sqrt(-2 * a.F) + 0.05 : 0.05;
      const Vec2 q{gen.uniform(xlo, xlo + 1.0), gen.uniform(-1.0, 1.0)};
      const Vec2 grad = first_integral_normal_gradient(a, q);
      const double s = q.first * q.first + 2 * a.F;
      const Vec2 dual{-q.second * (s - 2.0), q.first * s};
      const double cross = grad.first * dual.second - grad.second * dual.first;
      REQUIRE(std::abs(cross) <= 1e-9 * grad.norm() * dual.norm());
    }
  }

  TEST_CASE("gradient matches finite differences") {
    const LoudParams a{-0.4, 0.2};
    const Vec2 q{0.6, 0.3};
    const double h = 1e-6;
    const Vec2 g = first_integral_normal_gradient(a, q);
    CHECK(g.first == doctest::Approx((first_integral_normal(a, {q.first + h, q.second}) -
                                      first_integral_normal(a, {q.first - h, q.second})) / (2 * h)).epsilon(1e-7));
    CHECK(g.second == doctest::Approx((first_integral_normal(a, {q.first, q.second + h}) -
                                       first_integral_normal(a, {q.first, q.second - h})) / (2 * h)).epsilon(1e-7));
  }

  TEST_CASE("first integrals are constant along arcs") {
    const LoudParams a{-0.5, 0.2};
    IntegratorConfig cfg{.rel_tol = 1e-11, .abs_tol = 1e-13, .initial_step = 1e-4, .t_max = 0.5};
    const EventSpec never{[](Vec2 p) { return p.first + 100.0; }, Direction::Down};

    const Vec2 p0{0.8, 0.3};
    const Orbit bar = integrate_until_event([&a](Vec2 p) { return eval_bar_field(a, p, true); }, p0, never, cfg);
    REQUIRE(bar.status == OrbitStatus::TimeLimit);
    const double i0 = first_integral_bar(a, p0);
    for (const Vec2& p : bar.states) REQUIRE(std::abs(first_integral_bar(a, p) - i0) <= 1e-6 * std::abs(i0));

    const Vec2 q0{0.5, 0.4};
    auto poly = [&a](Vec2 p) {
      const double s = p.first * p.first + 2 * a.F;
      return Vec2{p.first * s, p.second * (s - 2)};
    };
    const Orbit nf = integrate_until_event(poly, q0, never, cfg);
    const double j0 = first_integral_normal(a, q0);
    for (const Vec2& p : nf.states) REQUIRE(std::abs(first_integral_normal(a, p) - j0) <= 1e-6 * std::abs(j0));
  }

  TEST_CASE("chart tags and json") {
    for (Chart c : {Chart::AffineUV, Chart::ProjectiveZW, Chart::NormalXY})
      CHECK(chart_from_string(to_string(c)) == c);
    CHECK(to_string(Chart::ProjectiveZW) == "PROJECTIVE_ZW");
    CHECK_THROWS_AS(chart_from_string("POLAR"), ParameterError);
    const ChartPoint p{{0.25, -1.5}, Chart::NormalXY};
    const auto j = nlohmann::json(p);
    CHECK(j["chart"] == "NORMAL_XY");
    const auto back = j.get<ChartPoint>();
    CHECK(back.chart == p.chart);
    CHECK(back.coords == p.coords);
  }
}
