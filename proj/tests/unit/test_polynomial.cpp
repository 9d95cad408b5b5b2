#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "loudsn/errors.hpp"
#include "loudsn/polynomial.hpp"

using namespace loudsn;
using loudsn::testing::Gen;

namespace {

// x U and x U0 + y Uhat expanded monomial by monomial, without using the library's arithmetic.
BivariatePoly::Terms times_x(const BivariatePoly& p) {
  BivariatePoly::Terms out;
  for (const auto& [e, c] : p.terms()) out[{e.first + 1, e.second}] += c;
  return out;
}

BivariatePoly::Terms reconstruct(const WeierstrassSplit& s) {
  BivariatePoly::Terms out;
  const auto& u0 = s.U0.coefficients();
  for (std::size_t i = 0; i < u0.size(); ++i)
    if (u0[i] != 0.0) out[{static_cast<int>(i) + 1, 0}] += u0[i];
  for (const auto& [e, c] : s.Uhat.terms()) out[{e.first, e.second + 1}] += c;
  return out;
}

}  // namespace

TEST_SUITE("polynomial") {
  TEST_CASE("univariate evaluation, derivative and trimming") {
    const UnivariatePoly p({1.0, -2.0, 3.0, 0.0, 0.0});
    CHECK(p.degree() == 2);
    CHECK(p(2.0) == doctest::Approx(1.0 - 4.0 + 12.0));
    CHECK(p.derivative() == UnivariatePoly({-2.0, 6.0}));
    CHECK(p.coefficient(7) == 0.0);
    CHECK(UnivariatePoly().degree() == -1);
    CHECK(UnivariatePoly({0.0, 0.0}).degree() == -1);
    CHECK(p.scaled_argument(2.0) == UnivariatePoly({1.0, -4.0, 12.0}));
    CHECK(p.derivative_bound(1.0) == doctest::Approx(2.0 + 6.0));
  }

  TEST_CASE("bivariate storage drops zeros and enforces the degree cap") {
    BivariatePoly::Terms t{{{0, 0}, 1.0}, {{1, 1}, 0.0}, {{2, 0}, -3.0}};
    const BivariatePoly p(t, 2);
    CHECK(p.terms().size() == 2);
    CHECK(p.total_degree() == 2);
    CHECK(p.coefficient(1, 1) == 0.0);
    CHECK_THROWS_AS(BivariatePoly(BivariatePoly::Terms{{{2, 1}, 1.0}}, 2), ParameterError);
    CHECK_THROWS_AS(BivariatePoly(BivariatePoly::Terms{{{-1, 0}, 1.0}}, 2), ParameterError);
    CHECK_THROWS_AS(BivariatePoly(-1), ParameterError);
  }

  TEST_CASE("bivariate products truncate at the cap") {
    const BivariatePoly a(BivariatePoly::Terms{{{0, 0}, 1.0}, {{1, 0}, 1.0}}, 2);
    const BivariatePoly sq = a * a * a;  // (1+x)^3 truncated at degree 2
    CHECK(sq.coefficient(0, 0) == 1.0);
    CHECK(sq.coefficient(1, 0) == 3.0);
    CHECK(sq.coefficient(2, 0) == 3.0);
    CHECK(sq.coefficient(3, 0) == 0.0);
  }

  TEST_CASE("bivariate helpers") {
    const BivariatePoly p(BivariatePoly::Terms{{{0, 0}, 2.0}, {{1, 1}, 3.0}, {{0, 2}, -1.0}}, 2);
    CHECK(p(0.5, 2.0) == doctest::Approx(2.0 + 3.0 - 4.0));
    CHECK(p.at_y_zero() == UnivariatePoly({2.0}));
    const auto sh = p.shifted(1, 0);
    CHECK(sh.max_degree() == 3);
    CHECK(sh.coefficient(2, 1) == 3.0);
    const auto sc = p.scaled_arguments(2.0, 0.5);
    CHECK(sc.coefficient(1, 1) == 3.0);
    CHECK(sc.coefficient(0, 2) == -0.25);
    CHECK((p + p * -1.0).is_zero());
  }

  TEST_CASE("weierstrass split examples") {
    SUBCASE("constant") {
      const auto s = weierstrass_split(BivariatePoly::constant(1.0));
      CHECK(s.U0 == UnivariatePoly({1.0}));
      CHECK(s.Uhat.is_zero());
    }
    SUBCASE("1 + x y") {
      const BivariatePoly U(BivariatePoly::Terms{{{0, 0}, 1.0}, {{1, 1}, 1.0}}, 2);
      const auto s = weierstrass_split(U);
      CHECK(s.U0 == UnivariatePoly({1.0}));
      CHECK(s.Uhat.terms() == BivariatePoly::Terms{{{2, 0}, 1.0}});
    }
    SUBCASE("2 + 3 y + x y^2") {
      const BivariatePoly U(BivariatePoly::Terms{{{0, 0}, 2.0}, {{0, 1}, 3.0}, {{1, 2}, 1.0}}, 3);
      const auto s = weierstrass_split(U);
      CHECK(s.U0 == UnivariatePoly({2.0}));
      CHECK(s.Uhat.terms() == BivariatePoly::Terms{{{1, 0}, 3.0}, {{2, 1}, 1.0}});
      CHECK(weierstrass_reconstructs(U, s));
      CHECK(reconstruct(s) == times_x(U));
    }
  }

  TEST_CASE("property: weierstrass reconstruction is exact up to degree 12") {
    Gen gen(20240601);
    for (int n = 0; n < 500; ++n) {
      const int d = gen.integer(0, 12);
      const BivariatePoly U = gen.bivariate(d, gen.uniform(0.1, 0.9));
      const auto s = weierstrass_split(U);
      REQUIRE(reconstruct(s) == times_x(U));
      REQUIRE(weierstrass_reconstructs(U, s));
      for (int i = 0; i <= d; ++i) REQUIRE(s.U0.coefficient(i) == U.coefficient(i, 0));
    }
  }

  TEST_CASE("property: reconstruction detects a perturbed split") {
    Gen gen(7);
    for (int n = 0; n < 100; ++n) {
      const BivariatePoly U = gen.bivariate(gen.integer(1, 12), 0.7);
      auto s = weierstrass_split(U);
      auto c = s.U0.coefficients();
      c.push_back(0.0);
      c[0] += 1.0;
      s.U0 = UnivariatePoly(c);
      REQUIRE_FALSE(weierstrass_reconstructs(U, s));
    }
  }

  TEST_CASE("property: evaluation agrees with direct monomial sums") {
    Gen gen(11);
    for (int n = 0; n < 200; ++n) {
      const BivariatePoly p = gen.bivariate(gen.integer(0, 10));
      const double x = gen.uniform(-1.2, 1.2), y = gen.uniform(-1.2, 1.2);
      double direct = 0.0;
      for (const auto& [e, c] : p.terms()) direct += c * std::pow(x, e.first) * std::pow(y, e.second);
      REQUIRE(p(x, y) == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("property: json round trip is exact") {
    Gen gen(5);
    for (int n = 0; n < 100; ++n) {
      const BivariatePoly p = gen.bivariate(gen.integer(0, 12));
      const auto back = nlohmann::json::parse(nlohmann::json(p).dump()).get<BivariatePoly>();
      REQUIRE(back == p);
      const UnivariatePoly u = p.at_y_zero();
      REQUIRE(nlohmann::json::parse(nlohmann::json(u).dump()).get<UnivariatePoly>() == u);
    }
  }
}
