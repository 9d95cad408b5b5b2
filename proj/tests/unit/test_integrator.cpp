#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "loudsn/errors.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/integrator.hpp"
#include "oracles.hpp"

using namespace loudsn;

namespace {

Vec2 harmonic(Vec2 p) { return {-p.second, p.first}; }

double harmonic_period_error(double rel) {
  IntegratorConfig cfg{.rel_tol = rel, .abs_tol = rel * 1e-2};
  const Orbit o = integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Up}, cfg);
  return std::abs(*o.event_time - loudsn::testing::kTwoPi);
}

double exp_error(double rel) {
  IntegratorConfig cfg{.rel_tol = rel, .abs_tol = rel * 1e-2};
  const Orbit o = integrate_until_event([](Vec2 p) { return Vec2{p.first, 0.0}; }, {1.0, 0.0},
                                        {[](Vec2 p) { return p.first - std::numbers::e; }}, cfg);
  return std::abs(*o.event_time - 1.0);
}

double inverse_error(double rel) {
  IntegratorConfig cfg{.rel_tol = rel, .abs_tol = rel * 1e-2};
  const auto y = integrate_ode_in_x<1>([](double x, const StateN<1>& s) { return StateN<1>{-s[0] / x}; }, 1.0, 2.0,
                                       {1.0}, cfg);
  return std::abs(y[0] - 0.5);
}

void check_orbit_invariants(const Orbit& o) {
  REQUIRE(o.times.size() == o.states.size());
  for (std::size_t k = 1; k < o.times.size(); ++k) REQUIRE(o.times[k] > o.times[k - 1]);
  REQUIRE(o.event_time.has_value() == (o.status == OrbitStatus::EventHit));
  REQUIRE(o.event_state.has_value() == (o.status == OrbitStatus::EventHit));
}

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("harmonic oscillator returns after 2 pi") {
    const Orbit o = integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Up}, {});
    check_orbit_invariants(o);
    REQUIRE(o.status == OrbitStatus::EventHit);
    CHECK(std::abs(*o.event_time - loudsn::testing::kTwoPi) <= 1e-9);
    CHECK(std::abs(o.event_state->first - 1.0) <= 1e-9);
  }

  TEST_CASE("exponential reaches e at t = 1") {
    CHECK(exp_error(1e-10) <= 1e-10);
  }

  TEST_CASE("count selects the n-th matching crossing") {
    const Orbit o =
        integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Any, 1e-12, 3}, {});
    REQUIRE(o.status == OrbitStatus::EventHit);
    CHECK(*o.event_time == doctest::Approx(3 * std::numbers::pi).epsilon(1e-10));
    const Orbit down =
        integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Down, 1e-12, 1}, {});
    CHECK(*down.event_time == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  }

  TEST_CASE("Loud orbit crosses left of the centre, matching fixed-step RK4") {
    const LoudParams a{-0.5, 0.05};
    auto f = [&a](Vec2 p) { return eval_loud(a, p); };
    const Orbit o = integrate_until_event(f, {0.5, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Down}, {});
    REQUIRE(o.status == OrbitStatus::EventHit);
    CHECK(o.event_state->first < 0.0);
    // reference step ~10x finer than the adaptive steps taken
    const double h = *o.event_time / (10.0 * static_cast<double>(o.steps));
    const auto ref = loudsn::testing::rk4_first_down_crossing(f, {0.5, 0.0}, h);
    CHECK(ref.state.first < 0.0);
    CHECK(std::abs(ref.state.first - o.event_state->first) <= 1e-5);
    CHECK(std::abs(ref.time - *o.event_time) <= 1e-5);
  }

  TEST_CASE("integration in x") {
    const auto y = integrate_ode_in_x<1>([](double x, const StateN<1>& s) { return StateN<1>{-s[0] / x}; }, 1.0, 2.0,
                                         {1.0}, {});
    CHECK(std::abs(y[0] - 0.5) <= 1e-10);
    const auto t = integrate_ode_in_x<1>([](double x, const StateN<1>&) { return StateN<1>{1.0 / (x * x)}; }, 0.1,
                                         1.0, {0.0}, {});
    CHECK(std::abs(t[0] - 9.0) <= 1e-8);
    const auto back = integrate_ode_in_x<1>([](double x, const StateN<1>&) { return StateN<1>{1.0 / (x * x)}; }, 1.0,
                                            0.1, {9.0}, {});
    CHECK(std::abs(back[0]) <= 1e-8);
  }

  TEST_CASE("halving rel_tol never increases the error") {
    for (auto* err : {&harmonic_period_error, &exp_error, &inverse_error}) {
      double prev = err(1e-6);
      for (double rel = 5e-7; rel > 1e-12; rel /= 2) {
        const double e = err(rel);
        INFO("rel_tol=", rel, " error=", e, " previous=", prev);
        REQUIRE(e <= prev + 1e-15);
        prev = e;
      }
    }
  }

  TEST_CASE("event residual is bounded by the refinement tolerance") {
    const LoudParams a{-0.3, -0.1};
    auto f = [&a](Vec2 p) { return eval_loud(a, p); };
    for (double tol : {1e-6, 1e-9, 1e-12}) {
      auto g = [](Vec2 p) { return p.second - 0.05 * p.first; };
      const Orbit o = integrate_until_event(f, {0.4, 0.0}, {g, Direction::Any, tol, 2}, {});
      REQUIRE(o.status == OrbitStatus::EventHit);
      const Vec2 v = f(*o.event_state);
      const double rate = std::abs(v.second - 0.05 * v.first);
      CHECK(std::abs(g(*o.event_state)) <= 10.0 * tol * rate);
    }
  }

  TEST_CASE("time reversal recovers the start") {
    const LoudParams a{-0.5, 0.05};
    auto f = [&a](Vec2 p) { return eval_loud(a, p); };
    const Vec2 start{0.7, 0.0};
    const Orbit o = integrate_until_event(f, start, {[](Vec2 p) { return p.second; }, Direction::Down}, {});
    REQUIRE(o.status == OrbitStatus::EventHit);
    IntegratorConfig cfg;
    const auto back = integrate_span<2>(
        [&a](double, const StateN<2>& y) {
          const Vec2 v = eval_loud(a, {y[0], y[1]}, true);
          return StateN<2>{v.first, v.second};
        },
        0.0, *o.event_time, {o.event_state->first, o.event_state->second}, cfg);
    REQUIRE(back.status == OrbitStatus::Completed);
    CHECK(std::abs(back.state[0] - start.first) <= 1e-8 * start.first);
    CHECK(std::abs(back.state[1]) <= 1e-8 * start.first);
  }

  TEST_CASE("span integration backward in time") {
    const auto r = integrate_span<1>([](double, const StateN<1>& y) { return StateN<1>{y[0]}; }, 1.0, 0.0,
                                     {std::numbers::e}, {}, true);
    CHECK(r.status == OrbitStatus::Completed);
    CHECK(r.state[0] == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(r.times.size() >= 2);
    CHECK(r.times.front() == 1.0);
    CHECK(r.times.back() == 0.0);
  }

  TEST_CASE("failure statuses") {
    SUBCASE("blowup") {
      const Orbit o = integrate_until_event([](Vec2 p) { return Vec2{p.first * p.first, 0.0}; }, {1.0, 0.0},
                                            {[](Vec2 p) { return p.second - 1.0; }}, {});
      check_orbit_invariants(o);
      CHECK(o.status == OrbitStatus::Blowup);
      CHECK(o.times.back() < 1.0);
    }
    SUBCASE("max steps") {
      IntegratorConfig cfg;
      cfg.max_steps = 10;
      const Orbit o = integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.first - 5.0; }}, cfg);
      check_orbit_invariants(o);
      CHECK(o.status == OrbitStatus::MaxSteps);
    }
    SUBCASE("time limit") {
      IntegratorConfig cfg;
      cfg.t_max = 1.0;
      const Orbit o = integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.first - 5.0; }}, cfg);
      check_orbit_invariants(o);
      CHECK(o.status == OrbitStatus::TimeLimit);
      CHECK(o.times.back() == doctest::Approx(1.0));
    }
    SUBCASE("step underflow across a non-integrable singularity") {
      try {
        integrate_ode_in_x<1>([](double x, const StateN<1>&) { return StateN<1>{1.0 / (x - 0.5)}; },
                              0.0, 1.0, {0.0}, {});
        FAIL("expected an integration error");
      } catch (const IntegrationError& e) {
        CHECK(e.status() == OrbitStatus::StepUnderflow);
      }
    }
  }

  TEST_CASE("configuration validation") {
    IntegratorConfig bad;
    bad.rel_tol = -1.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    IntegratorConfig steps;
    steps.min_step = steps.initial_step;
    CHECK_THROWS_AS(steps.validate(), ParameterError);
    CHECK_THROWS_AS(integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Up, 1e-12, 0},
                                          {}),
                    ParameterError);
    CHECK_THROWS_AS(integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Up, 0.0, 1},
                                          {}),
                    ParameterError);
  }

  TEST_CASE("orbit csv") {
    const Orbit o = integrate_until_event(harmonic, {1.0, 0.0}, {[](Vec2 p) { return p.second; }, Direction::Down}, {});
    std::ostringstream os;
    write_orbit_csv(os, o);
    const std::string s = os.str();
    CHECK(s.rfind("t,c1,c2\n0,1,0\n", 0) == 0);
    CHECK(s.find("# status=EVENT_HIT event_t=3.14159") != std::string::npos);
    CHECK(to_string(OrbitStatus::StepUnderflow) == "STEP_UNDERFLOW");
  }
}
