#pragma once

/*
 * Adaptive Runge-Kutta integration with the Dormand-Prince 5(4) pair,
 * PI step-size control and the 4th-order continuous extension used to
 * localize events between accepted steps.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "loudsn/errors.hpp"
#include "loudsn/types.hpp"

namespace loudsn {

template <std::size_t N>
using StateN = std::array<double, N>;

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 1'000'000;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  // State sup-norm above which the orbit is declared to escape.
  double blowup_norm = 1e8;
  // Elapsed-time cap for event searches; +inf disables it.
  double t_max = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ParameterError("integrator: tolerances must be positive");
    if (!(initial_step > 0.0) || !(min_step > 0.0) || !(min_step < initial_step))
      throw ParameterError("integrator: need 0 < min_step < initial_step");
    if (max_steps == 0) throw ParameterError("integrator: max_steps must be positive");
  }
};

enum class OrbitStatus { EventHit, MaxSteps, Blowup, StepUnderflow, TimeLimit, Completed };

inline std::string_view to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::EventHit: return "EVENT_HIT";
    case OrbitStatus::MaxSteps: return "MAX_STEPS";
    case OrbitStatus::Blowup: return "BLOWUP";
    case OrbitStatus::StepUnderflow: return "STEP_UNDERFLOW";
    case OrbitStatus::TimeLimit: return "TIME_LIMIT";
    case OrbitStatus::Completed: return "COMPLETED";
  }
  return "?";
}

class IntegrationError : public Error {
 public:
  IntegrationError(OrbitStatus status, const std::string& what)
      : Error(what + " (" + std::string(to_string(status)) + ")"), status_(status) {}
  OrbitStatus status() const { return status_; }

 private:
  OrbitStatus status_;
};

enum class Direction { Any, Up, Down };

template <std::size_t N>
struct EventSpecN {
  std::function<double(const StateN<N>&)> function;
  Direction direction = Direction::Any;
  double refinement_tol = 1e-12;  // in time
  int count = 1;                  // stop at this matching crossing

  void validate() const {
    if (!function) throw ParameterError("event: missing event function");
    if (!(refinement_tol > 0.0)) throw ParameterError("event: refinement_tol must be positive");
    if (count < 1) throw ParameterError("event: count must be >= 1");
  }
};

// Planar event specification; the event function sees the state as Vec2.
struct EventSpec {
  std::function<double(Vec2)> function;
  Direction direction = Direction::Any;
  double refinement_tol = 1e-12;
  int count = 1;
};

struct Orbit {
  std::vector<double> times;
  std::vector<Vec2> states;
  std::optional<Vec2> event_state;
  std::optional<double> event_time;
  OrbitStatus status = OrbitStatus::MaxSteps;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

// CSV with columns t,c1,c2 and a trailing "# status=<...> event_t=<...>" line.
void write_orbit_csv(std::ostream& os, const Orbit& orbit);

template <std::size_t N>
struct SpanResult {
  StateN<N> state{};
  double t = 0.0;
  OrbitStatus status = OrbitStatus::Completed;
  std::size_t steps = 0;
  std::vector<double> times;  // filled when recording
  std::vector<StateN<N>> states;
};

namespace detail {

// Dormand & Prince (1980) coefficients.
struct DP54 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

// Continuous extension on one accepted step [t, t + h].
template <std::size_t N>
struct DenseStep {
  double t = 0.0, h = 0.0;
  std::array<StateN<N>, 5> r{};

  StateN<N> at(double theta) const {
    const double th1 = 1.0 - theta;
    StateN<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])));
    return y;
  }
};

template <std::size_t N>
double sup_norm(const StateN<N>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

template <std::size_t N>
bool all_finite(const StateN<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

// Stepper state shared by the drivers. `rhs(t, y)` returns dy/dt.
template <std::size_t N, class Rhs>
class Stepper {
 public:
  Stepper(const Rhs& rhs, double t0, const StateN<N>& y0, double direction, const IntegratorConfig& cfg)
      : rhs_(rhs), cfg_(cfg), dir_(direction), t_(t0), y_(y0) {
    k1_ = rhs_(t_, y_);
    h_ = std::min(cfg_.initial_step, cfg_.max_step);
  }

  double t() const { return t_; }
  const StateN<N>& y() const { return y_; }
  const DenseStep<N>& dense() const { return dense_; }
  std::size_t rejected() const { return rejected_; }

  // Attempts steps until one is accepted, never passing t_stop.
  // Returns the failure status, or nullopt on success.
  std::optional<OrbitStatus> advance(double t_stop) {
    using C = DP54;
    bool last_rejected = false;
    while (true) {
      double h = std::min(h_, cfg_.max_step);
      const double remaining = dir_ * (t_stop - t_);
      bool hits_stop = false;
      if (h >= remaining) {
        h = remaining;
        hits_stop = true;
      }
      if (h < cfg_.min_step && !hits_stop) return OrbitStatus::StepUnderflow;
      const double sh = dir_ * h;

      StateN<N> tmp, k2, k3, k4, k5, k6, k7, y1;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + sh * C::a21 * k1_[i];
      k2 = rhs_(t_ + C::c2 * sh, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + sh * (C::a31 * k1_[i] + C::a32 * k2[i]);
      k3 = rhs_(t_ + C::c3 * sh, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + sh * (C::a41 * k1_[i] + C::a42 * k2[i] + C::a43 * k3[i]);
      k4 = rhs_(t_ + C::c4 * sh, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + sh * (C::a51 * k1_[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
      k5 = rhs_(t_ + C::c5 * sh, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y_[i] + sh * (C::a61 * k1_[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] + C::a65 * k5[i]);
      k6 = rhs_(t_ + sh, tmp);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y_[i] + sh * (C::a71 * k1_[i] + C::a73 * k3[i] + C::a74 * k4[i] + C::a75 * k5[i] + C::a76 * k6[i]);
      const double t1 = hits_stop ? t_stop : t_ + sh;
      k7 = rhs_(t1, y1);

      double err = 0.0;
      bool finite = all_finite<N>(y1) && all_finite<N>(k7);
      if (finite) {
        for (std::size_t i = 0; i < N; ++i) {
          const double e = sh * (C::e1 * k1_[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] + C::e6 * k6[i] +
                                 C::e7 * k7[i]);
          const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
          err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);
        finite = std::isfinite(err);
      }
      if (!finite) {
        // Overflow inside the step: shrink hard and retry.
        ++rejected_;
        h_ = 0.1 * h;
        last_rejected = true;
        if (h_ < cfg_.min_step) return OrbitStatus::StepUnderflow;
        continue;
      }

      constexpr double kSafe = 0.9, kBeta = 0.04, kExpo = 0.2 - kBeta * 0.75;
      constexpr double kFacMin = 0.2, kFacMax = 10.0;
      if (err <= 1.0) {
        double fac = kSafe * std::pow(std::max(err, 1e-10), -kExpo) * std::pow(err_old_, kBeta);
        fac = std::clamp(fac, kFacMin, kFacMax);
        if (last_rejected) fac = std::min(fac, 1.0);
        err_old_ = std::max(err, 1e-4);

        dense_.t = t_;
        dense_.h = sh;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = y1[i] - y_[i];
          const double bspl = sh * k1_[i] - dy;
          dense_.r[0][i] = y_[i];
          dense_.r[1][i] = dy;
          dense_.r[2][i] = bspl;
          dense_.r[3][i] = dy - sh * k7[i] - bspl;
          dense_.r[4][i] = sh * (C::d1 * k1_[i] + C::d3 * k3[i] + C::d4 * k4[i] + C::d5 * k5[i] + C::d6 * k6[i] +
                                 C::d7 * k7[i]);
        }
        t_ = t1;
        y_ = y1;
        k1_ = k7;
        if (!hits_stop) h_ = h * fac;
        return std::nullopt;
      }
      ++rejected_;
      const double fac = std::max(kFacMin, kSafe * std::pow(err, -kExpo));
      h_ = h * fac;
      last_rejected = true;
      if (h_ < cfg_.min_step) return OrbitStatus::StepUnderflow;
    }
  }

 private:
  const Rhs& rhs_;
  IntegratorConfig cfg_;
  double dir_;
  double t_;
  StateN<N> y_;
  StateN<N> k1_{};
  double h_ = 0.0;
  double err_old_ = 1e-4;
  std::size_t rejected_ = 0;
  DenseStep<N> dense_;
};

// One DP5 step of signed size h from (t, y), without error control.
template <std::size_t N, class Rhs>
StateN<N> dp5_step(const Rhs& rhs, double t, const StateN<N>& y, double h) {
  using C = DP54;
  StateN<N> tmp, k1, k2, k3, k4, k5, k6, y1;
  k1 = rhs(t, y);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * C::a21 * k1[i];
  k2 = rhs(t + C::c2 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (C::a31 * k1[i] + C::a32 * k2[i]);
  k3 = rhs(t + C::c3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (C::a41 * k1[i] + C::a42 * k2[i] + C::a43 * k3[i]);
  k4 = rhs(t + C::c4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (C::a51 * k1[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
  k5 = rhs(t + C::c5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (C::a61 * k1[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] + C::a65 * k5[i]);
  k6 = rhs(t + h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    y1[i] = y[i] + h * (C::a71 * k1[i] + C::a73 * k3[i] + C::a74 * k4[i] + C::a75 * k5[i] + C::a76 * k6[i]);
  return y1;
}

inline bool matches(Direction d, double g0, double g1) {
  switch (d) {
    case Direction::Up: return g0 < 0.0 && g1 >= 0.0;
    case Direction::Down: return g0 > 0.0 && g1 <= 0.0;
    case Direction::Any: return (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
  }
  return false;
}

}  // namespace detail

// Integrates an autonomous system from y0 (at time 0) until the `count`-th
// matching crossing of event.function, refined by bisection on the
// continuous extension until the bracket is narrower than refinement_tol.
// Failures are reported through `status`, never thrown.
template <std::size_t N, class Field>
SpanResult<N> integrate_until_event_n(const Field& field, const StateN<N>& y0, const EventSpecN<N>& event,
                                      const IntegratorConfig& cfg, bool record = true) {
  cfg.validate();
  event.validate();
  auto rhs = [&field](double, const StateN<N>& y) { return field(y); };
  detail::Stepper<N, decltype(rhs)> stepper(rhs, 0.0, y0, 1.0, cfg);
  SpanResult<N> out;
  if (record) {
    out.times.push_back(0.0);
    out.states.push_back(y0);
  }
  double g_prev = event.function(y0);
  int hits = 0;
  for (std::size_t n = 0; n < cfg.max_steps; ++n) {
    const double t_stop = std::isfinite(cfg.t_max) ? cfg.t_max : std::numeric_limits<double>::max();
    if (auto fail = stepper.advance(t_stop)) {
      out.status = *fail;
      out.state = stepper.y();
      out.t = stepper.t();
      return out;
    }
    ++out.steps;
    const StateN<N>& y = stepper.y();
    const double g = event.function(y);
    if (detail::matches(event.direction, g_prev, g) && ++hits == event.count) {
      const auto& ds = stepper.dense();
      double lo = 0.0, hi = 1.0;
      const double glo = g_prev;
      while (std::abs(ds.h) * (hi - lo) > event.refinement_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = event.function(ds.at(mid));
        if ((gm > 0.0) == (glo > 0.0) && gm != 0.0)
          lo = mid;
        else
          hi = mid;
      }
      // The interpolant is one order less accurate than the step itself, so the
      // root is polished by Newton on fresh DP5 steps from the step start; the
      // slope comes from the interpolant.
      double theta = 0.5 * (lo + hi);
      StateN<N> state = ds.at(theta);
      constexpr double kDelta = 1e-4;
      for (int it = 0; it < 3; ++it) {
        const StateN<N> ys = detail::dp5_step<N>(rhs, ds.t, ds.r[0], theta * ds.h);
        if (!detail::all_finite<N>(ys)) break;
        state = ys;
        const double slope =
            (event.function(ds.at(theta + kDelta)) - event.function(ds.at(theta - kDelta))) / (2 * kDelta);
        const double gs = event.function(ys);
        if (gs == 0.0 || !(std::abs(slope) > 0.0)) break;
        const double next = theta - gs / slope;
        if (!(next > 0.0 && next <= 1.0)) break;
        const double moved = std::abs((next - theta) * ds.h);
        theta = next;
        if (moved <= 1e-3 * event.refinement_tol) {
          state = detail::dp5_step<N>(rhs, ds.t, ds.r[0], theta * ds.h);
          break;
        }
      }
      out.t = ds.t + theta * ds.h;
      out.state = state;
      out.status = OrbitStatus::EventHit;
      if (record && out.t > out.times.back()) {
        out.times.push_back(out.t);
        out.states.push_back(out.state);
      }
      return out;
    }
    g_prev = g;
    if (record) {
      out.times.push_back(stepper.t());
      out.states.push_back(y);
    }
    if (detail::sup_norm<N>(y) > cfg.blowup_norm) {
      out.status = OrbitStatus::Blowup;
      out.state = y;
      out.t = stepper.t();
      return out;
    }
    if (stepper.t() >= cfg.t_max) {
      out.status = OrbitStatus::TimeLimit;
      out.state = y;
      out.t = stepper.t();
      return out;
    }
  }
  out.status = OrbitStatus::MaxSteps;
  out.state = stepper.y();
  out.t = stepper.t();
  return out;
}

// Planar front end: time-stamped orbit with event metadata.
template <class Field>
Orbit integrate_until_event(const Field& field, Vec2 start, const EventSpec& event, const IntegratorConfig& cfg) {
  EventSpecN<2> ev{[&event](const StateN<2>& y) { return event.function(Vec2{y[0], y[1]}); }, event.direction,
                   event.refinement_tol, event.count};
  auto f = [&field](const StateN<2>& y) {
    const Vec2 v = field(Vec2{y[0], y[1]});
    return StateN<2>{v.first, v.second};
  };
  auto r = integrate_until_event_n<2>(f, StateN<2>{start.first, start.second}, ev, cfg, true);
  Orbit orbit;
  orbit.status = r.status;
  orbit.steps = r.steps;
  orbit.times = std::move(r.times);
  orbit.states.reserve(r.states.size());
  for (const auto& s : r.states) orbit.states.push_back({s[0], s[1]});
  if (r.status == OrbitStatus::EventHit) {
    orbit.event_time = r.t;
    orbit.event_state = Vec2{r.state[0], r.state[1]};
  }
  return orbit;
}

// Integrates dy/dt = rhs(t, y) from t0 to t1 (either direction).
template <std::size_t N, class Rhs>
SpanResult<N> integrate_span(const Rhs& rhs, double t0, double t1, const StateN<N>& y0, const IntegratorConfig& cfg,
                             bool record = false) {
  cfg.validate();
  SpanResult<N> out;
  out.state = y0;
  out.t = t0;
  if (t1 == t0) return out;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  detail::Stepper<N, Rhs> stepper(rhs, t0, y0, dir, cfg);
  if (record) {
    out.times.push_back(t0);
    out.states.push_back(y0);
  }
  for (std::size_t n = 0; n < cfg.max_steps; ++n) {
    if (auto fail = stepper.advance(t1)) {
      out.status = *fail;
      out.state = stepper.y();
      out.t = stepper.t();
      return out;
    }
    ++out.steps;
    if (record) {
      out.times.push_back(stepper.t());
      out.states.push_back(stepper.y());
    }
    if (detail::sup_norm<N>(stepper.y()) > cfg.blowup_norm) {
      out.status = OrbitStatus::Blowup;
      out.state = stepper.y();
      out.t = stepper.t();
      return out;
    }
    if (stepper.t() == t1) {
      out.status = OrbitStatus::Completed;
      out.state = stepper.y();
      out.t = t1;
      return out;
    }
  }
  out.status = OrbitStatus::MaxSteps;
  out.state = stepper.y();
  out.t = stepper.t();
  return out;
}

// Same engine with x as the independent variable; returns the state at x_end
// or throws IntegrationError (STEP_UNDERFLOW when the controller collapses near
// a near-singular integrand).
template <std::size_t N, class Rhs>
StateN<N> integrate_ode_in_x(const Rhs& rhs, double x_start, double x_end, const StateN<N>& state0,
                             const IntegratorConfig& cfg) {
  auto r = integrate_span<N>(rhs, x_start, x_end, state0, cfg, false);
  if (r.status != OrbitStatus::Completed)
    throw IntegrationError(r.status, "integration in x stopped at x = " + std::to_string(r.t));
  return r.state;
}

}  // namespace loudsn
