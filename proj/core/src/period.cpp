#include "loudsn/period.hpp"

#include <algorithm>
#include <cmath>

#include "loudsn/errors.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/parallel.hpp"

namespace loudsn {

namespace {

void require_u0(double u0) {
  if (!(u0 > 0.0 && u0 < 1.0)) throw ParameterError("period: u0 must lie in (0, 1)");
}

HalfPeriod transit_to_axis(const LoudParams& a, double u_start, bool reversed, const PeriodConfig& cfg) {
  if (!std::isfinite(a.D) || !std::isfinite(a.F)) throw ParameterError("period: non-finite parameters");
  auto field = [&a, reversed](Vec2 p) { return eval_loud(a, p, reversed); };
  const EventSpec ev{[](Vec2 p) { return p.second; }, Direction::Down, 1e-13, 1};
  const Orbit orbit = integrate_until_event(field, {u_start, 0.0}, ev, cfg.ode);
  if (orbit.status != OrbitStatus::EventHit)
    throw OrbitNotClosed(orbit.status, "ORBIT_NOT_CLOSED: no return to v = 0 from u = " + std::to_string(u_start) +
                                           " (" + std::string(to_string(orbit.status)) + ")");
  return {*orbit.event_time, orbit.event_state->first};
}

double period_only(const LoudParams& a, double u0, const PeriodConfig& cfg) {
  return 2.0 * half_period(a, u0, cfg).time;
}

}  // namespace

HalfPeriod half_period(const LoudParams& a, double u0, const PeriodConfig& cfg) {
  require_u0(u0);
  return transit_to_axis(a, u0, false, cfg);
}

HalfPeriod half_period_reversed(const LoudParams& a, double u_start, const PeriodConfig& cfg) {
  return transit_to_axis(a, u_start, true, cfg);
}

double dperiod_step(double u0) { return std::min({1e-3, (1.0 - u0) / 50.0, u0 / 50.0}); }

DerivativeEstimate dperiod(const LoudParams& a, double u0, const PeriodConfig& cfg) {
  require_u0(u0);
  return richardson_central([&](double u) { return period_only(a, u, cfg); }, u0, dperiod_step(u0),
                            cfg.consistency_rel);
}

PeriodSample orbit_period(const LoudParams& a, double u0, const PeriodConfig& cfg, bool with_derivative) {
  PeriodSample out;
  out.u0 = u0;
  out.period = period_only(a, u0, cfg);

  auto field = [&a](Vec2 p) { return eval_loud(a, p); };
  const EventSpec up{[](Vec2 p) { return p.second; }, Direction::Up, 1e-13, 1};
  const Orbit full = integrate_until_event(field, {u0, 0.0}, up, cfg.ode);
  if (full.status != OrbitStatus::EventHit)
    throw OrbitNotClosed(full.status, "ORBIT_NOT_CLOSED: no full return from u0 = " + std::to_string(u0));
  out.full_return_period = *full.event_time;

  auto rhs = [&a](double, const StateN<2>& y) {
    const Vec2 f = eval_loud(a, {y[0], y[1]});
    return StateN<2>{f.first, f.second};
  };
  const auto turn = integrate_span<2>(rhs, 0.0, out.period, StateN<2>{u0, 0.0}, cfg.ode);
  if (turn.status != OrbitStatus::Completed)
    throw OrbitNotClosed(turn.status, "ORBIT_NOT_CLOSED: full-period integration failed");
  out.closure_residual = std::hypot(turn.state[0] - u0, turn.state[1]);

  if (with_derivative) {
    const auto d = dperiod(a, u0, cfg);
    out.dperiod_du0 = d.value;
    out.derivative_consistent = d.consistent;
  }
  return out;
}

std::vector<PeriodCell> period_scan(const LoudParams& a, std::span<const double> u0_grid, const PeriodConfig& cfg,
                                    std::size_t workers) {
  std::vector<PeriodCell> cells(u0_grid.size());
  parallel_for(
      cells.size(),
      [&](std::size_t i) {
        PeriodCell& c = cells[i];
        c.a = a;
        c.sample.u0 = u0_grid[i];
        try {
          c.sample = orbit_period(a, u0_grid[i], cfg);
          c.status = "OK";
        } catch (const std::exception& e) {
          c.status = e.what();
        }
      },
      workers);
  return cells;
}

std::string_view to_string(CriticalKind k) { return k == CriticalKind::Min ? "MIN" : "MAX"; }

std::vector<double> critical_search_grid(double lo, double hi, const CriticalSearchOptions& opts) {
  if (!(lo < hi)) return {};
  const int n = std::max(opts.grid_points, 3);
  const double q = std::pow(opts.min_gap_fraction, 1.0 / (n - 2));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  double gap = 1.0;
  for (int k = 0; k < n - 1; ++k, gap *= q) grid.push_back(hi - (hi - lo) * gap);
  grid.front() = lo;
  grid.push_back(hi);
  return grid;
}

CriticalPeriodReport find_critical_periods(const std::function<double(double)>& period, double lo, double hi,
                                           const CriticalSearchOptions& opts) {
  CriticalPeriodReport report;
  if (!(lo < hi)) return report;
  if (!(lo > 0.0 && hi < 1.0)) throw ParameterError("critical periods: interval must lie inside (0, 1)");

  auto sign_at = [&](double u) {
    try {
      return richardson_central(period, u, dperiod_step(u), opts.consistency_rel).certified_sign();
    } catch (const OrbitNotClosed&) {
      return 0;
    }
  };

  const auto grid = critical_search_grid(lo, hi, opts);
  std::vector<int> signs(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    signs[i] = sign_at(grid[i]);
    if (signs[i] == 0) ++report.uncertified_points;
  }

  std::size_t prev = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (signs[i] == 0) continue;
    if (prev < grid.size() && signs[prev] != signs[i]) {
      double l = grid[prev], r = grid[i];
      const int sl = signs[prev], sr = signs[i];
      bool resolved = true;
      while (r - l > opts.bracket_width) {
        const double m = 0.5 * (l + r);
        const int sm = sign_at(m);
        if (sm == 0) {
          resolved = false;
          break;
        }
        (sm == sl ? l : r) = m;
      }
      if (resolved) {
        const double u = 0.5 * (l + r);
        report.found.push_back({u, period(u), sl > 0 && sr < 0 ? CriticalKind::Max : CriticalKind::Min, {l, r}});
      } else {
        report.unresolved.emplace_back(l, r);
      }
    }
    prev = i;
  }
  return report;
}

CriticalPeriodReport critical_periods(const LoudParams& a, double lo, double hi, const PeriodConfig& cfg,
                                      const CriticalSearchOptions& opts) {
  CriticalSearchOptions o = opts;
  o.consistency_rel = cfg.consistency_rel;
  return find_critical_periods([&](double u) { return period_only(a, u, cfg); }, lo, hi, o);
}

std::vector<double> open_grid(double centre, double delta, int n) {
  if (n < 1) throw ParameterError("grid size must be >= 1");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(centre - delta + 2.0 * delta * (i + 1) / (n + 1));
  return g;
}

BoundaryReport boundary_monotonicity_check(double D0, double delta, const BoundaryCheckOptions& opts,
                                           const PeriodConfig& cfg, std::size_t workers) {
  if (!(D0 > -1.0 && D0 < 0.0)) throw ParameterError("boundary check: D0 must lie in (-1, 0)");
  if (!(delta > 0.0)) throw ParameterError("boundary check: delta must be positive");
  if (!(opts.window_lo > 0.0 && opts.window_hi < 1.0))
    throw ParameterError("boundary check: window must lie inside (0, 1)");
  const bool empty_window = !(opts.window_lo < opts.window_hi);
  if (opts.window_points < 2) throw ParameterError("boundary check: need at least 2 window points");

  BoundaryReport report;
  report.D0 = D0;
  report.delta = delta;
  report.options = opts;
  for (double D : open_grid(D0, delta, opts.grid_D))
    for (double F : open_grid(0.0, delta, opts.grid_F)) {
      BoundaryCell cell;
      cell.a = {D, F};
      require_admissible(cell.a);
      report.cells.push_back(std::move(cell));
    }

  parallel_for(
      report.cells.size(),
      [&](std::size_t idx) {
        BoundaryCell& cell = report.cells[idx];
        if (empty_window) return;
        const int n = opts.window_points;
        bool plus = false, minus = false;
        try {
          for (int k = 0; k < n; ++k) {
            const double u = opts.window_lo + (opts.window_hi - opts.window_lo) * k / (n - 1);
            cell.u0.push_back(u);
            cell.dperiod.push_back(dperiod(cell.a, u, cfg));
            const int s = cell.dperiod.back().certified_sign();
            plus |= s > 0;
            minus |= s < 0;
            cell.inconclusive |= s == 0;
          }
          if (opts.search_critical)
            cell.critical = critical_periods(cell.a, opts.window_lo, opts.window_hi, cfg, opts.critical);
          cell.inconclusive |= !cell.critical.unresolved.empty();
        } catch (const std::exception& e) {
          cell.error = e.what();
          cell.inconclusive = true;
        }
        cell.violation = (plus && minus) || !cell.critical.found.empty();
        cell.sign = plus && !minus ? 1 : (minus && !plus ? -1 : 0);
      },
      workers);

  for (const auto& c : report.cells) {
    report.violations += c.violation ? 1 : 0;
    report.inconclusive += c.inconclusive ? 1 : 0;
    report.critical_found += static_cast<int>(c.critical.found.size());
  }
  return report;
}

void to_json(nlohmann::json& j, const CriticalPeriod& c) {
  j = nlohmann::json{{"u0", c.u0},
                     {"period", c.period},
                     {"kind", to_string(c.kind)},
                     {"bracket", {c.bracket.first, c.bracket.second}}};
}

void to_json(nlohmann::json& j, const CriticalPeriodReport& r) {
  j = nlohmann::json{{"critical_periods", r.found}, {"uncertified_points", r.uncertified_points}};
  auto& un = j["unresolved"] = nlohmann::json::array();
  for (const auto& [l, h] : r.unresolved) un.push_back({l, h});
}

void to_json(nlohmann::json& j, const BoundaryReport& r) {
  j = nlohmann::json{{"D0", r.D0},
                     {"delta", r.delta},
                     {"window", {r.options.window_lo, r.options.window_hi}},
                     {"violations", r.violations},
                     {"inconclusive", r.inconclusive},
                     {"critical_found", r.critical_found}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json cj{{"D", c.a.D},
                      {"F", c.a.F},
                      {"sign", c.sign},
                      {"violation", c.violation},
                      {"inconclusive", c.inconclusive},
                      {"critical", c.critical}};
    auto& samples = cj["dperiod"] = nlohmann::json::array();
    for (std::size_t k = 0; k < c.u0.size() && k < c.dperiod.size(); ++k)
      samples.push_back({{"u0", c.u0[k]}, {"value", c.dperiod[k].value}, {"consistent", c.dperiod[k].consistent}});
    if (!c.error.empty()) cj["error"] = c.error;
    cells.push_back(std::move(cj));
  }
}

}  // namespace loudsn
