#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "loudsn/dulac.hpp"
#include "loudsn/errors.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/io.hpp"
#include "loudsn/parallel.hpp"
#include "loudsn/period.hpp"
#include "loudsn/verify.hpp"

namespace loudsn::cli {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

void require_finite(std::initializer_list<double> values, const std::string& what) {
  for (double v : values) require(std::isfinite(v), what + " must be finite");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  out.back() = hi;
  return out;
}

std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

json config_of(const PeriodScanArgs& a) {
  return {{"command", "period-scan"}, {"D", a.D},           {"F", a.F},
          {"u0_min", a.u0_min},       {"u0_max", a.u0_max}, {"n", a.n},
          {"rel_tol", a.rel_tol},     {"abs_tol", a.abs_tol}};
}

json config_of(const DulacScanArgs& a) {
  json j{{"command", "dulac-scan"}, {"D_grid", a.D_grid}, {"F_grid", a.F_grid}, {"s_grid", a.s_grid},
         {"degree", a.degree},      {"normalize", a.normalize}, {"eps0", a.eps0}, {"s0", a.s0},
         {"s_floor", a.s_floor},    {"fit", a.fit}};
  j["eps"] = a.eps ? json(*a.eps) : json(nullptr);
  return j;
}

json config_of(const VerifyArgs& a) {
  return {{"command", "verify"}, {"checks", a.checks}, {"points", a.points}, {"seed", a.seed}};
}

json config_of(const CriticalArgs& a) {
  return {{"command", "critical-periods"},
          {"D0", a.D0},
          {"delta", a.delta},
          {"window", {a.window_lo, a.window_hi}},
          {"grid", a.grid},
          {"window_points", a.window_points}};
}

json config_of(const OrbitArgs& a) {
  return {{"command", "orbit"}, {"D", a.D}, {"F", a.F}, {"u0", a.u0}, {"periods", a.periods}};
}

int period_scan(const PeriodScanArgs& a, std::ostream& out) {
  require_finite({a.D, a.F, a.u0_min, a.u0_max}, "period-scan parameters");
  require_admissible({a.D, a.F});
  require(a.u0_min > 0.0 && a.u0_min <= a.u0_max && a.u0_max < 1.0, "period-scan: need 0 < u0-min <= u0-max < 1");
  require(a.n >= 1, "period-scan: --n must be at least 1");
  require(a.n == 1 || a.u0_min < a.u0_max, "period-scan: u0-min == u0-max needs --n 1");
  PeriodConfig cfg;
  cfg.ode.rel_tol = a.rel_tol;
  cfg.ode.abs_tol = a.abs_tol;
  cfg.ode.validate();
  const auto grid = linspace(a.u0_min, a.u0_max, a.n);
  const auto cells = loudsn::period_scan({a.D, a.F}, grid, cfg, default_worker_count());
  write_period_csv(out, config_of(a), cells);
  const bool all_ok = std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.status == "OK"; });
  return all_ok ? kExitOk : kExitPartial;
}

int dulac_scan(const DulacScanArgs& a, std::ostream& csv, std::ostream* fit_json) {
  require(!a.D_grid.empty() && !a.F_grid.empty() && !a.s_grid.empty(), "dulac-scan: grids must be nonempty");
  require(a.degree >= 2 && a.degree <= 40, "dulac-scan: --degree must lie in [2, 40]");
  std::vector<LoudParams> params;
  for (double D : a.D_grid)
    for (double F : a.F_grid) {
      require_finite({D, F}, "dulac-scan grid values");
      require_admissible({D, F});
      params.push_back({D, F});
    }
  for (double s : a.s_grid) require(std::isfinite(s) && s > 0.0, "dulac-scan: s values must be positive");
  DulacConfig cfg;
  cfg.eps0 = a.eps0;
  cfg.s0 = a.s0;
  cfg.s_floor = a.s_floor;
  require(a.eps0 > 0.0 && a.s0 > 0.0 && a.s_floor > 0.0, "dulac-scan: eps0, s0, s_floor must be positive");
  if (a.fit) {
    require(fit_json != nullptr, "dulac-scan: --fit needs an output path");
    require(a.s_grid.size() >= 4, "dulac-scan: --fit needs at least 4 s values");
  }

  const int degree = a.degree;
  UnfoldingFamily family = a.normalize
                               ? UnfoldingFamily([degree](const LoudParams& p) {
                                   return build_normalized_loud_unfolding(p, degree);
                                 })
                               : UnfoldingFamily([degree](const LoudParams& p) { return build_loud_unfolding(p, degree); });
  std::function<double(const LoudParams&)> eps_rule;
  if (a.eps) {
    const double e = *a.eps;
    eps_rule = [e](const LoudParams&) { return e; };
  }
  const std::size_t workers = default_worker_count();
  const SlopeScan scan = slope_scan(family, params, a.s_grid, eps_rule, cfg, workers);
  write_dulac_csv(csv, config_of(a), scan);
  bool all_ok = std::all_of(scan.rows.begin(), scan.rows.end(), [](const auto& r) { return r.status == "OK"; });

  if (a.fit) {
    std::vector<json> fits(params.size());
    parallel_for(
        params.size(),
        [&](std::size_t k) {
          json entry{{"D", params[k].D}, {"F", params[k].F}};
          try {
            Unfolding unf = family(params[k]);
            if (eps_rule) unf = unf.with_eps(eps_rule(params[k]));
            entry["fit"] = fit_c0_c1(unf, a.s_grid, cfg);
            entry["status"] = "OK";
          } catch (const std::exception& e) {
            entry["status"] = e.what();
          }
          fits[k] = std::move(entry);
        },
        workers);
    for (const auto& f : fits) all_ok = all_ok && f["status"] == "OK";
    *fit_json << config_header(config_of(a)) << '\n' << json{{"fits", fits}}.dump(2) << '\n';
  }
  return all_ok ? kExitOk : kExitPartial;
}

int verify(const VerifyArgs& a, std::ostream& out) {
  require(a.points >= 1, "verify: --points must be at least 1");
  require(!a.checks.empty(), "verify: --checks must name at least one check");
  for (const auto& c : a.checks)
    require(c == "pullback" || c == "integral" || c == "weierstrass", "verify: unknown check '" + c + "'");

  const auto grid = default_verification_grid();
  SweepOptions opts;
  opts.points = a.points;
  opts.seed = a.seed;
  opts.workers = default_worker_count();

  out << config_header(config_of(a)) << '\n';
  out << std::left << std::setw(12) << "check" << std::setw(8) << "cells" << std::setw(10) << "samples"
      << std::setw(26) << "max_residual" << std::setw(12) << "threshold" << std::setw(10) << "failures"
      << "result\n";
  bool all = true;
  for (const auto& name : a.checks) {
    CheckResult r;
    if (name == "pullback") r = pullback_sweep(grid, opts);
    else if (name == "integral") r = integral_drift_sweep(grid, opts);
    else r = weierstrass_sweep(10 * a.points, 12, a.seed);
    all = all && r.passed;
    out << std::left << std::setw(12) << r.name << std::setw(8) << r.cells << std::setw(10) << r.samples
        << std::setw(26) << format_number(r.max_residual) << std::setw(12) << short_number(r.threshold)
        << std::setw(10) << r.failures << (r.passed ? "PASS" : "FAIL") << '\n';
  }
  return all ? kExitOk : kExitCheckFailed;
}

int critical_periods(const CriticalArgs& a, std::ostream& out) {
  require_finite({a.D0, a.delta, a.window_lo, a.window_hi}, "critical-periods parameters");
  require(a.grid >= 1 && a.window_points >= 2, "critical-periods: --grid >= 1 and --window-points >= 2");
  BoundaryCheckOptions opts;
  opts.grid_D = a.grid;
  opts.grid_F = a.grid;
  opts.window_points = a.window_points;
  opts.window_lo = a.window_lo;
  opts.window_hi = a.window_hi;
  const BoundaryReport report = boundary_monotonicity_check(a.D0, a.delta, opts, {}, default_worker_count());
  out << config_header(config_of(a)) << '\n' << json(report).dump(2) << '\n';
  return report.inconclusive > 0 ? kExitPartial : kExitOk;
}

int orbit(const OrbitArgs& a, std::ostream& out) {
  require_finite({a.D, a.F, a.u0, a.periods}, "orbit parameters");
  require_admissible({a.D, a.F});
  require(a.u0 > 0.0 && a.u0 < 1.0, "orbit: need 0 < u0 < 1");
  require(a.periods > 0.0 && a.periods <= 100.0, "orbit: need 0 < periods <= 100");
  const LoudParams p{a.D, a.F};
  const PeriodConfig cfg;
  const PeriodSample sample = orbit_period(p, a.u0, cfg, false);
  const auto span = integrate_span<2>(
      [&p](double, const StateN<2>& y) {
        const Vec2 v = eval_loud(p, {y[0], y[1]});
        return StateN<2>{v.first, v.second};
      },
      0.0, a.periods * sample.period, StateN<2>{a.u0, 0.0}, cfg.ode, true);
  Orbit o;
  o.times = span.times;
  for (const auto& s : span.states) o.states.push_back({s[0], s[1]});
  o.status = span.status;
  o.steps = span.steps;
  out << config_header(config_of(a)) << '\n';
  write_orbit_csv(out, o);
  return o.status == OrbitStatus::Completed ? kExitOk : kExitPartial;
}

namespace {

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw ParameterError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on the Loud family of quadratic centres"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  PeriodScanArgs ps;
  std::string ps_out;
  auto* ps_cmd = app.add_subcommand("period-scan", "Period function of L_a along the section v = 0");
  ps_cmd->add_option("--D", ps.D, "parameter D")->required();
  ps_cmd->add_option("--F", ps.F, "parameter F")->required();
  ps_cmd->add_option("--u0-min", ps.u0_min, "smallest starting point")->capture_default_str();
  ps_cmd->add_option("--u0-max", ps.u0_max, "largest starting point")->capture_default_str();
  ps_cmd->add_option("--n", ps.n, "number of grid points")->capture_default_str();
  ps_cmd->add_option("--rel-tol", ps.rel_tol, "integrator relative tolerance")->capture_default_str();
  ps_cmd->add_option("--abs-tol", ps.abs_tol, "integrator absolute tolerance")->capture_default_str();
  ps_cmd->add_option("--out", ps_out, "output CSV path (default stdout)");

  DulacScanArgs ds;
  std::string ds_out, ds_fit;
  double ds_eps = 0.0;
  auto* ds_cmd = app.add_subcommand("dulac-scan", "Dulac time and map across parameter and section grids");
  ds_cmd->add_option("--D-grid", ds.D_grid, "comma-separated D values")->required()->delimiter(',');
  ds_cmd->add_option("--F-grid", ds.F_grid, "comma-separated F values")->required()->delimiter(',');
  ds_cmd->add_option("--s-grid", ds.s_grid, "comma-separated section offsets")->required()->delimiter(',');
  ds_cmd->add_option("--degree", ds.degree, "truncation degree of U")->capture_default_str();
  ds_cmd->add_flag("--normalize", ds.normalize, "rescale inside the convergence disc of U");
  auto* eps_opt = ds_cmd->add_option("--eps", ds_eps, "override eps for every cell");
  ds_cmd->add_option("--eps0", ds.eps0, "bound on |eps|")->capture_default_str();
  ds_cmd->add_option("--s0", ds.s0, "bound on s")->capture_default_str();
  ds_cmd->add_option("--s-floor", ds.s_floor, "smallest admissible s")->capture_default_str();
  ds_cmd->add_option("--fit", ds_fit, "write the c0/c1 fit JSON to this path");
  ds_cmd->add_option("--out", ds_out, "output CSV path (default stdout)");

  VerifyArgs vf;
  auto* vf_cmd = app.add_subcommand("verify", "Conjugacy, first-integral and Weierstrass checks");
  vf_cmd->add_option("--checks", vf.checks, "checks to run")->delimiter(',')->capture_default_str();
  vf_cmd->add_option("--points", vf.points, "points per parameter cell")->capture_default_str();
  vf_cmd->add_option("--seed", vf.seed, "random seed")->capture_default_str();

  CriticalArgs cp;
  std::vector<double> window{cp.window_lo, cp.window_hi};
  std::string cp_out;
  auto* cp_cmd = app.add_subcommand("critical-periods", "Period monotonicity near the outer boundary");
  cp_cmd->add_option("--D0", cp.D0, "centre of the D interval")->capture_default_str();
  cp_cmd->add_option("--delta", cp.delta, "half-width of the parameter box")->capture_default_str();
  cp_cmd->add_option("--window", window, "u0 window as lo,hi")->delimiter(',')->expected(2);
  cp_cmd->add_option("--grid", cp.grid, "grid points per parameter")->capture_default_str();
  cp_cmd->add_option("--window-points", cp.window_points, "samples per window")->capture_default_str();
  cp_cmd->add_option("--out", cp_out, "output JSON path (default stdout)");

  OrbitArgs ob;
  std::string ob_out;
  auto* ob_cmd = app.add_subcommand("orbit", "Sample one periodic orbit of L_a");
  ob_cmd->add_option("--D", ob.D, "parameter D")->required();
  ob_cmd->add_option("--F", ob.F, "parameter F")->required();
  ob_cmd->add_option("--u0", ob.u0, "starting point on v = 0")->capture_default_str();
  ob_cmd->add_option("--periods", ob.periods, "number of periods")->capture_default_str();
  ob_cmd->add_option("--out", ob_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ps_cmd) {
      OutputTarget t(ps_out, out);
      return period_scan(ps, t.stream());
    }
    if (*ds_cmd) {
      if (*eps_opt) ds.eps = ds_eps;
      ds.fit = !ds_fit.empty();
      OutputTarget t(ds_out, out);
      std::ofstream fit;
      if (ds.fit) {
        fit.open(ds_fit, std::ios::binary);
        if (!fit) throw ParameterError("cannot open fit output '" + ds_fit + "'");
      }
      return dulac_scan(ds, t.stream(), ds.fit ? &fit : nullptr);
    }
    if (*vf_cmd) return verify(vf, out);
    if (*cp_cmd) {
      cp.window_lo = window.at(0);
      cp.window_hi = window.at(1);
      OutputTarget t(cp_out, out);
      return critical_periods(cp, t.stream());
    }
    if (*ob_cmd) {
      OutputTarget t(ob_out, out);
      return orbit(ob, t.stream());
    }
  } catch (const ParameterError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitConfig;
}

}  // namespace loudsn::cli
