#include "loudsn/dulac.hpp"

#include <cmath>
#include <limits>

#include "loudsn/errors.hpp"
#include "loudsn/parallel.hpp"
#include "loudsn/quadrature.hpp"

namespace loudsn {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// Left endpoint s + theta, after validating s.
double left_endpoint(const Unfolding& unf, double s, const DulacConfig& cfg) {
  if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("Dulac: s must be positive");
  if (s < cfg.s_floor)
    throw IntegrationError(OrbitStatus::StepUnderflow,
                           "Dulac: s = " + std::to_string(s) + " below the resolvable floor " +
                               std::to_string(cfg.s_floor));
  const double x0 = s + theta(unf.eps(), unf.mu());
  if (!(x0 < 1.0)) throw ParameterError("Dulac: s + theta must be below the section x = 1");
  return x0;
}

}  // namespace

DulacTransit dulac_transit(const Unfolding& unf, double s, const DulacConfig& cfg) {
  const double x0 = left_endpoint(unf, s, cfg);
  const int mu = unf.mu();
  const double eps = unf.eps();
  const auto& V = unf.V();
  const auto split = weierstrass_split(unf.U());
  const auto& U = unf.U();
  const auto& closed = cfg.u_closed_form;

  auto rhs = [&](double x, const StateN<3>& st) {
    const double y = std::exp(st[0]);
    const double den = ipow(x, mu) - eps;
    double u, u_hat_term;
    if (closed) {
      u = closed(x, y);
      u_hat_term = u - closed(x, 0.0);
    } else {
      u = U(x, y);
      u_hat_term = y * split.Uhat(x, y) / x;
    }
    return StateN<3>{-V(x) / (x * den), u / den, u_hat_term / den};
  };
  const auto end = integrate_ode_in_x<3>(rhs, x0, 1.0, StateN<3>{0.0, 0.0, 0.0}, cfg.ode);
  return {end[1], end[0], end[2]};
}

double T0_time(const Unfolding& unf, double s, const DulacConfig& cfg) {
  const double x0 = left_endpoint(unf, s, cfg);
  const int mu = unf.mu();
  const double eps = unf.eps();
  const auto& closed = cfg.u_closed_form;
  const UnivariatePoly U0 = unf.U().at_y_zero();
  auto f = [&](double x) { return (closed ? closed(x, 0.0) : U0(x)) / (ipow(x, mu) - eps); };
  return integrate_adaptive(f, x0, 1.0, cfg.quad_rel_tol).value;
}

double dT0_ds(const Unfolding& unf, double s) {
  if (!(s > 0.0)) throw ParameterError("dT0_ds: s must be positive");
  const double x = s + theta(unf.eps(), unf.mu());
  return -unf.U().at_y_zero()(x) / (ipow(x, unf.mu()) - unf.eps());
}

DerivativeEstimate dT_ds(const Unfolding& unf, double s, const DulacConfig& cfg) {
  const double h = std::min(s / 20.0, 1e-3);
  DulacConfig inner = cfg;
  // The stencil reaches s - h; keep the floor check meaningful for the centre only.
  inner.s_floor = std::min(cfg.s_floor, s - h);
  if (s < cfg.s_floor) left_endpoint(unf, s, cfg);
  return richardson_central([&](double si) { return dulac_transit(unf, si, inner).T; }, s, h);
}

DulacSample dulac_time(const Unfolding& unf, double s, const DulacConfig& cfg) {
  const auto tr = dulac_transit(unf, s, cfg);
  DulacSample out;
  out.s = s;
  out.eps = unf.eps();
  out.T = tr.T;
  out.log_Dmap = tr.log_Dmap;
  out.Dmap = std::exp(tr.log_Dmap);
  out.T1_direct = tr.T1_direct;
  out.T0 = T0_time(unf, s, cfg);
  out.T1 = out.T - out.T0;
  const auto d = dT_ds(unf, s, cfg);
  out.dT_ds = d.value;
  out.dT_ds_consistent = d.consistent;
  return out;
}

DulacMapResult dulac_map_checked(const Unfolding& unf, double s, const DulacConfig& cfg) {
  const double x0 = left_endpoint(unf, s, cfg);
  const int mu = unf.mu();
  const double eps = unf.eps();
  const auto& V = unf.V();
  auto log_rate = [&](double x) { return -V(x) / (x * (ipow(x, mu) - eps)); };

  auto rhs = [&](double x, const StateN<1>&) { return StateN<1>{log_rate(x)}; };
  DulacMapResult r;
  r.log_value = integrate_ode_in_x<1>(rhs, x0, 1.0, StateN<1>{0.0}, cfg.ode)[0];
  r.log_quadrature = integrate_adaptive(log_rate, x0, 1.0, cfg.quad_rel_tol).value;
  r.value = std::exp(r.log_value);
  return r;
}

double dulac_map(const Unfolding& unf, double s, const DulacConfig& cfg) {
  return dulac_map_checked(unf, s, cfg).value;
}

namespace {

// Extrapolation to s = 0 of values f_k on a geometric grid, eliminating the
// powers s^1 .. s^order.
double richardson_to_zero(std::span<const double> f, double q, int order) {
  std::vector<double> row(f.begin(), f.end());
  const int levels = std::min<int>(order, static_cast<int>(f.size()) - 1);
  for (int j = 1; j <= levels; ++j) {
    const double qj = std::pow(q, j);
    std::vector<double> next;
    for (std::size_t k = 1; k < row.size(); ++k) next.push_back((qj * row[k] - row[k - 1]) / (qj - 1.0));
    row = std::move(next);
  }
  return row.back();
}

std::pair<double, double> extrapolate_c0_c1(std::span<const double> s, std::span<const double> t1, double q) {
  const double c0 = richardson_to_zero(t1, q, 2);
  std::vector<double> slopes(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) slopes[k] = (t1[k] - c0) / s[k];
  const double c1 = richardson_to_zero(slopes, q, 1);
  return {c0, c1};
}

}  // namespace

CoeffFit fit_c0_c1_values(std::span<const double> s_grid, std::span<const double> t1) {
  const std::size_t n = s_grid.size();
  if (n < 4 || t1.size() != n) throw ParameterError("fit_c0_c1: need at least 4 grid points");
  const double q = s_grid[0] / s_grid[1];
  if (!(q > 1.0)) throw ParameterError("fit_c0_c1: grid must be strictly decreasing");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(s_grid[k] > 0.0) || std::abs(s_grid[k - 1] / s_grid[k] - q) > 1e-9 * q)
      throw ParameterError("fit_c0_c1: grid must be geometric and positive");
  }
  CoeffFit fit;
  std::tie(fit.c0, fit.c1) = extrapolate_c0_c1(s_grid, t1, q);
  const auto [c0p, c1p] = extrapolate_c0_c1(s_grid.first(n - 1), t1.first(n - 1), q);
  const double norm = std::hypot(fit.c0, fit.c1);
  const double change = std::hypot(fit.c0 - c0p, fit.c1 - c1p);
  fit.relative_change = norm > 0.0 ? change / norm : (change > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  fit.stable = fit.relative_change < 0.01;
  for (std::size_t k = 0; k < n; ++k)
    fit.remainder_profile.emplace_back(s_grid[k], (t1[k] - fit.c0 - fit.c1 * s_grid[k]) / s_grid[k]);
  return fit;
}

CoeffFit fit_c0_c1(const Unfolding& unf, std::span<const double> s_grid, const DulacConfig& cfg) {
  std::vector<double> t1;
  t1.reserve(s_grid.size());
  for (double s : s_grid) t1.push_back(dulac_transit(unf, s, cfg).T - T0_time(unf, s, cfg));
  return fit_c0_c1_values(s_grid, t1);
}

SlopeScan slope_scan(const UnfoldingFamily& family, std::span<const LoudParams> params, std::span<const double> s_grid,
                     const std::function<double(const LoudParams&)>& eps_rule, const DulacConfig& cfg,
                     std::size_t workers) {
  if (params.empty() || s_grid.empty()) throw ParameterError("slope_scan: grids must be nonempty");
  SlopeScan scan;
  scan.s_grid.assign(s_grid.begin(), s_grid.end());
  scan.rows.resize(params.size() * s_grid.size());
  parallel_for(
      scan.rows.size(),
      [&](std::size_t idx) {
        const auto& a = params[idx / s_grid.size()];
        const double s = s_grid[idx % s_grid.size()];
        SlopeScanRow& row = scan.rows[idx];
        row.a = a;
        row.sample.s = s;
        try {
          Unfolding unf = family(a);
          if (eps_rule) unf = unf.with_eps(eps_rule(a));
          row.mu = unf.mu();
          row.sample.eps = unf.eps();
          if (std::abs(unf.eps()) > cfg.eps0 || s > cfg.s0)
            throw ParameterError("cell outside the scan bounds (s0, eps0)");
          row.sample = dulac_time(unf, s, cfg);
          row.status = "OK";
        } catch (const std::exception& e) {
          row.status = e.what();
        }
      },
      workers);
  scan.min_neg_slope.assign(s_grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t idx = 0; idx < scan.rows.size(); ++idx) {
    const auto& row = scan.rows[idx];
    if (row.status != "OK") continue;
    double& m = scan.min_neg_slope[idx % s_grid.size()];
    m = std::isnan(m) ? -row.sample.dT_ds : std::min(m, -row.sample.dT_ds);
  }
  return scan;
}

void to_json(nlohmann::json& j, const CoeffFit& fit) {
  j = nlohmann::json{{"c0", fit.c0}, {"c1", fit.c1}, {"stable", fit.stable}, {"relative_change", fit.relative_change}};
  auto& prof = j["remainder_profile"] = nlohmann::json::array();
  for (const auto& [s, h] : fit.remainder_profile) prof.push_back({{"s", s}, {"h", h}});
}

void to_json(nlohmann::json& j, const DulacSample& s) {
  j = nlohmann::json{{"s", s.s},   {"eps", s.eps}, {"T", s.T},   {"Dmap", s.Dmap},           {"log_Dmap", s.log_Dmap},
                     {"T0", s.T0}, {"T1", s.T1},   {"dT_ds", s.dT_ds}, {"T1_direct", s.T1_direct}};
}

}  // namespace loudsn
