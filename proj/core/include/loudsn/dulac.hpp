#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "loudsn/differentiation.hpp"
#include "loudsn/fields.hpp"
#include "loudsn/integrator.hpp"

namespace loudsn {

struct DulacConfig {
  IntegratorConfig ode{.rel_tol = 1e-12, .abs_tol = 1e-14, .initial_step = 1e-6, .min_step = 1e-15};
  double quad_rel_tol = 1e-12;
  // Smallest s accepted; below it the integrand ~ s^-mu exhausts the error budget.
  double s_floor = 1e-3;
  // Scan bounds: s in (0, s0], |eps| <= eps0.
  double s0 = 0.25;
  double eps0 = 0.1;
  // Optional closed-form U(x, y) used instead of the polynomial truncation.
  std::function<double(double, double)> u_closed_form;
};

// One evaluation of the Dulac time/map between {y = 1} and {x = 1}.
// Dmap underflows to 0 for small s (ln Dmap ~ -1/s^mu); log_Dmap stays exact.
struct DulacSample {
  double s = 0.0;
  double eps = 0.0;
  double T = 0.0;
  double Dmap = 0.0;
  double log_Dmap = 0.0;
  double dT_ds = 0.0;
  bool dT_ds_consistent = false;
  double T0 = 0.0;
  double T1 = 0.0;         // T - T0
  double T1_direct = 0.0;  // integral of y Uhat / (x (x^mu - eps)) along the trajectory
};

struct DulacTransit {
  double T = 0.0;
  double log_Dmap = 0.0;
  double T1_direct = 0.0;
};

// Integrates, in x from s + theta to 1, the augmented system
//   d(ln y)/dx = -V(x) / (x (x^mu - eps)),   dt/dx = U(x, y) / (x^mu - eps),
//   dt1/dx = y Uhat(x, y) / (x (x^mu - eps)),  with (ln y, t, t1) = (0, 0, 0).
DulacTransit dulac_transit(const Unfolding& unf, double s, const DulacConfig& cfg = {});

// Full sample: transit plus T0 (quadrature), T1 = T - T0 and dT/ds.
DulacSample dulac_time(const Unfolding& unf, double s, const DulacConfig& cfg = {});

struct DulacMapResult {
  double value = 0.0;           // exp(log_value); may underflow
  double log_value = 0.0;       // from the ODE in x
  double log_quadrature = 0.0;  // -integral of V / (x (x^mu - eps)) by adaptive quadrature
};

DulacMapResult dulac_map_checked(const Unfolding& unf, double s, const DulacConfig& cfg = {});
double dulac_map(const Unfolding& unf, double s, const DulacConfig& cfg = {});

// T0(s) = integral over [s + theta, 1] of U(x, 0) / (x^mu - eps).
double T0_time(const Unfolding& unf, double s, const DulacConfig& cfg = {});
// dT0/ds = -U(s + theta, 0) / ((s + theta)^mu - eps).
double dT0_ds(const Unfolding& unf, double s);
// Richardson-extrapolated central difference of T with h = min(s/20, 1e-3).
DerivativeEstimate dT_ds(const Unfolding& unf, double s, const DulacConfig& cfg = {});

// T1(s) = c0 + c1 s + s h(s) fitted on a decreasing geometric grid.
struct CoeffFit {
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<std::pair<double, double>> remainder_profile;  // (s, h(s)), s decreasing
  bool stable = false;
  double relative_change = 0.0;  // ||(c0,c1) - (c0,c1) without finest point|| / ||(c0,c1)||
};

CoeffFit fit_c0_c1(const Unfolding& unf, std::span<const double> s_grid, const DulacConfig& cfg = {});
// The same fit from precomputed T1 values (exposed for testing the extrapolation).
CoeffFit fit_c0_c1_values(std::span<const double> s_grid, std::span<const double> t1_values);

struct SlopeScanRow {
  LoudParams a;
  int mu = 0;
  DulacSample sample;
  std::string status;  // "OK" or the error message
};

struct SlopeScan {
  std::vector<SlopeScanRow> rows;      // a-major, then s, in grid order
  std::vector<double> s_grid;
  std::vector<double> min_neg_slope;   // per s: min over a of -dT/ds (NaN if no cell succeeded)
};

using UnfoldingFamily = std::function<Unfolding(const LoudParams&)>;

SlopeScan slope_scan(const UnfoldingFamily& family, std::span<const LoudParams> params, std::span<const double> s_grid,
                     const std::function<double(const LoudParams&)>& eps_rule, const DulacConfig& cfg = {},
                     std::size_t workers = 0);

void to_json(nlohmann::json& j, const CoeffFit& fit);
void to_json(nlohmann::json& j, const DulacSample& s);

}  // namespace loudsn
