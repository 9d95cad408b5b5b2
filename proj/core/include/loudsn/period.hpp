#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "loudsn/differentiation.hpp"
#include "loudsn/integrator.hpp"
#include "loudsn/types.hpp"

namespace loudsn {

// The orbit through (u0, 0) did not return to v = 0: u0 lies outside the period
// annulus at this parameter, or the orbit escaped.
class OrbitNotClosed : public Error {
 public:
  OrbitNotClosed(OrbitStatus status, const std::string& what) : Error(what), status_(status) {}
  OrbitStatus status() const { return status_; }

 private:
  OrbitStatus status_;
};

struct PeriodConfig {
  IntegratorConfig ode{.rel_tol = 1e-11, .abs_tol = 1e-13};
  double u_max = 0.995;
  double consistency_rel = 0.01;
};

struct HalfPeriod {
  double time = 0.0;
  double exit_u = 0.0;
};

// Transit of L_a from (u0, 0) to the next downward crossing of v = 0.
HalfPeriod half_period(const LoudParams& a, double u0, const PeriodConfig& cfg = {});

// Same transit along the time-reversed field, starting from (u_start, 0).
HalfPeriod half_period_reversed(const LoudParams& a, double u_start, const PeriodConfig& cfg = {});

struct PeriodSample {
  double u0 = 0.0;
  double period = 0.0;  // 2 * half-period time
  double dperiod_du0 = 0.0;
  bool derivative_consistent = false;
  double closure_residual = 0.0;     // |state after one period - (u0, 0)|
  double full_return_period = 0.0;   // first upward return to v = 0
};

PeriodSample orbit_period(const LoudParams& a, double u0, const PeriodConfig& cfg = {}, bool with_derivative = true);

// Central step for d(period)/du0: min(1e-3, (1 - u0)/50, u0/50).
double dperiod_step(double u0);

DerivativeEstimate dperiod(const LoudParams& a, double u0, const PeriodConfig& cfg = {});

struct PeriodCell {
  LoudParams a;
  PeriodSample sample;
  std::string status;  // "OK", "ORBIT_NOT_CLOSED: ..." or another error
};

std::vector<PeriodCell> period_scan(const LoudParams& a, std::span<const double> u0_grid, const PeriodConfig& cfg = {},
                                    std::size_t workers = 0);

enum class CriticalKind { Min, Max };
std::string_view to_string(CriticalKind k);

struct CriticalPeriod {
  double u0 = 0.0;
  double period = 0.0;
  CriticalKind kind = CriticalKind::Min;
  std::pair<double, double> bracket;
};

struct CriticalSearchOptions {
  int grid_points = 64;
  // Smallest grid gap near `hi` as a fraction of the interval (geometric refinement).
  double min_gap_fraction = 1e-3;
  double bracket_width = 1e-6;
  double consistency_rel = 0.01;
};

struct CriticalPeriodReport {
  std::vector<CriticalPeriod> found;
  std::vector<std::pair<double, double>> unresolved;
  std::size_t uncertified_points = 0;
};

// Grid on [lo, hi] with spacing shrinking geometrically toward hi.
std::vector<double> critical_search_grid(double lo, double hi, const CriticalSearchOptions& opts);

// Critical points of an arbitrary period function u0 -> T(u0) on [lo, hi] (subset of (0,1)).
CriticalPeriodReport find_critical_periods(const std::function<double(double)>& period, double lo, double hi,
                                           const CriticalSearchOptions& opts = {});

CriticalPeriodReport critical_periods(const LoudParams& a, double lo, double hi, const PeriodConfig& cfg = {},
                                      const CriticalSearchOptions& opts = {});

struct BoundaryCheckOptions {
  int grid_D = 3;
  int grid_F = 3;
  int window_points = 16;
  double window_lo = 0.95;
  double window_hi = 0.995;
  bool search_critical = true;
  CriticalSearchOptions critical;
};

struct BoundaryCell {
  LoudParams a;
  std::vector<double> u0;
  std::vector<DerivativeEstimate> dperiod;
  int sign = 0;  // common certified sign, 0 if none
  bool violation = false;
  bool inconclusive = false;
  CriticalPeriodReport critical;
  std::string error;
};

struct BoundaryReport {
  double D0 = 0.0;
  double delta = 0.0;
  BoundaryCheckOptions options;
  std::vector<BoundaryCell> cells;
  int violations = 0;
  int inconclusive = 0;
  int critical_found = 0;
};

// Grid of n points strictly inside (centre - delta, centre + delta); {centre} for n = 1.
std::vector<double> open_grid(double centre, double delta, int n);

BoundaryReport boundary_monotonicity_check(double D0, double delta, const BoundaryCheckOptions& opts = {},
                                           const PeriodConfig& cfg = {}, std::size_t workers = 0);

void to_json(nlohmann::json& j, const CriticalPeriod& c);
void to_json(nlohmann::json& j, const CriticalPeriodReport& r);
void to_json(nlohmann::json& j, const BoundaryReport& r);

}  // namespace loudsn
