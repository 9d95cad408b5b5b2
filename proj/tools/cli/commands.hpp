#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace loudsn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitCheckFailed = 3;

struct PeriodScanArgs {
  double D = 0.0;
  double F = 0.0;
  double u0_min = 1e-3;
  double u0_max = 0.995;
  int n = 16;
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
};

struct DulacScanArgs {
  std::vector<double> D_grid;
  std::vector<double> F_grid;
  std::vector<double> s_grid;
  int degree = 8;
  bool normalize = false;      // rescale each unfolding inside its convergence disc
  std::optional<double> eps;   // override eps for every cell
  double eps0 = 0.1;
  double s0 = 0.25;
  double s_floor = 1e-3;
  bool fit = false;
};

struct VerifyArgs {
  std::vector<std::string> checks{"pullback", "integral", "weierstrass"};
  std::size_t points = 100;
  std::uint64_t seed = 1;
};

struct CriticalArgs {
  double D0 = -0.5;
  double delta = 0.05;
  double window_lo = 0.95;
  double window_hi = 0.995;
  int grid = 3;
  int window_points = 16;
};

struct OrbitArgs {
  double D = 0.0;
  double F = 0.0;
  double u0 = 0.5;
  double periods = 1.0;
};

// Resolved configs echoed in output headers. The worker count is never part of them.
nlohmann::json config_of(const PeriodScanArgs& a);
nlohmann::json config_of(const DulacScanArgs& a);
nlohmann::json config_of(const VerifyArgs& a);
nlohmann::json config_of(const CriticalArgs& a);
nlohmann::json config_of(const OrbitArgs& a);

// Each command validates its arguments (ParameterError on bad input) and
// returns an exit code.
int period_scan(const PeriodScanArgs& a, std::ostream& out);
int dulac_scan(const DulacScanArgs& a, std::ostream& csv, std::ostream* fit_json);
int verify(const VerifyArgs& a, std::ostream& out);
int critical_periods(const CriticalArgs& a, std::ostream& out);
int orbit(const OrbitArgs& a, std::ostream& out);

// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loudsn::cli
