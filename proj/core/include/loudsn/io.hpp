#pragma once

#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "loudsn/dulac.hpp"
#include "loudsn/integrator.hpp"
#include "loudsn/period.hpp"

namespace loudsn {

inline constexpr const char* kVersion = LOUDSN_VERSION;

// Shortest round-trip representation ("%.17g"); "nan"/"inf" for non-finite values.
std::string format_number(double v);

// "# config=<compact json>" with a "version" key added.
std::string config_header(nlohmann::json config);

// Columns D,F,u0,period,dperiod,closure_residual,status.
void write_period_csv(std::ostream& os, const nlohmann::json& config, std::span<const PeriodCell> cells);

// Columns D,F,mu,eps,s,T,T0,T1,Dmap,dT_ds,status.
void write_dulac_csv(std::ostream& os, const nlohmann::json& config, const SlopeScan& scan);

}  // namespace loudsn
