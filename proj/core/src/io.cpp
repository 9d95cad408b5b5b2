#include "loudsn/io.hpp"

#include <cmath>
#include <cstdio>

namespace loudsn {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string config_header(nlohmann::json config) {
  config["version"] = kVersion;
  return "# config=" + config.dump();
}

namespace {

// Status strings are free text; keep CSV cells on one line and comma-free.
std::string csv_status(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

}  // namespace

void write_orbit_csv(std::ostream& os, const Orbit& orbit) {
  os << "t,c1,c2\n";
  for (std::size_t i = 0; i < orbit.times.size(); ++i)
    os << format_number(orbit.times[i]) << ',' << format_number(orbit.states[i].first) << ','
       << format_number(orbit.states[i].second) << '\n';
  os << "# status=" << to_string(orbit.status)
     << " event_t=" << (orbit.event_time ? format_number(*orbit.event_time) : std::string("none")) << '\n';
}

void write_period_csv(std::ostream& os, const nlohmann::json& config, std::span<const PeriodCell> cells) {
  os << config_header(config) << '\n';
  os << "D,F,u0,period,dperiod,closure_residual,status\n";
  for (const auto& c : cells) {
    const bool ok = c.status == "OK";
    os << format_number(c.a.D) << ',' << format_number(c.a.F) << ',' << format_number(c.sample.u0) << ','
       << (ok ? format_number(c.sample.period) : "") << ',' << (ok ? format_number(c.sample.dperiod_du0) : "") << ','
       << (ok ? format_number(c.sample.closure_residual) : "") << ',' << csv_status(c.status) << '\n';
  }
}

void write_dulac_csv(std::ostream& os, const nlohmann::json& config, const SlopeScan& scan) {
  os << config_header(config) << '\n';
  os << "D,F,mu,eps,s,T,T0,T1,Dmap,dT_ds,status\n";
  for (const auto& r : scan.rows) {
    const bool ok = r.status == "OK";
    const auto& x = r.sample;
    auto num = [ok](double v) { return ok ? format_number(v) : std::string(); };
    os << format_number(r.a.D) << ',' << format_number(r.a.F) << ',' << r.mu << ',' << format_number(x.eps) << ','
       << format_number(x.s) << ',' << num(x.T) << ',' << num(x.T0) << ',' << num(x.T1) << ',' << num(x.Dmap) << ','
       << num(x.dT_ds) << ',' << csv_status(r.status) << '\n';
  }
}

}  // namespace loudsn
