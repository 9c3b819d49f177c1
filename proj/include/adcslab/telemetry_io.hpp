#pragma once

// Telemetry CSV, run summaries (JSON), Monte Carlo result tables and SVG
// time-history plots.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "adcslab/sim.hpp"

namespace adcslab {

inline constexpr std::string_view kTelemetryHeader =
    "t_s,q0,q1,q2,q3,wx_radps,wy_radps,wz_radps,roll_deg,pitch_deg,yaw_deg,"
    "tau_mx_Nm,tau_my_Nm,tau_mz_Nm,tau_rw_Nm,hw_Nms,mode";

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRecord>& telemetry);

/// Scenario settings and run metrics as a JSON document.
std::string summary_json(const Scenario& s, const RunResult& r);

/// One row per run, ordered by run index.
void write_montecarlo_csv(std::ostream& out, const MonteCarloResult& mc);
std::string montecarlo_summary_json(const MonteCarloResult& mc, std::uint64_t seed);

/// Two stacked panels: body rates (rad/s) and 3-2-1 Euler angles (deg)
/// against time. Long runs are thinned to at most `max_points` samples per
/// series.
void write_svg_plot(std::ostream& out, const std::vector<TelemetryRecord>& telemetry,
                    const std::string& title, std::size_t max_points = 2000);

}  // namespace adcslab
