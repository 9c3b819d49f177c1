#include "adcslab/telemetry_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace adcslab {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRecord>& telemetry) {
  out << kTelemetryHeader << '\n';
  std::string line;
  for (const auto& r : telemetry) {
    line.clear();
    auto put = [&](double v) {
      line += format_double(v);
      line += ',';
    };
    put(r.t);
    for (int i = 0; i < 4; ++i) put(r.q.coeffs()[i]);
    for (int i = 0; i < 3; ++i) put(r.omega[i]);
    put(r.euler.roll_deg);
    put(r.euler.pitch_deg);
    put(r.euler.yaw_deg);
    for (int i = 0; i < 3; ++i) put(r.tau_m[i]);
    put(r.tau_rw);
    put(r.wheel_momentum);
    line += mode_name(r.mode);
    line += '\n';
    out << line;
  }
}

namespace {

ordered_json opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json vec(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

ordered_json metric(const MetricSummary& m) {
  if (m.count == 0) return {{"count", 0}};
  return {{"count", m.count}, {"min", m.min}, {"mean", m.mean}, {"max", m.max}};
}

std::string fidelity_name(Fidelity f) { return f == Fidelity::kIdeal ? "ideal" : "physical"; }

}  // namespace

std::string summary_json(const Scenario& s, const RunResult& r) {
  ordered_json modes = ordered_json::array();
  for (auto m : r.mode_sequence) modes.push_back(std::string(mode_name(m)));
  const MassCatalog placed = s.placed_catalog();
  ordered_json j = {
      {"scenario", s.name},
      {"initial_mode", std::string(mode_name(s.initial_mode))},
      {"fidelity", fidelity_name(s.fidelity)},
      {"dt_s", s.dt},
      {"substeps", s.substeps},
      {"duration_s", s.duration_s},
      {"seed", s.seed},
      {"regolith_cm", vec(placed.regolith.position_cm)},
      {"orbit_period_s", r.orbit_period_s},
      {"status", std::string(status_name(r.status))},
      {"detumble_time_orbits", opt(r.detumble_time_orbits)},
      {"settle_time_s", opt(r.settle_time_s)},
      {"align_time_s", opt(r.align_time_s)},
      {"final_omega_radps", vec(r.final_state.omega)},
      {"final_q", ordered_json::array({r.final_state.q.w(), r.final_state.q.x(),
                                       r.final_state.q.y(), r.final_state.q.z()})},
      {"final_wheel_momentum_Nms", r.final_state.wheel_momentum},
      {"final_mode", std::string(mode_name(r.final_mode))},
      {"max_cone_deg_post_settle", r.max_cone_deg_post_settle},
      {"max_rate_post_settle_radps", r.max_rate_post_settle},
      {"saturations",
       {{"magnetic", r.magnetic_saturations},
        {"wheel_torque", r.wheel_torque_saturations},
        {"wheel_momentum", r.wheel_momentum_saturations}}},
      {"mode_sequence", modes},
  };
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump(2) + "\n";
}

void write_montecarlo_csv(std::ostream& out, const MonteCarloResult& mc) {
  out << "run,seed,regolith_x_cm,regolith_y_cm,regolith_z_cm,wx0_radps,wy0_radps,wz0_radps,"
         "status,detumble_time_orbits,settle_time_s,align_time_s\n";
  auto o = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& run : mc.runs) {
    out << run.index << ',' << run.seed;
    for (int i = 0; i < 3; ++i) out << ',' << format_double(run.regolith_cm[i]);
    for (int i = 0; i < 3; ++i) out << ',' << format_double(run.omega0[i]);
    out << ',' << status_name(run.result.status) << ',' << o(run.result.detumble_time_orbits)
        << ',' << o(run.result.settle_time_s) << ',' << o(run.result.align_time_s) << '\n';
  }
}

std::string montecarlo_summary_json(const MonteCarloResult& mc, std::uint64_t seed) {
  const auto& s = mc.summary;
  ordered_json failures = ordered_json::array();
  for (const auto& run : mc.runs) {
    if (run.result.status == RunStatus::kConverged) continue;
    ordered_json f = {{"run", run.index}, {"status", std::string(status_name(run.result.status))}};
    if (!run.result.error.empty()) f["error"] = run.result.error;
    failures.push_back(f);
  }
  const ordered_json j = {
      {"seed", seed},
      {"runs", s.runs},
      {"converged", s.converged},
      {"did_not_converge", s.did_not_converge},
      {"failed", s.failed},
      {"detumble_time_orbits", metric(s.detumble_time_orbits)},
      {"settle_time_s", metric(s.settle_time_s)},
      {"align_time_s", metric(s.align_time_s)},
      {"failures", failures},
  };
  return j.dump(2) + "\n";
}

namespace {

struct Series {
  const char* label;
  const char* colour;
  std::vector<double> y;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void panel(std::ostream& out, double top, const std::vector<double>& t,
           const std::vector<Series>& series, const std::string& y_label) {
  constexpr double left = 80, width = 680, height = 220;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double t0 = t.empty() ? 0.0 : t.front();
  const double t1 = t.empty() || t.back() <= t0 ? t0 + 1.0 : t.back();
  auto px = [&](double x) { return left + width * (x - t0) / (t1 - t0); };
  auto py = [&](double y) { return top + height * (hi - y) / (hi - lo); };

  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (lo < 0.0 && hi > 0.0) {
    out << "<line x1=\"" << left << "\" x2=\"" << left + width << "\" y1=\"" << fmt("%.2f", py(0))
        << "\" y2=\"" << fmt("%.2f", py(0)) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << fmt("%.2f", py(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt("%.3g", v) << "</text>\n";
    const double tv = t0 + (t1 - t0) * k / 4.0;
    out << "<text x=\"" << fmt("%.2f", px(tv)) << "\" y=\"" << top + height + 15
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt("%.4g", tv) << "</text>\n";
  }
  out << "<text x=\"20\" y=\"" << top + height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 20 "
      << top + height / 2 << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
  out << "<text x=\"" << left + width / 2 << "\" y=\"" << top + height + 32
      << "\" font-size=\"12\" text-anchor=\"middle\">time (s)</text>\n";

  double legend_x = left + 10;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out << fmt("%.2f", px(t[i])) << ',' << fmt("%.2f", py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << legend_x << "\" y=\"" << top + 14 << "\" font-size=\"11\" fill=\""
        << s.colour << "\">" << s.label << "</text>\n";
    legend_x += 70;
  }
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<TelemetryRecord>& telemetry,
                    const std::string& title, std::size_t max_points) {
  const std::size_t n = telemetry.size();
  const std::size_t stride = max_points > 0 && n > max_points ? (n + max_points - 1) / max_points : 1;
  std::vector<double> t;
  std::vector<Series> rates{{"wx", "#d62728", {}}, {"wy", "#2ca02c", {}}, {"wz", "#1f77b4", {}}};
  std::vector<Series> angles{
      {"roll", "#d62728", {}}, {"pitch", "#2ca02c", {}}, {"yaw", "#1f77b4", {}}};
  for (std::size_t i = 0; i < n; i += stride) {
    const auto& r = telemetry[i];
    t.push_back(r.t);
    for (int k = 0; k < 3; ++k) rates[k].y.push_back(r.omega[k]);
    angles[0].y.push_back(r.euler.roll_deg);
    angles[1].y.push_back(r.euler.pitch_deg);
    angles[2].y.push_back(r.euler.yaw_deg);
  }
  if (n > 0 && (n - 1) % stride != 0) {
    const auto& r = telemetry.back();
    t.push_back(r.t);
    for (int k = 0; k < 3; ++k) rates[k].y.push_back(r.omega[k]);
    angles[0].y.push_back(r.euler.roll_deg);
    angles[1].y.push_back(r.euler.pitch_deg);
    angles[2].y.push_back(r.euler.yaw_deg);
  }

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\" font-family=\"sans-serif\">\n"
      << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<text x=\"400\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
  panel(out, 40, t, rates, "body rate (rad/s)");
  panel(out, 330, t, angles, "Euler angle (deg)");
  out << "</svg>\n";
}

}  // namespace adcslab
