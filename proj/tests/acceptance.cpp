// One PASS/FAIL line per acceptance criterion. Exit status is 0 when the set
// of failing criteria is a subset of those given with --expect-fail.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "adcslab/random.hpp"
#include "adcslab/sim.hpp"
#include "adcslab/telemetry_io.hpp"

using namespace adcslab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, int prec = 4) {
  return v ? fmt(*v, prec) : std::string("none");
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

Verdict table3_sweep() {
  const double rpm[] = {30, 35, 40, 45, 50, 55, 60};
  const double reference[] = {5.32, 5.77, 6.05, 6.43, 6.93, 7.10, 7.60};
  Verdict v{true, ""};
  double prev = -1.0;
  for (int i = 0; i < 7; ++i) {
    const auto r = run_scenario(detumble_scenario(rpm[i])).result;
    const auto t = r.detumble_time_orbits;
    v.detail += fmt(rpm[i], 2) + "rpm=" + fmt_opt(t) + " ";
    if (!t || std::abs(*t - reference[i]) > 0.4 * reference[i] || *t < prev) {
      v.pass = false;
      continue;
    }
    prev = *t;
  }
  v.detail += "(orbits; band +/-40%, non-decreasing)";
  return v;
}

Verdict requirement_35rpm() {
  const auto r = run_scenario(detumble_scenario(35.0)).result;
  return {r.detumble_time_orbits && *r.detumble_time_orbits < 6.0,
          "|w| < 0.01 rad/s after " + fmt_opt(r.detumble_time_orbits) + " orbits (limit 6)"};
}

double cross_axis(const RunResult& r) {
  return std::max(std::abs(r.final_state.omega.y()), std::abs(r.final_state.omega.z()));
}

std::optional<double> spin_settle;

Verdict spin_mode() {
  const auto r = run_scenario(spin_scenario()).result;
  spin_settle = r.settle_time_s;
  const bool within_minute = r.settle_time_s && *r.settle_time_s < 60.0;
  const bool within_10 = r.settle_time_s && *r.settle_time_s < 10.0;
  const double xa = cross_axis(r);
  return {within_10 && within_minute && xa < 1e-3,
          "1% settle " + fmt_opt(r.settle_time_s) + " s (need < 10 s; < 60 s " +
              (within_minute ? "met" : "missed") + "), max |wy|,|wz| " + fmt(xa, 3) + " rad/s"};
}

Verdict despin_mode() {
  const auto r = run_scenario(despin_scenario()).result;
  const double w = r.final_state.omega.norm();
  bool pass = r.settle_time_s && *r.settle_time_s <= 60.0 && w < 1e-3;
  std::string ratio = "n/a";
  if (spin_settle && r.settle_time_s) {
    const double rel = std::abs(*r.settle_time_s - *spin_settle) / *spin_settle;
    ratio = fmt(100.0 * rel, 3) + "%";
    pass = pass && rel <= 0.2;
  } else {
    pass = false;
  }
  return {pass, "|w| < 1e-3 rad/s after " + fmt_opt(r.settle_time_s) + " s, final |w| " +
                    fmt(w, 3) + ", settle differs from spin by " + ratio};
}

Verdict nominal_mode() {
  const auto r = run_scenario(nominal_scenario()).result;
  const double limit = 3.0 * r.orbit_period_s;
  const bool aligned = r.align_time_s && *r.align_time_s <= limit;
  return {aligned && r.max_cone_deg_post_settle < 5.0,
          "aligned within 5 deg after " + fmt_opt(r.align_time_s) + " s (" +
              fmt_opt(r.align_time_s ? std::optional(*r.align_time_s / r.orbit_period_s)
                                     : std::nullopt, 3) +
              " orbits, limit 3), max z cone after settling " +
              fmt(r.max_cone_deg_post_settle, 3) + " deg"};
}

Verdict conservation() {
  const Mat3 j_cat = inertia_matrix(aosat1_catalog());
  const auto j = InertiaTensor::diagonal(j_cat(0, 0), j_cat(1, 1), j_cat(2, 2));
  const auto dyn = rigid_body_dynamics(j, Vec3::Zero(), Vec3::Zero());
  std::mt19937_64 rng(2024);
  double worst_e = 0.0, worst_h = 0.0, worst_n = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    AttitudeState s;
    s.omega = Vec3(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
    const auto energy = [&](const AttitudeState& x) {
      return 0.5 * x.omega.dot(j.matrix() * x.omega);
    };
    // inertial angular momentum: rotate the body-frame J w out
    const auto momentum = [&](const AttitudeState& x) {
      return x.q.body_to_orbit(j.matrix() * x.omega);
    };
    const double e0 = energy(s);
    const Vec3 h0 = momentum(s);
    for (int k = 0; k < 10000; ++k) {
      s = rk4_step(s, dyn, 0.1);
      worst_n = std::max(worst_n, std::abs(s.q.coeffs().norm() - 1.0));
    }
    worst_e = std::max(worst_e, std::abs(energy(s) - e0) / e0);
    worst_h = std::max(worst_h, (momentum(s) - h0).norm() / h0.norm());
  }
  return {worst_e < 1e-8 && worst_h < 1e-8 && worst_n <= 1e-9,
          "energy drift " + fmt(worst_e, 3) + ", |Jw| drift " + fmt(worst_h, 3) +
              ", max |q| - 1 " + fmt(worst_n, 3)};
}

Mat3 closed_form_inertia(const MassCatalog& cat) {
  double m_tot = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const auto& c : cat.all_components()) {
    m_tot += c.mass_kg;
    moment += c.mass_kg * c.position_cm;
  }
  const Vec3 cg = moment / m_tot;
  Mat3 out = Mat3::Zero();
  for (const auto& c : cat.all_components()) {
    const Vec3 r = (c.position_cm - cg) / 100.0;
    out += c.mass_kg * (r.squaredNorm() * Mat3::Identity() - r * r.transpose());
    if (c.extent_cm) {
      const Vec3 d = *c.extent_cm / 100.0;
      out(0, 0) += c.mass_kg * (d.y() * d.y() + d.z() * d.z()) / 12.0;
      out(1, 1) += c.mass_kg * (d.x() * d.x() + d.z() * d.z()) / 12.0;
      out(2, 2) += c.mass_kg * (d.x() * d.x() + d.y() * d.y()) / 12.0;
    }
  }
  return out;
}

double rel_diff(const Mat3& a, const Mat3& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

Verdict inertia_equivalence() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    MassCatalog cat;
    const int n = 2 + static_cast<int>(uniform(rng, 0, 12));
    for (int k = 0; k < n; ++k) {
      MassComponent c;
      c.name = "c" + std::to_string(k);
      c.mass_kg = uniform(rng, 0.01, 2.0);
      c.position_cm = Vec3(uniform(rng, -20, 20), uniform(rng, -20, 20), uniform(rng, -20, 20));
      cat.components.push_back(c);
    }
    cat.regolith = {"Regolith", uniform(rng, 0.0, 0.5),
                    Vec3(uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, 0, 18)),
                    std::nullopt};
    worst = std::max(worst, rel_diff(inertia_matrix(cat), closed_form_inertia(cat)));
  }
  const MassCatalog bundled = aosat1_catalog();
  const double bundled_diff = rel_diff(inertia_matrix(bundled), closed_form_inertia(bundled));
  worst = std::max(worst, bundled_diff);

  // spreadsheet sums over the mass table: 2.97 kg, sum m z = -2.349 kg cm
  const double mass = bundled.total_mass();
  const Vec3 cg = compute_cg(bundled);
  const double cg_err =
      std::max({std::abs(cg.x()), std::abs(cg.y()), std::abs(cg.z() - (-2.349 / 2.97))});
  return {worst < 1e-12 && std::abs(mass - 2.97) < 1e-12 && cg_err < 1e-12,
          "max relative difference " + fmt(worst, 3) + " (bundled " + fmt(bundled_diff, 3) +
              "), total mass " + fmt(mass, 15) + " kg, CG error " + fmt(cg_err, 3) + " cm"};
}

Verdict physical_actuators() {
  Scenario s = detumble_scenario(35.0);
  s.fidelity = Fidelity::kPhysical;
  s.record_every = 1;
  const auto out = run_scenario(s);
  double worst = 0.0, h_max = 0.0;
  for (const auto& r : out.telemetry) {
    const double scale = r.tau_m.norm() * r.b_body.norm();
    if (scale > 0.0) worst = std::max(worst, std::abs(r.tau_m.dot(r.b_body)) / scale);
    h_max = std::max(h_max, std::abs(r.wheel_momentum));
  }
  return {worst < 1e-13 && h_max <= s.limits.max_wheel_momentum && out.telemetry.size() > 1,
          fmt(static_cast<double>(out.telemetry.size()), 7) + " steps, max |t.B|/(|t||B|) " +
              fmt(worst, 3) + ", max |h| " + fmt(h_max, 3) + " Nms (limit " +
              fmt(s.limits.max_wheel_momentum, 3) + "); de-tumble status " +
              std::string(status_name(out.result.status)) + ", final |w| " +
              fmt(out.result.final_state.omega.norm(), 3) + " rad/s"};
}

bool relaxed_spin_ok(const RunResult& r) {
  return r.settle_time_s && *r.settle_time_s <= 30.0 && cross_axis(r) < 1e-3;
}

Verdict regolith_robustness() {
  Scenario base = spin_scenario();
  base.settle_band = 0.05;
  int corner_ok = 0;
  double worst = 0.0;
  for (const Vec3& c : base.catalog.chamber.corners()) {
    Scenario s = base;
    s.regolith = RegolithPolicy::kFixed;
    s.regolith_fixed_cm = c;
    const auto r = run_scenario(s).result;
    if (relaxed_spin_ok(r)) ++corner_ok;
    worst = std::max(worst, r.settle_time_s.value_or(INFINITY));
  }
  base.monte_carlo.sample_regolith = true;
  base.monte_carlo.omega_rpm.reset();
  const auto mc = monte_carlo(base, 100, 1, worker_count());
  int random_ok = 0;
  for (const auto& run : mc.runs) {
    if (relaxed_spin_ok(run.result)) ++random_ok;
    worst = std::max(worst, run.result.settle_time_s.value_or(INFINITY));
  }
  return {corner_ok == 8 && random_ok == 100,
          "corners " + std::to_string(corner_ok) + "/8, random " + std::to_string(random_ok) +
              "/100 within 5% by 30 s; slowest settle " + fmt(worst, 4) + " s"};
}

Scenario determinism_scenario() {
  Scenario s = spin_scenario();
  s.regolith = RegolithPolicy::kSampled;
  s.seed = 4242;
  s.disturbances = DisturbanceToggles{};
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const std::string& self) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("adcslab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path a = dir / "a.csv", b = dir / "b.csv";
  bool spawned = true;
  for (const auto& p : {a, b}) {
    const std::string cmd = "\"" + self + "\" --write-telemetry \"" + p.string() + "\"";
    spawned = spawned && std::system(cmd.c_str()) == 0;
  }
  const std::string ca = slurp(a), cb = slurp(b);
  fs::remove_all(dir);
  const bool same_csv = spawned && !ca.empty() && ca == cb;

  Scenario base = spin_scenario();
  base.duration_s = 40.0;
  base.settle_band = 0.05;
  base.monte_carlo.sample_regolith = true;
  base.monte_carlo.omega_rpm = std::make_pair(-0.5, 0.5);
  std::string csv1, csv4;
  {
    std::ostringstream o;
    write_montecarlo_csv(o, monte_carlo(base, 12, 99, 1));
    csv1 = o.str();
  }
  {
    std::ostringstream o;
    write_montecarlo_csv(o, monte_carlo(base, 12, 99, 4));
    csv4 = o.str();
  }
  return {same_csv && csv1 == csv4,
          std::string("telemetry CSV from two processes ") + (same_csv ? "identical" : "DIFFERS") +
              " (" + std::to_string(ca.size()) + " bytes); Monte Carlo CSV with 1 vs 4 workers " +
              (csv1 == csv4 ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> expect_fail;
  std::vector<int> only;
  std::string write_telemetry;
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--write-telemetry", write_telemetry)->group("");
  CLI11_PARSE(app, argc, argv);

  if (!write_telemetry.empty()) {
    std::ofstream out(write_telemetry, std::ios::binary);
    write_telemetry_csv(out, run_scenario(determinism_scenario()).telemetry);
    return out ? 0 : 1;
  }

  const std::string self = std::filesystem::absolute(argv[0]).string();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"de-tumble sweep against the reference times", table3_sweep},
      {"35 rpm de-tumble within 6 orbits", requirement_35rpm},
      {"spin to 1 rpm", spin_mode},
      {"de-spin to rest", despin_mode},
      {"nominal alignment from 90 deg", nominal_mode},
      {"torque-free conservation", conservation},
      {"inertia equivalence and mass table", inertia_equivalence},
      {"physical actuator law", physical_actuators},
      {"regolith robustness", regolith_robustness},
      {"determinism", [&] { return determinism(self); }},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    // criterion 4 compares against the spin settle time
    if (id == 4 && !spin_settle) spin_settle = run_scenario(spin_scenario()).result.settle_time_s;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) failed.insert(id);
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": "
              << v.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
  }

  const std::set<int> allowed(expect_fail.begin(), expect_fail.end());
  std::vector<int> unexpected;
  for (int id : failed) {
    if (!allowed.count(id)) unexpected.push_back(id);
  }
  std::cout << failed.size() << " failing";
  if (!allowed.empty()) std::cout << ", " << failed.size() - unexpected.size() << " expected";
  std::cout << std::endl;
  return unexpected.empty() ? 0 : 1;
}
