// adcslab command-line front end: simulate, inertia, montecarlo, conops.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "adcslab/config.hpp"
#include "adcslab/mass_model.hpp"
#include "adcslab/sim.hpp"
#include "adcslab/telemetry_io.hpp"

namespace fs = std::filesystem;
using namespace adcslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct RunFlags {
  std::string config;
  std::string out;
  std::string plot;
  std::string summary;
  std::optional<double> dt;
  std::optional<double> duration_s;
  std::optional<double> duration_orbits;
  std::optional<int> substeps;
  std::string fidelity;
  std::optional<std::uint64_t> seed;
  std::optional<double> rate_rpm;
  std::vector<double> regolith_cm;
  bool no_drag = false;
  bool no_srp = false;
  bool no_gg = false;
  bool no_disturbances = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Scenario JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Telemetry CSV path");
  cmd->add_option("--plot", f.plot, "Write an SVG plot of rates and Euler angles");
  cmd->add_option("--summary", f.summary, "Write the run summary JSON here as well");
  cmd->add_option("--dt", f.dt, "Control and integration step (s)")->check(CLI::PositiveNumber);
  auto* dur = cmd->add_option("--duration", f.duration_s, "Run length (s)")
                  ->check(CLI::PositiveNumber);
  cmd->add_option("--duration-orbits", f.duration_orbits, "Run length (orbits)")
      ->check(CLI::PositiveNumber)
      ->excludes(dur);
  cmd->add_option("--substeps", f.substeps, "RK4 sub-steps per control step")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fidelity", f.fidelity, "Actuator model")
      ->check(CLI::IsMember({"ideal", "physical"}));
  cmd->add_option("--seed", f.seed, "Seed (overrides config and ADCSLAB_SEED)");
  cmd->add_option("--rate-rpm", f.rate_rpm, "Initial rate on all three axes (rpm)");
  cmd->add_option("--regolith-cm", f.regolith_cm, "Fixed regolith position x y z (cm)")
      ->expected(3);
  cmd->add_flag("--no-drag", f.no_drag, "Disable aerodynamic drag torque");
  cmd->add_flag("--no-srp", f.no_srp, "Disable solar radiation pressure torque");
  cmd->add_flag("--no-gravity-gradient", f.no_gg, "Disable gravity-gradient torque");
  cmd->add_flag("--no-disturbances", f.no_disturbances, "Disable all disturbance torques");
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("ADCSLAB_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used, 10);
    if (used != std::string(v).size()) throw std::invalid_argument("trailing characters");
    return s;
  } catch (const std::exception&) {
    throw ConfigError("ADCSLAB_SEED", std::string("not a non-negative integer: '") + v + "'");
  }
}

fs::path bundled_scenario(const std::string& name) {
  return data_dir() / "scenarios" / (name + ".json");
}

// flags > config > ADCSLAB_SEED > built-in defaults
Scenario build_scenario(const RunFlags& f, std::optional<ModeKind> mode,
                        const std::string& default_config) {
  const fs::path config = f.config.empty() ? bundled_scenario(default_config) : fs::path(f.config);
  Scenario s = load_scenario(config, mode, env_seed());
  if (f.seed) s.seed = *f.seed;
  if (f.dt) s.dt = *f.dt;
  if (f.substeps) s.substeps = *f.substeps;
  if (f.duration_s) s.duration_s = *f.duration_s;
  if (f.duration_orbits) s.duration_s = *f.duration_orbits * s.environment.orbit.period_s();
  if (!f.fidelity.empty()) s.fidelity = f.fidelity == "physical" ? Fidelity::kPhysical : Fidelity::kIdeal;
  if (f.rate_rpm) s.initial.omega = Vec3::Constant(*f.rate_rpm * kRpmToRadps);
  if (f.regolith_cm.size() == 3) {
    s.regolith = RegolithPolicy::kFixed;
    s.regolith_fixed_cm = Vec3(f.regolith_cm[0], f.regolith_cm[1], f.regolith_cm[2]);
  }
  if (f.no_drag || f.no_disturbances) s.disturbances.drag = false;
  if (f.no_srp || f.no_disturbances) s.disturbances.srp = false;
  if (f.no_gg || f.no_disturbances) s.disturbances.gravity_gradient = false;
  s.validate();
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out << content;
  if (!out) throw ConfigError(path, "write failed");
}

template <class F>
void write_stream(const std::string& path, F&& fill) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path, "cannot open for writing");
  fill(out);
  if (!out) throw ConfigError(path, "write failed");
}

int run_and_report(const Scenario& s, const RunFlags& f) {
  const RunOutput run = run_scenario(s);
  const std::string out_path = f.out.empty() ? s.name + ".csv" : f.out;
  write_stream(out_path, [&](std::ostream& o) { write_telemetry_csv(o, run.telemetry); });
  if (!f.plot.empty()) {
    write_stream(f.plot, [&](std::ostream& o) { write_svg_plot(o, run.telemetry, s.name); });
  }
  const std::string summary = summary_json(s, run.result);
  if (!f.summary.empty()) write_file(f.summary, summary);
  std::cout << summary;
  return run.result.status == RunStatus::kConverged ? kExitOk : kExitNotConverged;
}

void print_matrix(const Mat3& j) {
  for (int r = 0; r < 3; ++r) {
    std::cout << "  [";
    for (int c = 0; c < 3; ++c) {
      std::cout << (c ? ", " : "") << std::setw(14) << std::scientific << std::setprecision(6)
                << j(r, c);
    }
    std::cout << "]\n";
  }
  std::cout << std::defaultfloat;
}

void print_vec(const char* label, const Vec3& v) {
  std::cout << label << " (" << format_double(v.x()) << ", " << format_double(v.y()) << ", "
            << format_double(v.z()) << ")\n";
}

int inertia_command(const std::string& catalog_path, bool sweep) {
  const MassCatalog cat = load_catalog(catalog_path.empty()
                                           ? data_dir() / "aosat1_catalog.json"
                                           : fs::path(catalog_path));
  std::cout << "total mass (kg): " << format_double(cat.total_mass()) << "\n";
  print_vec("cg (cm):", compute_cg(cat));
  std::cout << "inertia about cg (kg m^2):\n";
  print_matrix(inertia_matrix(cat));
  if (is_degenerate(cat)) {
    std::cerr << "warning: degenerate catalog; the inertia tensor is singular (mass is "
                 "collinear or concentrated at a point)\n";
  } else {
    print_vec("principal moments (kg m^2):", principal_axes(inertia_matrix(cat)).moments);
  }
  if (sweep) {
    const MassEnvelope env = corner_envelope(cat, cat.chamber);
    std::cout << "\nregolith corner sweep:\n";
    for (const auto& c : env.corners) {
      std::cout << "corner (" << format_double(c.regolith_cm.x()) << ", "
                << format_double(c.regolith_cm.y()) << ", " << format_double(c.regolith_cm.z())
                << ") cm\n";
      print_vec("  cg (cm):", c.cg_cm);
      print_vec("  Jxx Jyy Jzz (kg m^2):", c.inertia.diagonal());
      print_vec("  Jxy Jxz Jyz (kg m^2):", Vec3(c.inertia(0, 1), c.inertia(0, 2), c.inertia(1, 2)));
    }
    std::cout << "\nenvelope over the chamber:\n";
    print_vec("cg min (cm):", env.cg_min_cm);
    print_vec("cg max (cm):", env.cg_max_cm);
    std::cout << "J min (kg m^2):\n";
    print_matrix(env.j_min);
    std::cout << "J max (kg m^2):\n";
    print_matrix(env.j_max);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AOSAT-1 attitude control simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "adcslab 1.0");

  RunFlags sim_flags;
  std::string mode_name_flag;
  auto* simulate = app.add_subcommand("simulate", "Run one control mode");
  simulate->add_option("--mode", mode_name_flag, "detumble | spin | despin | nominal")
      ->check(CLI::IsMember({"detumble", "spin", "despin", "nominal"}));
  add_run_flags(simulate, sim_flags);

  std::string catalog_path;
  bool sweep = false;
  auto* inertia = app.add_subcommand("inertia", "Mass properties of a catalog");
  inertia->add_option("--catalog", catalog_path, "Catalog JSON (default: bundled AOSAT-1)")
      ->check(CLI::ExistingFile);
  inertia->add_flag("--sweep-corners", sweep, "Regolith at each chamber corner");

  RunFlags mc_flags;
  std::size_t runs = 0;
  unsigned workers = 1;
  auto* montecarlo = app.add_subcommand("montecarlo", "Batch of seeded runs");
  montecarlo->add_option("--config", mc_flags.config, "Scenario JSON file")
      ->check(CLI::ExistingFile);
  montecarlo->add_option("--runs", runs, "Number of runs (default: config, else 100)")
      ->check(CLI::PositiveNumber);
  montecarlo->add_option("--seed", mc_flags.seed, "Master seed");
  montecarlo->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  montecarlo->add_option("--out", mc_flags.out, "Per-run results CSV");
  montecarlo->add_option("--summary", mc_flags.summary, "Write the batch summary JSON here");

  RunFlags conops_flags;
  std::vector<double> safe_at, release_at;
  auto* conops = app.add_subcommand("conops", "Full mode sequence with automatic transitions");
  add_run_flags(conops, conops_flags);
  conops->add_option("--safe-at", safe_at, "Force SAFE at these times (s)");
  conops->add_option("--release-at", release_at, "Release SAFE at these times (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*simulate) {
      std::optional<ModeKind> mode;
      if (!mode_name_flag.empty()) mode = parse_mode(mode_name_flag);
      if (!mode && !sim_flags.config.empty()) {
        mode = scenario_mode(read_text_file(sim_flags.config), sim_flags.config);
      }
      const std::string default_config(mode_name(mode.value_or(ModeKind::kDetumble)));
      const Scenario s = build_scenario(sim_flags, mode, default_config);
      return run_and_report(s, sim_flags);
    }
    if (*inertia) return inertia_command(catalog_path, sweep);
    if (*montecarlo) {
      const Scenario base = build_scenario(mc_flags, std::nullopt, "montecarlo_spin");
      const std::size_t n = runs > 0 ? runs : base.monte_carlo.runs;
      const MonteCarloResult mc = monte_carlo(base, n, base.seed, workers);
      const std::string out_path = mc_flags.out.empty() ? base.name + "_runs.csv" : mc_flags.out;
      write_stream(out_path, [&](std::ostream& o) { write_montecarlo_csv(o, mc); });
      const std::string summary = montecarlo_summary_json(mc, base.seed);
      if (!mc_flags.summary.empty()) write_file(mc_flags.summary, summary);
      std::cout << summary;
      return mc.summary.converged == mc.summary.runs ? kExitOk : kExitNotConverged;
    }
    if (*conops) {
      Scenario s = build_scenario(conops_flags, ModeKind::kDetumble, "conops");
      s.modes.auto_transitions = true;
      for (double t : safe_at) s.modes.commands.push_back({t, CommandKind::kSafe});
      for (double t : release_at) s.modes.commands.push_back({t, CommandKind::kRelease});
      std::stable_sort(s.modes.commands.begin(), s.modes.commands.end(),
                       [](const auto& a, const auto& b) { return a.t_s < b.t_s; });
      return run_and_report(s, conops_flags);
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
