#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include <json.hpp>

#include "adcslab/config.hpp"
#include "adcslab/telemetry_io.hpp"

using namespace adcslab;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_scenario(text, ".", std::nullopt, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("bundled scenarios load") {
  for (const char* name : {"detumble", "spin", "despin", "nominal", "conops", "montecarlo_spin"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_scenario(data_dir() / "scenarios" / (std::string(name) + ".json")));
  }
  const Scenario file = load_scenario(data_dir() / "scenarios" / "detumble.json");
  const Scenario built = detumble_scenario(35.0);
  CHECK(file.initial_mode == ModeKind::kDetumble);
  CHECK(file.initial.omega.isApprox(built.initial.omega));
  CHECK(file.dt == built.dt);
  CHECK(file.substeps == built.substeps);
  CHECK(file.duration_s == doctest::Approx(built.duration_s));
  CHECK(file.gains.kp == 9e-5);

  const Scenario nominal = load_scenario(data_dir() / "scenarios" / "nominal.json");
  CHECK(nominal.initial.q == nominal_scenario().initial.q);

  const Scenario conops = load_scenario(data_dir() / "scenarios" / "conops.json");
  CHECK(conops.modes.auto_transitions);

  const Scenario mc = load_scenario(data_dir() / "scenarios" / "montecarlo_spin.json");
  CHECK(mc.monte_carlo.runs == 100);
  CHECK(mc.settle_band == 0.05);
  CHECK(mc.regolith == RegolithPolicy::kSampled);
}

TEST_CASE("config overlays the built-in mode setup") {
  const Scenario s = parse_scenario(R"({"mode": {"initial": "spin", "spin_rate_rpm": 2},
                                         "gains": {"k1": 0.01},
                                         "sim": {"duration_s": 30, "fidelity": "physical",
                                                 "disturbances": {"srp": false},
                                                 "initial": {"omega_rpm": [0.5, 0, 0]}}})",
                                    ".");
  CHECK(s.initial_mode == ModeKind::kSpin);
  CHECK(s.modes.spin_rate == doctest::Approx(2 * kRpmToRadps));
  CHECK(s.gains.k1 == 0.01);
  CHECK(s.gains.k2 == 7e-4);
  CHECK(s.duration_s == 30);
  CHECK(s.fidelity == Fidelity::kPhysical);
  CHECK_FALSE(s.disturbances.srp);
  CHECK(s.disturbances.drag);
  CHECK(s.initial.omega.isApprox(Vec3(0.5 * kRpmToRadps, 0, 0)));

  // explicit mode beats the file's
  const Scenario forced = parse_scenario(R"({"mode": {"initial": "spin"}})", ".", ModeKind::kDespin);
  CHECK(forced.initial_mode == ModeKind::kDespin);

  const Scenario orbits = parse_scenario(R"({"sim": {"duration_orbits": 2}})", ".");
  CHECK(orbits.duration_s == doctest::Approx(2 * orbits.environment.orbit.period_s()));

  const Scenario fixed = parse_scenario(R"({"mass": {"regolith": [1, 2, 3]}})", ".");
  CHECK(fixed.regolith == RegolithPolicy::kFixed);
  CHECK(fixed.regolith_fixed_cm == Vec3(1, 2, 3));
}

TEST_CASE("seed precedence below the config file") {
  const Scenario a = parse_scenario("{}", ".", std::nullopt, "cfg", 77);
  CHECK(a.seed == 77);
  const Scenario b = parse_scenario(R"({"sim": {"seed": 5}})", ".", std::nullopt, "cfg", 77);
  CHECK(b.seed == 5);
  const Scenario big = parse_scenario(R"({"sim": {"seed": 18446744073709551615}})", ".");
  CHECK(big.seed == 18446744073709551615ULL);
}

TEST_CASE("config diagnostics name the key") {
  CHECK(error_of(R"({"gains": {"kp": "fast"}})") == "cfg.json: gains.kp: expected a number");
  CHECK(error_of(R"({"gains": {"kq": 1}})") == "cfg.json: gains.kq: unknown key");
  CHECK(error_of(R"({"sim": {"dt_s": -1}})") == "cfg.json: sim.dt_s: must be positive");
  CHECK(error_of(R"({"sim": {"initial": {"q": [0, 0, 0, 0]}}})") ==
        "cfg.json: sim.initial.q: quaternion must be nonzero");
  CHECK(error_of(R"({"mode": {"commands": [{"t_s": 1, "command": "explode"}]}})") ==
        "cfg.json: mode.commands[0].command: unknown command 'explode'");
  CHECK(error_of(R"({"mode": {"initial": "tumble"}})") == "cfg.json: mode.initial: unknown mode 'tumble'");
  CHECK(error_of(R"({"montecarlo": {"runs": 0}})") == "cfg.json: montecarlo.runs: must be >= 1");
  CHECK(error_of(R"({"sim": {"duration_s": 10, "duration_orbits": 1}})").find("not both") !=
        std::string::npos);
  CHECK(error_of(R"({"sim": {"dt_s": 5, "duration_s": 1}})").find("dt must not exceed") !=
        std::string::npos);
  CHECK(error_of("[1, 2]") == "cfg.json: expected an object");
}

TEST_CASE("syntax errors report line and column") {
  const std::string err = error_of("{\n  \"gains\": {\n    \"kp\": 9e-5,,\n  }\n}\n");
  CHECK(err.rfind("cfg.json:3:", 0) == 0);
  CHECK(err.find("syntax error") != std::string::npos);
}

TEST_CASE("catalog parsing") {
  const MassCatalog c = parse_catalog(R"({
    "components": [{"name": "Box", "mass_kg": 2, "position_cm": [0, 0, 0], "extent_cm": [10, 10, 10]}],
    "regolith": {"name": "Regolith", "mass_kg": 0.1, "position_cm": "sampled"},
    "chamber_cm": {"min": [-1, -1, 0], "max": [1, 1, 2]}})");
  CHECK(c.regolith_sampled);
  CHECK(c.chamber.max_cm == Vec3(1, 1, 2));
  CHECK(c.regolith.position_cm == Vec3(0, 0, 1));

  auto err = [](const std::string& text) {
    try {
      (void)parse_catalog(text, "cat.json");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(err(R"({"components": [], "regolith": {"name": "R", "mass_kg": 0, "position_cm": [0,0,0]}})") ==
        "cat.json: components: catalog needs at least one component");
  CHECK(err(R"({"components": [{"name": "A", "mass_kg": -1, "position_cm": [0,0,0]}],
                "regolith": {"name": "R", "mass_kg": 0, "position_cm": [0,0,0]}})") ==
        "cat.json: components[0].mass_kg: must be positive");
  CHECK(err(R"({"components": [{"name": "A", "mass_kg": 1, "position_cm": [0,0]}],
                "regolith": {"name": "R", "mass_kg": 0, "position_cm": [0,0,0]}})") ==
        "cat.json: components[0].position_cm: expected an array of 3 numbers");
  CHECK(err(R"({"components": [{"name": "A", "mass_kg": 1, "position_cm": [0,0,0]},
                               {"name": "A", "mass_kg": 1, "position_cm": [0,0,1]}],
                "regolith": {"name": "R", "mass_kg": 0, "position_cm": [0,0,0]}})")
            .find("duplicate component name 'A'") != std::string::npos);
  CHECK(err(R"({"components": [{"name": "A", "mass_kg": 1, "position_cm": [0,0,0]}],
                "regolith": {"name": "R", "mass_kg": 0, "position_cm": [0,0,0]},
                "chamber_cm": {"min": [0,0,0], "max": [1,0,1]}})")
            .find("chamber_cm") != std::string::npos);
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100000; ++i) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("telemetry CSV") {
  Scenario s = spin_scenario();
  s.duration_s = 3.0;
  const auto out = run_scenario(s);
  std::ostringstream csv;
  write_telemetry_csv(csv, out.telemetry);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "t_s,q0,q1,q2,q3,wx_radps,wy_radps,wz_radps,roll_deg,pitch_deg,yaw_deg,tau_mx_Nm,"
        "tau_my_Nm,tau_mz_Nm,tau_rw_Nm,hw_Nms,mode");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    REQUIRE(cells.size() == 17);
    const auto& r = out.telemetry[rows];
    CHECK(std::strtod(cells[0].c_str(), nullptr) == r.t);
    CHECK(std::strtod(cells[1].c_str(), nullptr) == r.q.w());
    CHECK(std::strtod(cells[5].c_str(), nullptr) == r.omega.x());
    CHECK(std::strtod(cells[14].c_str(), nullptr) == r.tau_rw);
    CHECK(std::strtod(cells[15].c_str(), nullptr) == r.wheel_momentum);
    CHECK(cells[16] == "spin");
    ++rows;
  }
  CHECK(rows == out.telemetry.size());
}

TEST_CASE("summary JSON") {
  Scenario s = spin_scenario();
  const auto out = run_scenario(s);
  const auto j = nlohmann::json::parse(summary_json(s, out.result));
  CHECK(j["status"] == "converged");
  CHECK(j["settle_time_s"].get<double>() == *out.result.settle_time_s);
  CHECK(j["detumble_time_orbits"].is_null());
  CHECK(j["mode_sequence"][0] == "spin");
  CHECK(j["final_omega_radps"][0].get<double>() == out.result.final_state.omega.x());
}

TEST_CASE("SVG plot") {
  Scenario s = spin_scenario();
  s.duration_s = 5.0;
  const auto out = run_scenario(s);
  std::ostringstream svg;
  write_svg_plot(svg, out.telemetry, "spin <test> & co");
  const std::string text = svg.str();
  CHECK(text.rfind("<?xml", 0) == 0);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("spin &lt;test&gt; &amp; co") != std::string::npos);
  std::size_t polylines = 0;
  for (auto p = text.find("<polyline"); p != std::string::npos; p = text.find("<polyline", p + 1)) {
    ++polylines;
  }
  CHECK(polylines == 6);
  CHECK(text.find("nan") == std::string::npos);

  // thinning keeps the first and last samples
  std::ostringstream thin;
  write_svg_plot(thin, out.telemetry, "thin", 7);
  CHECK(thin.str().size() < text.size());
  std::ostringstream empty;
  CHECK_NOTHROW(write_svg_plot(empty, {}, "empty"));
}

TEST_CASE("Monte Carlo CSV") {
  Scenario base = spin_scenario();
  base.duration_s = 10.0;
  const auto mc = monte_carlo(base, 3, 1, 1);
  std::ostringstream csv;
  write_montecarlo_csv(csv, mc);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("run,seed,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(split(line, ',').size() >= 9);
    ++rows;
  }
  CHECK(rows == 3);
  const auto j = nlohmann::json::parse(montecarlo_summary_json(mc, 1));
  CHECK(j["runs"] == 3);
}
