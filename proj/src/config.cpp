#include "adcslab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#ifndef ADCSLAB_DATA_DIR
#define ADCSLAB_DATA_DIR "data"
#endif

namespace adcslab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A JSON value together with the key path that led to it, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string source, std::string path = "")
      : j_(&j), source_(std::move(source)), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(path_.empty() ? source_ : source_ + ": " + path_, what);
  }

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_->contains(key); }

  Node operator[](const char* key) const {
    return Node(j_->at(key), source_, path_.empty() ? key : path_ + "." + key);
  }
  Node at(std::size_t i) const {
    return Node((*j_)[i], source_, path_ + "[" + std::to_string(i) + "]");
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& [key, value] : j_->items()) {
      (void)value;
      const bool known = std::any_of(allowed.begin(), allowed.end(),
                                     [&](const char* a) { return key == a; });
      if (!known) {
        throw ConfigError(source_ + ": " + (path_.empty() ? key : path_ + "." + key),
                          "unknown key");
      }
    }
  }

  std::size_t array_size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }
  double non_negative() const {
    const double v = number();
    if (v < 0.0) fail("must be non-negative");
    return v;
  }
  long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long>();
  }
  std::uint64_t seed() const {
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    if (j_->is_number_integer() && j_->get<long long>() >= 0) return j_->get<std::uint64_t>();
    fail("expected a non-negative integer");
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Vec3 vec3() const {
    if (!j_->is_array() || j_->size() != 3) fail("expected an array of 3 numbers");
    return Vec3(at(0).number(), at(1).number(), at(2).number());
  }

 private:
  const json* j_;
  std::string source_;
  std::string path_;
};

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte offset -> line:column
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col), msg);
  }
}

template <class T, class F>
void set_if(const Node& n, const char* key, T& field, F get) {
  if (n.has(key)) field = get(n[key]);
}

MassComponent parse_component(const Node& n, bool regolith) {
  n.expect_object({"name", "mass_kg", "position_cm", "extent_cm"});
  MassComponent c;
  if (!n.has("name")) n.fail("missing key 'name'");
  c.name = n["name"].string();
  if (!n.has("mass_kg")) n.fail("missing key 'mass_kg'");
  c.mass_kg = regolith ? n["mass_kg"].non_negative() : n["mass_kg"].positive();
  if (n.has("position_cm")) {
    if (n["position_cm"].raw().is_string()) {
      if (!regolith || n["position_cm"].string() != "sampled") {
        n["position_cm"].fail(regolith ? "expected [x, y, z] or \"sampled\""
                                       : "expected an array of 3 numbers");
      }
    } else {
      c.position_cm = n["position_cm"].vec3();
    }
  } else {
    n.fail("missing key 'position_cm'");
  }
  if (n.has("extent_cm")) {
    const Vec3 e = n["extent_cm"].vec3();
    if (e.minCoeff() < 0.0) n["extent_cm"].fail("extents must be non-negative");
    c.extent_cm = e;
  }
  return c;
}

AtmosphereTable parse_atmosphere(const Node& n) {
  AtmosphereTable table;
  const std::size_t size = n.array_size();
  if (size == 0) n.fail("atmosphere table is empty");
  for (std::size_t i = 0; i < size; ++i) {
    const Node row = n.at(i);
    row.expect_object({"base_km", "density_kgm3", "scale_height_km"});
    for (const char* k : {"base_km", "density_kgm3", "scale_height_km"}) {
      if (!row.has(k)) row.fail(std::string("missing key '") + k + "'");
    }
    table.rows.push_back({row["base_km"].non_negative(), row["density_kgm3"].positive(),
                          row["scale_height_km"].positive()});
    if (i > 0 && !(table.rows[i].base_km > table.rows[i - 1].base_km)) {
      row.fail("rows must be sorted by strictly increasing base_km");
    }
  }
  return table;
}

void apply_orbit(const Node& n, OrbitConfig& o) {
  n.expect_object({"altitude_km", "inclination_deg", "raan_deg", "phase_deg", "mu_m3s2",
                   "earth_radius_m"});
  set_if(n, "altitude_km", o.altitude_km, [](const Node& v) { return v.positive(); });
  set_if(n, "inclination_deg", o.inclination_deg, [](const Node& v) { return v.number(); });
  set_if(n, "raan_deg", o.raan_deg, [](const Node& v) { return v.number(); });
  set_if(n, "phase_deg", o.phase_deg, [](const Node& v) { return v.number(); });
  set_if(n, "mu_m3s2", o.mu, [](const Node& v) { return v.positive(); });
  set_if(n, "earth_radius_m", o.earth_radius_m, [](const Node& v) { return v.positive(); });
}

void apply_environment_keys(const Node& n, EnvironmentConfig& e) {
  auto pos = [](const Node& v) { return v.positive(); };
  set_if(n, "solar_flux_Wm2", e.solar_flux, pos);
  set_if(n, "light_speed_ms", e.light_speed, pos);
  set_if(n, "dipole_b0_T", e.dipole_b0, pos);
  set_if(n, "dipole_tilt_deg", e.dipole_tilt_deg, [](const Node& v) { return v.number(); });
  set_if(n, "earth_rotation_radps", e.earth_rotation_radps,
         [](const Node& v) { return v.non_negative(); });
  if (n.has("sun_direction")) {
    const Vec3 s = n["sun_direction"].vec3();
    if (!(s.norm() > 0.0)) n["sun_direction"].fail("sun direction must be nonzero");
    e.sun_direction = s.normalized();
  }
  if (n.has("atmosphere")) e.atmosphere = parse_atmosphere(n["atmosphere"]);
}

constexpr std::initializer_list<const char*> kEnvironmentKeys = {
    "solar_flux_Wm2",       "light_speed_ms", "dipole_b0_T", "dipole_tilt_deg",
    "earth_rotation_radps", "sun_direction",  "atmosphere",  "orbit"};

fs::path resolve(const fs::path& p, const fs::path& base_dir) {
  if (p.is_absolute()) return p;
  const fs::path local = base_dir / p;
  if (fs::exists(local)) return local;
  const fs::path bundled = data_dir() / p;
  if (fs::exists(bundled)) return bundled;
  return local;
}

}  // namespace

fs::path data_dir() {
  if (const char* env = std::getenv("ADCSLAB_DATA_DIR"); env && *env) return fs::path(env);
  return fs::path(ADCSLAB_DATA_DIR);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario builtin_scenario(ModeKind mode) {
  switch (mode) {
    case ModeKind::kNominal: return nominal_scenario();
    case ModeKind::kSpin: return spin_scenario();
    case ModeKind::kDespin: return despin_scenario();
    case ModeKind::kDetumble:
    case ModeKind::kSafe: break;
  }
  return detumble_scenario();
}

MassCatalog parse_catalog(std::string_view json_text, const std::string& source) {
  const json doc = parse_json(json_text, source);
  const Node root(doc, source);
  root.expect_object({"components", "regolith", "chamber_cm"});
  MassCatalog cat;
  cat.components.clear();
  if (!root.has("components")) root.fail("missing key 'components'");
  const Node comps = root["components"];
  const std::size_t n = comps.array_size();
  if (n == 0) comps.fail("catalog needs at least one component");
  for (std::size_t i = 0; i < n; ++i) cat.components.push_back(parse_component(comps.at(i), false));

  if (!root.has("regolith")) root.fail("missing key 'regolith'");
  const Node reg = root["regolith"];
  cat.regolith = parse_component(reg, true);
  cat.regolith_sampled = reg["position_cm"].raw().is_string();

  if (root.has("chamber_cm")) {
    const Node ch = root["chamber_cm"];
    ch.expect_object({"min", "max"});
    if (!ch.has("min") || !ch.has("max")) ch.fail("needs 'min' and 'max'");
    try {
      cat.chamber = ChamberBounds::make(ch["min"].vec3(), ch["max"].vec3());
    } catch (const InvalidArgumentError& e) {
      ch.fail(e.what());
    }
  }
  if (cat.regolith_sampled) cat.regolith.position_cm = 0.5 * (cat.chamber.min_cm + cat.chamber.max_cm);
  try {
    cat.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source, e.what());
  }
  return cat;
}

MassCatalog load_catalog(const fs::path& path) {
  return parse_catalog(read_text_file(path), path.string());
}

EnvironmentConfig parse_environment(std::string_view json_text, EnvironmentConfig base,
                                    const std::string& source) {
  const json doc = parse_json(json_text, source);
  const Node root(doc, source);
  root.expect_object(kEnvironmentKeys);
  apply_environment_keys(root, base);
  if (root.has("orbit")) apply_orbit(root["orbit"], base.orbit);
  return base;
}

EnvironmentConfig load_environment(const fs::path& path, EnvironmentConfig base) {
  return parse_environment(read_text_file(path), std::move(base), path.string());
}

std::optional<ModeKind> scenario_mode(std::string_view json_text, const std::string& source) {
  const json doc = parse_json(json_text, source);
  const Node root(doc, source);
  if (!root.raw().is_object()) root.fail("expected an object");
  if (!root.has("mode") || !root["mode"].raw().is_object() || !root["mode"].has("initial")) {
    return std::nullopt;
  }
  const Node n = root["mode"]["initial"];
  const auto m = parse_mode(n.string());
  if (!m) n.fail("unknown mode '" + n.string() + "'");
  return m;
}

Scenario parse_scenario(std::string_view json_text, const fs::path& base_dir,
                        std::optional<ModeKind> mode, const std::string& source,
                        std::optional<std::uint64_t> fallback_seed) {
  const json doc = parse_json(json_text, source);
  const Node root(doc, source);
  root.expect_object({"name", "orbit", "environment", "mass", "geometry", "gains", "limits",
                      "mode", "sim", "montecarlo"});
  if (!mode) mode = scenario_mode(json_text, source);
  Scenario s = builtin_scenario(mode.value_or(ModeKind::kDetumble));
  s.initial_mode = mode.value_or(ModeKind::kDetumble);
  if (fallback_seed) s.seed = *fallback_seed;

  if (root.has("name")) s.name = root["name"].string();

  if (root.has("environment")) {
    const Node n = root["environment"];
    n.expect_object({"file", "solar_flux_Wm2", "light_speed_ms", "dipole_b0_T", "dipole_tilt_deg",
                     "earth_rotation_radps", "sun_direction", "atmosphere", "orbit"});
    if (n.has("file")) {
      s.environment = load_environment(resolve(n["file"].string(), base_dir), s.environment);
    }
    apply_environment_keys(n, s.environment);
    if (n.has("orbit")) apply_orbit(n["orbit"], s.environment.orbit);
  }
  if (root.has("orbit")) apply_orbit(root["orbit"], s.environment.orbit);

  if (root.has("mass")) {
    const Node n = root["mass"];
    n.expect_object({"catalog", "regolith", "body_axes"});
    if (n.has("catalog")) {
      s.catalog = load_catalog(resolve(n["catalog"].string(), base_dir));
      if (s.catalog.regolith_sampled) s.regolith = RegolithPolicy::kSampled;
    }
    if (n.has("regolith")) {
      const Node r = n["regolith"];
      if (r.raw().is_string()) {
        const std::string v = r.string();
        if (v == "stowed") {
          s.regolith = RegolithPolicy::kStowed;
        } else if (v == "sampled") {
          s.regolith = RegolithPolicy::kSampled;
        } else {
          r.fail("expected \"stowed\", \"sampled\" or [x, y, z]");
        }
      } else {
        s.regolith = RegolithPolicy::kFixed;
        s.regolith_fixed_cm = r.vec3();
      }
    }
    if (n.has("body_axes")) {
      const std::string v = n["body_axes"].string();
      if (v == "principal") {
        s.body_axes = BodyAxes::kPrincipal;
      } else if (v == "geometric") {
        s.body_axes = BodyAxes::kGeometric;
      } else {
        n["body_axes"].fail("expected \"principal\" or \"geometric\"");
      }
    }
  }

  if (root.has("geometry")) {
    const Node n = root["geometry"];
    n.expect_object({"size_cm", "drag_coefficient", "c_specular", "c_diffuse"});
    if (n.has("size_cm")) {
      const Vec3 size = n["size_cm"].vec3();
      if (!(size.minCoeff() > 0.0)) n["size_cm"].fail("sizes must be positive");
      const auto keep = s.geometry;
      s.geometry = SpacecraftGeometry::cuboid(size);
      s.geometry.drag_coefficient = keep.drag_coefficient;
      s.geometry.c_specular = keep.c_specular;
      s.geometry.c_diffuse = keep.c_diffuse;
    }
    set_if(n, "drag_coefficient", s.geometry.drag_coefficient,
           [](const Node& v) { return v.non_negative(); });
    set_if(n, "c_specular", s.geometry.c_specular, [](const Node& v) { return v.non_negative(); });
    set_if(n, "c_diffuse", s.geometry.c_diffuse, [](const Node& v) { return v.non_negative(); });
  }

  if (root.has("gains")) {
    const Node n = root["gains"];
    n.expect_object({"kp", "kd", "k1", "k2"});
    auto nn = [](const Node& v) { return v.non_negative(); };
    set_if(n, "kp", s.gains.kp, nn);
    set_if(n, "kd", s.gains.kd, nn);
    set_if(n, "k1", s.gains.k1, nn);
    set_if(n, "k2", s.gains.k2, nn);
  }

  if (root.has("limits")) {
    const Node n = root["limits"];
    n.expect_object({"max_dipole_Am2", "max_magnetic_torque_Nm", "max_wheel_torque_Nm",
                     "max_wheel_momentum_Nms"});
    auto pos = [](const Node& v) { return v.positive(); };
    set_if(n, "max_dipole_Am2", s.limits.max_dipole, pos);
    set_if(n, "max_magnetic_torque_Nm", s.limits.max_magnetic_torque, pos);
    set_if(n, "max_wheel_torque_Nm", s.limits.max_wheel_torque, pos);
    set_if(n, "max_wheel_momentum_Nms", s.limits.max_wheel_momentum, pos);
  }

  if (root.has("mode")) {
    const Node n = root["mode"];
    n.expect_object({"initial", "detumble_threshold_radps", "despin_threshold_radps",
                     "spin_rate_rpm", "auto_transitions", "nominal_dwell_s", "spin_duration_s",
                     "spin_cycles", "commands"});
    auto& m = s.modes;
    set_if(n, "detumble_threshold_radps", m.detumble_threshold,
           [](const Node& v) { return v.positive(); });
    set_if(n, "despin_threshold_radps", m.despin_threshold,
           [](const Node& v) { return v.positive(); });
    if (n.has("spin_rate_rpm")) m.spin_rate = n["spin_rate_rpm"].number() * kRpmToRadps;
    set_if(n, "auto_transitions", m.auto_transitions, [](const Node& v) { return v.boolean(); });
    set_if(n, "nominal_dwell_s", m.nominal_dwell_s, [](const Node& v) { return v.non_negative(); });
    set_if(n, "spin_duration_s", m.spin_duration_s, [](const Node& v) { return v.non_negative(); });
    if (n.has("spin_cycles")) {
      const long c = n["spin_cycles"].integer();
      if (c < 0) n["spin_cycles"].fail("must be non-negative");
      m.spin_cycles = static_cast<int>(c);
    }
    if (n.has("commands")) {
      const Node cmds = n["commands"];
      m.commands.clear();
      const std::size_t count = cmds.array_size();
      for (std::size_t i = 0; i < count; ++i) {
        const Node c = cmds.at(i);
        c.expect_object({"t_s", "command"});
        if (!c.has("t_s") || !c.has("command")) c.fail("needs 't_s' and 'command'");
        const auto kind = parse_command(c["command"].string());
        if (!kind) c["command"].fail("unknown command '" + c["command"].string() + "'");
        m.commands.push_back({c["t_s"].non_negative(), *kind});
      }
      std::stable_sort(m.commands.begin(), m.commands.end(),
                       [](const auto& a, const auto& b) { return a.t_s < b.t_s; });
    }
  }

  if (root.has("sim")) {
    const Node n = root["sim"];
    n.expect_object({"dt_s", "substeps", "duration_s", "duration_orbits", "record_every",
                     "fidelity", "error_law", "seed", "disturbances", "orbit_rate_coupling",
                     "initial", "align_tolerance_deg", "settle_band"});
    set_if(n, "dt_s", s.dt, [](const Node& v) { return v.positive(); });
    if (n.has("substeps")) {
      const long k = n["substeps"].integer();
      if (k < 1) n["substeps"].fail("must be >= 1");
      s.substeps = static_cast<int>(k);
    }
    if (n.has("duration_s") && n.has("duration_orbits")) {
      n.fail("give either 'duration_s' or 'duration_orbits', not both");
    }
    set_if(n, "duration_s", s.duration_s, [](const Node& v) { return v.positive(); });
    if (n.has("duration_orbits")) {
      s.duration_s = n["duration_orbits"].positive() * s.environment.orbit.period_s();
    }
    if (n.has("record_every")) {
      const long k = n["record_every"].integer();
      if (k < 0) n["record_every"].fail("must be >= 0");
      s.record_every = static_cast<int>(k);
    }
    if (n.has("fidelity")) {
      const std::string v = n["fidelity"].string();
      if (v == "ideal") {
        s.fidelity = Fidelity::kIdeal;
      } else if (v == "physical") {
        s.fidelity = Fidelity::kPhysical;
      } else {
        n["fidelity"].fail("expected \"ideal\" or \"physical\"");
      }
    }
    if (n.has("error_law")) {
      const std::string v = n["error_law"].string();
      if (v == "additive") {
        s.error_law = ErrorLaw::kAdditive;
      } else if (v == "multiplicative") {
        s.error_law = ErrorLaw::kMultiplicative;
      } else {
        n["error_law"].fail("expected \"additive\" or \"multiplicative\"");
      }
    }
    if (n.has("seed")) s.seed = n["seed"].seed();
    if (n.has("disturbances")) {
      const Node d = n["disturbances"];
      d.expect_object({"drag", "srp", "gravity_gradient"});
      auto b = [](const Node& v) { return v.boolean(); };
      set_if(d, "drag", s.disturbances.drag, b);
      set_if(d, "srp", s.disturbances.srp, b);
      set_if(d, "gravity_gradient", s.disturbances.gravity_gradient, b);
    }
    set_if(n, "orbit_rate_coupling", s.orbit_rate_coupling,
           [](const Node& v) { return v.boolean(); });
    set_if(n, "align_tolerance_deg", s.align_tolerance_deg,
           [](const Node& v) { return v.positive(); });
    if (n.has("settle_band")) {
      const double b = n["settle_band"].number();
      if (!(b > 0.0 && b < 1.0)) n["settle_band"].fail("must lie in (0, 1)");
      s.settle_band = b;
    }
    if (n.has("initial")) {
      const Node i = n["initial"];
      i.expect_object({"q", "euler_deg", "omega_radps", "omega_rpm"});
      if (i.has("q") && i.has("euler_deg")) i.fail("give either 'q' or 'euler_deg', not both");
      if (i.has("omega_radps") && i.has("omega_rpm")) {
        i.fail("give either 'omega_radps' or 'omega_rpm', not both");
      }
      if (i.has("q")) {
        const Node q = i["q"];
        if (q.array_size() != 4) q.fail("expected [q0, q1, q2, q3]");
        const Vec4 v(q.at(0).number(), q.at(1).number(), q.at(2).number(), q.at(3).number());
        if (!(v.norm() > 0.0)) q.fail("quaternion must be nonzero");
        s.initial.q = normalize_canonical(v);
      }
      if (i.has("euler_deg")) {
        const Vec3 e = i["euler_deg"].vec3();
        s.initial.q = normalize_canonical(euler_to_quat({e.x(), e.y(), e.z()}));
      }
      if (i.has("omega_radps")) s.initial.omega = i["omega_radps"].vec3();
      if (i.has("omega_rpm")) s.initial.omega = i["omega_rpm"].vec3() * kRpmToRadps;
    }
  }

  if (root.has("montecarlo")) {
    const Node n = root["montecarlo"];
    n.expect_object({"runs", "sample_regolith", "omega_rpm"});
    if (n.has("runs")) {
      const long r = n["runs"].integer();
      if (r < 1) n["runs"].fail("must be >= 1");
      s.monte_carlo.runs = static_cast<std::size_t>(r);
    }
    set_if(n, "sample_regolith", s.monte_carlo.sample_regolith,
           [](const Node& v) { return v.boolean(); });
    if (n.has("omega_rpm")) {
      const Node r = n["omega_rpm"];
      if (r.array_size() != 2) r.fail("expected [lo, hi]");
      const double lo = r.at(0).number(), hi = r.at(1).number();
      if (lo > hi) r.fail("lo must not exceed hi");
      s.monte_carlo.omega_rpm = std::make_pair(lo, hi);
    }
  }

  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source, e.what());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(source, e.what());
  }
  return s;
}

Scenario load_scenario(const fs::path& path, std::optional<ModeKind> mode,
                       std::optional<std::uint64_t> fallback_seed) {
  return parse_scenario(read_text_file(path), path.parent_path(), mode, path.string(),
                        fallback_seed);
}

}  // namespace adcslab
