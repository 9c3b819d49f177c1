#include "adcslab/environment.hpp"

#include <cmath>

namespace adcslab {

void OrbitConfig::validate() const {
  if (!(altitude_km >= 200.0 && altitude_km <= 2000.0)) {
    throw InvalidArgumentError("orbit altitude must be within [200, 2000] km");
  }
  if (!std::isfinite(inclination_deg) || !std::isfinite(raan_deg) || !std::isfinite(phase_deg)) {
    throw InvalidArgumentError("orbit angles must be finite");
  }
  if (!(mu > 0.0) || !(earth_radius_m > 0.0)) {
    throw InvalidArgumentError("Earth constants must be positive");
  }
}

double OrbitConfig::mean_motion() const {
  const double a = radius_m();
  return std::sqrt(mu / (a * a * a));
}

double OrbitConfig::period_s() const { return 2.0 * kPi / mean_motion(); }

Mat3 OrbitState::orbit_to_inertial() const {
  Mat3 m;
  m.col(0) = x_axis;
  m.col(1) = y_axis;
  m.col(2) = z_axis;
  return m;
}

OrbitState propagate_orbit(const OrbitConfig& cfg, double t) {
  if (!(t >= 0.0)) throw InvalidArgumentError("orbit time must be non-negative");
  const double a = cfg.radius_m();
  const double n = cfg.mean_motion();
  const double u = cfg.phase_deg * kDegToRad + n * t;
  const double raan = cfg.raan_deg * kDegToRad;
  const double inc = cfg.inclination_deg * kDegToRad;
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inc), si = std::sin(inc);

  const Vec3 r_hat(co * cu - so * su * ci, so * cu + co * su * ci, su * si);
  const Vec3 t_hat(-co * su - so * cu * ci, -so * su + co * cu * ci, cu * si);

  OrbitState s;
  s.t = t;
  s.position = a * r_hat;
  s.velocity = std::sqrt(cfg.mu / a) * t_hat;
  s.x_axis = t_hat;
  s.z_axis = -r_hat;
  s.y_axis = s.z_axis.cross(s.x_axis);
  return s;
}

AtmosphereTable AtmosphereTable::standard() {
  // Exponential model reference table (base km, kg/m^3, scale height km).
  return {{
      {200, 2.789e-10, 37.105},
      {250, 7.248e-11, 45.546},
      {300, 2.418e-11, 53.628},
      {350, 9.518e-12, 53.298},
      {400, 3.725e-12, 58.515},
      {450, 1.585e-12, 60.828},
      {500, 6.967e-13, 63.822},
      {600, 1.454e-13, 71.835},
      {700, 3.614e-14, 88.667},
      {800, 1.170e-14, 124.64},
      {900, 5.245e-15, 181.05},
      {1000, 3.019e-15, 268.00},
  }};
}

double atmospheric_density(const AtmosphereTable& table, double altitude_km) {
  if (!(altitude_km >= 200.0 && altitude_km <= 2000.0)) {
    throw InvalidArgumentError("atmosphere model valid for 200-2000 km, got " +
                               std::to_string(altitude_km));
  }
  const AtmosphereRow* row = nullptr;
  for (const auto& r : table.rows) {
    if (r.base_km <= altitude_km) row = &r;
  }
  if (row == nullptr) throw InvalidArgumentError("atmosphere table has no row below altitude");
  return row->density_kgm3 * std::exp(-(altitude_km - row->base_km) / row->scale_height_km);
}

double atmospheric_density(double altitude_km) {
  static const AtmosphereTable table = AtmosphereTable::standard();
  return atmospheric_density(table, altitude_km);
}

Vec3 magnetic_field(const OrbitState& orbit, double tilt_deg, double b0, double earth_radius_m,
                    double earth_rotation_radps) {
  const double tilt = tilt_deg * kDegToRad;
  const double lon = earth_rotation_radps * orbit.t;
  // points to the southern hemisphere, like Earth's dipole moment
  const Vec3 m_hat = -Vec3(std::sin(tilt) * std::cos(lon), std::sin(tilt) * std::sin(lon),
                           std::cos(tilt));
  const double r = orbit.position.norm();
  const Vec3 r_hat = orbit.position / r;
  const double scale = b0 * std::pow(earth_radius_m / r, 3);
  return scale * (3.0 * m_hat.dot(r_hat) * r_hat - m_hat);
}

SunSample sun_direction(const OrbitState& orbit, const EnvironmentConfig& cfg) {
  SunSample s;
  s.direction = cfg.sun_direction.normalized();
  const double along = orbit.position.dot(s.direction);
  const double perp = (orbit.position - along * s.direction).norm();
  s.in_eclipse = along < 0.0 && perp < cfg.orbit.earth_radius_m;
  return s;
}

EnvironmentSample sample_environment(const EnvironmentConfig& cfg, double t,
                                     const UnitQuaternion& q) {
  const OrbitState orbit = propagate_orbit(cfg.orbit, t);
  // inertial -> orbit -> body
  const Mat3 inertial_to_body =
      q.to_rotation_matrix().transpose() * orbit.orbit_to_inertial().transpose();
  const SunSample sun = sun_direction(orbit, cfg);

  EnvironmentSample env;
  env.b_body = inertial_to_body * magnetic_field(orbit, cfg.dipole_tilt_deg, cfg.dipole_b0,
                                                  cfg.orbit.earth_radius_m,
                                                  cfg.earth_rotation_radps);
  env.sun_dir_body = inertial_to_body * sun.direction;
  env.in_eclipse = sun.in_eclipse;
  env.density = atmospheric_density(cfg.atmosphere, cfg.orbit.altitude_km);
  env.v_rel_body = inertial_to_body * orbit.velocity;
  env.r_b_body = inertial_to_body * orbit.position;
  env.solar_pressure = cfg.solar_flux / cfg.light_speed;
  return env;
}

SpacecraftGeometry SpacecraftGeometry::cuboid(const Vec3& size_cm) {
  const Vec3 half = 0.5 * size_cm * 0.01;
  const Vec3 d = size_cm * 0.01;
  SpacecraftGeometry g;
  for (int axis = 0; axis < 3; ++axis) {
    const double area = d[(axis + 1) % 3] * d[(axis + 2) % 3];
    for (double sign : {1.0, -1.0}) {
      const Vec3 n = sign * Vec3::Unit(axis);
      g.faces.push_back({n, area, sign * half[axis] * Vec3::Unit(axis)});
    }
  }
  return g;
}

void SpacecraftGeometry::validate() const {
  for (const auto& f : faces) {
    if (std::abs(f.normal.norm() - 1.0) > 1e-9) throw InvalidArgumentError("face normal not unit");
    if (!(f.area_m2 > 0.0)) throw InvalidArgumentError("face area must be positive");
  }
  if (!(drag_coefficient >= 0.0)) throw InvalidArgumentError("drag coefficient must be >= 0");
  if (!(c_specular >= 0.0 && c_diffuse >= 0.0 && c_specular + c_diffuse <= 1.0)) {
    throw InvalidArgumentError("need c_sr, c_dif >= 0 and c_sr + c_dif <= 1");
  }
}

SpacecraftGeometry aosat1_geometry() { return SpacecraftGeometry::cuboid(Vec3(10, 10, 34)); }

namespace {

struct ForceAndCentre {
  Vec3 force = Vec3::Zero();
  Vec3 centre = Vec3::Zero();
  bool any = false;
};

ForceAndCentre drag_sum(const SpacecraftGeometry& geom, const EnvironmentSample& env) {
  ForceAndCentre out;
  const double v = env.v_rel_body.norm();
  if (!(v > 0.0) || env.density == 0.0) return out;
  const Vec3 v_hat = env.v_rel_body / v;
  double projected = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (const auto& f : geom.faces) {
    const double p = v_hat.dot(f.normal) * f.area_m2;
    if (!(p > 0.0)) continue;
    projected += p;
    weighted += p * f.centroid_m;
  }
  if (projected == 0.0) return out;
  out.force = -0.5 * geom.drag_coefficient * env.density * v * v * projected * v_hat;
  out.centre = weighted / projected;
  out.any = true;
  return out;
}

ForceAndCentre srp_sum(const SpacecraftGeometry& geom, const EnvironmentSample& env) {
  ForceAndCentre out;
  if (env.in_eclipse) return out;
  const Vec3 s = env.sun_dir_body.normalized();
  double lit = 0.0;
  Vec3 weighted = Vec3::Zero();
  for (const auto& f : geom.faces) {
    const double cos_theta = f.normal.dot(s);
    if (!(cos_theta > 0.0)) continue;
    const double a = f.area_m2 * cos_theta;
    out.force += -env.solar_pressure * a *
                 ((1.0 - geom.c_specular) * s +
                  2.0 * (geom.c_specular * cos_theta + geom.c_diffuse / 3.0) * f.normal);
    lit += a;
    weighted += a * f.centroid_m;
  }
  if (lit == 0.0) return out;
  out.centre = weighted / lit;
  out.any = true;
  return out;
}

}  // namespace

Vec3 drag_force(const SpacecraftGeometry& geom, const EnvironmentSample& env) {
  return drag_sum(geom, env).force;
}

Vec3 drag_torque(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                 const Vec3& cg_offset_m) {
  const auto d = drag_sum(geom, env);
  if (!d.any) return Vec3::Zero();
  return (d.centre - cg_offset_m).cross(d.force);
}

Vec3 srp_force(const SpacecraftGeometry& geom, const EnvironmentSample& env) {
  return srp_sum(geom, env).force;
}

Vec3 srp_torque(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                const Vec3& cg_offset_m) {
  const auto s = srp_sum(geom, env);
  if (!s.any) return Vec3::Zero();
  return (s.centre - cg_offset_m).cross(s.force);
}

Vec3 gravity_gradient_torque(const Mat3& j, const Vec3& r_b_body, double mu) {
  const double r = r_b_body.norm();
  if (!(r > 0.0)) throw InvalidArgumentError("gravity gradient needs a nonzero radius");
  const double r2 = r * r;
  return (3.0 * mu / (r2 * r2 * r)) * r_b_body.cross(j * r_b_body);
}

Vec3 gravity_gradient_torque(const InertiaTensor& j, const Vec3& r_b_body, double mu) {
  return gravity_gradient_torque(j.matrix(), r_b_body, mu);
}

DisturbanceTorques disturbance_breakdown(const SpacecraftGeometry& geom,
                                         const EnvironmentSample& env, const InertiaTensor& j,
                                         const Vec3& cg_offset_m, double mu,
                                         const DisturbanceToggles& toggles) {
  DisturbanceTorques d;
  if (toggles.drag) d.drag = drag_torque(geom, env, cg_offset_m);
  if (toggles.srp) d.srp = srp_torque(geom, env, cg_offset_m);
  if (toggles.gravity_gradient) d.gravity_gradient = gravity_gradient_torque(j, env.r_b_body, mu);
  return d;
}

Vec3 total_disturbance(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                       const InertiaTensor& j, const Vec3& cg_offset_m, double mu,
                       const DisturbanceToggles& toggles) {
  return disturbance_breakdown(geom, env, j, cg_offset_m, mu, toggles).total();
}

}  // namespace adcslab
