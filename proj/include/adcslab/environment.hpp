#pragma once

// Circular LEO orbit, centred-dipole geomagnetic field, fixed inertial sun
// with cylindrical shadow, exponential atmosphere, and the drag, solar
// radiation pressure and gravity-gradient torques.

#include <vector>

#include "adcslab/attitude.hpp"

namespace adcslab {

struct OrbitConfig {
  double altitude_km = 400.0;
  double inclination_deg = 51.6;
  double raan_deg = 0.0;
  double phase_deg = 0.0;        // argument of latitude at t = 0
  double mu = 3.986e14;          // m^3/s^2
  double earth_radius_m = 6.371e6;

  /// Throws InvalidArgumentError outside the [200, 2000] km band.
  void validate() const;
  double radius_m() const { return earth_radius_m + altitude_km * 1e3; }
  double period_s() const;
  double mean_motion() const;
};

struct OrbitState {
  double t = 0.0;
  Vec3 position = Vec3::Zero();  // inertial, m
  Vec3 velocity = Vec3::Zero();  // inertial, m/s
  /// Orbit-frame axes in inertial coordinates: x along velocity, z toward
  /// Earth's centre, y = z cross x.
  Vec3 x_axis, y_axis, z_axis;

  /// Columns are the orbit-frame axes, so v_inertial = M v_orbit.
  Mat3 orbit_to_inertial() const;
};

OrbitState propagate_orbit(const OrbitConfig& cfg, double t);

struct AtmosphereRow {
  double base_km;
  double density_kgm3;
  double scale_height_km;
};

/// Piecewise-exponential density table, rows sorted by base altitude.
struct AtmosphereTable {
  std::vector<AtmosphereRow> rows;
  static AtmosphereTable standard();
};

/// rho0 exp(-(h - h0) / H) using the highest row with h0 <= h.
/// Throws InvalidArgumentError outside [200, 2000] km.
double atmospheric_density(const AtmosphereTable& table, double altitude_km);
double atmospheric_density(double altitude_km);

struct EnvironmentConfig {
  OrbitConfig orbit;
  double solar_flux = 1367.0;         // W/m^2
  double light_speed = 2.998e8;       // m/s
  double dipole_b0 = 3.12e-5;         // T, equatorial surface field
  double dipole_tilt_deg = 11.5;
  double earth_rotation_radps = 7.2921159e-5;
  Vec3 sun_direction = Vec3::UnitX(); // inertial, toward the sun
  AtmosphereTable atmosphere = AtmosphereTable::standard();
};

/// Centred tilted dipole, inertial frame. The dipole axis precesses with
/// Earth rotation about inertial z.
Vec3 magnetic_field(const OrbitState& orbit, double tilt_deg, double b0 = 3.12e-5,
                    double earth_radius_m = 6.371e6, double earth_rotation_radps = 7.2921159e-5);

struct SunSample {
  Vec3 direction;  // unit, spacecraft toward sun, inertial
  bool in_eclipse = false;
};

SunSample sun_direction(const OrbitState& orbit, const EnvironmentConfig& cfg);

struct EnvironmentSample {
  Vec3 b_body = Vec3::Zero();          // T
  Vec3 sun_dir_body = Vec3::UnitX();   // unit
  bool in_eclipse = false;
  double density = 0.0;                // kg/m^3
  Vec3 v_rel_body = Vec3::Zero();      // m/s
  Vec3 r_b_body = Vec3::Zero();        // m, Earth centre to spacecraft
  double solar_pressure = 0.0;         // W / C, N/m^2
};

/// Everything the torque models need at time t for attitude q (body w.r.t.
/// orbit frame).
EnvironmentSample sample_environment(const EnvironmentConfig& cfg, double t,
                                     const UnitQuaternion& q);

struct Face {
  Vec3 normal;       // outward unit normal, body frame
  double area_m2;
  Vec3 centroid_m;   // geometric frame
};

struct SpacecraftGeometry {
  std::vector<Face> faces;
  double drag_coefficient = 2.2;
  double c_specular = 0.6;
  double c_diffuse = 0.26;

  /// Six faces of a cuboid centred on the geometric origin.
  static SpacecraftGeometry cuboid(const Vec3& size_cm);
  /// Throws InvalidArgumentError on non-unit normals, non-positive areas or
  /// reflection coefficients outside the admissible range.
  void validate() const;
};

/// The 3U chassis, 10 x 10 x 34 cm.
SpacecraftGeometry aosat1_geometry();

/// Drag over leading faces. `cg_offset_m` is the CG in the geometric frame;
/// the centre of pressure is the projected-area-weighted leading-face centroid.
Vec3 drag_force(const SpacecraftGeometry& geom, const EnvironmentSample& env);
Vec3 drag_torque(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                 const Vec3& cg_offset_m);

/// Flat-plate solar pressure over illuminated faces; zero in eclipse.
Vec3 srp_force(const SpacecraftGeometry& geom, const EnvironmentSample& env);
Vec3 srp_torque(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                const Vec3& cg_offset_m);

/// (3 mu / |r|^5) r x (J r). Throws InvalidArgumentError for r = 0.
Vec3 gravity_gradient_torque(const InertiaTensor& j, const Vec3& r_b_body, double mu);
Vec3 gravity_gradient_torque(const Mat3& j, const Vec3& r_b_body, double mu);

struct DisturbanceToggles {
  bool drag = true;
  bool srp = true;
  bool gravity_gradient = true;
};

struct DisturbanceTorques {
  Vec3 drag = Vec3::Zero();
  Vec3 srp = Vec3::Zero();
  Vec3 gravity_gradient = Vec3::Zero();
  Vec3 total() const { return drag + srp + gravity_gradient; }
};

DisturbanceTorques disturbance_breakdown(const SpacecraftGeometry& geom,
                                         const EnvironmentSample& env, const InertiaTensor& j,
                                         const Vec3& cg_offset_m, double mu,
                                         const DisturbanceToggles& toggles = {});

/// Sum of drag, SRP and gravity-gradient torques.
Vec3 total_disturbance(const SpacecraftGeometry& geom, const EnvironmentSample& env,
                       const InertiaTensor& j, const Vec3& cg_offset_m, double mu,
                       const DisturbanceToggles& toggles = {});

}  // namespace adcslab
