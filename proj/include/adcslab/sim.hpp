#pragma once

// Closed-loop scenario runner, response metrics and the Monte Carlo driver.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adcslab/attitude.hpp"
#include "adcslab/control.hpp"
#include "adcslab/environment.hpp"
#include "adcslab/mass_model.hpp"

namespace adcslab {

enum class RegolithPolicy { kStowed, kFixed, kSampled };

/// Principal: body axes are the principal axes of the placed catalog (the
/// inertia is diagonal). Geometric: body axes stay parallel to the chassis
/// frame and products of inertia are kept.
enum class BodyAxes { kPrincipal, kGeometric };

struct MonteCarloRanges {
  std::size_t runs = 100;           // default batch size for the CLI
  bool sample_regolith = true;
  /// Per-axis initial rate drawn uniformly from [lo, hi] rpm when set.
  std::optional<std::pair<double, double>> omega_rpm;
};

struct Scenario {
  std::string name = "scenario";
  MassCatalog catalog = aosat1_catalog();
  RegolithPolicy regolith = RegolithPolicy::kStowed;
  Vec3 regolith_fixed_cm = Vec3::Zero();

  EnvironmentConfig environment;
  SpacecraftGeometry geometry = aosat1_geometry();
  Gains gains;
  ActuatorLimits limits;
  Fidelity fidelity = Fidelity::kIdeal;
  BodyAxes body_axes = BodyAxes::kPrincipal;
  ErrorLaw error_law = ErrorLaw::kAdditive;

  AttitudeState initial;
  ModeKind initial_mode = ModeKind::kDetumble;
  ModeConfig modes;

  double dt = 0.1;                 // control, actuation and telemetry step
  int substeps = 1;                // RK4 sub-steps per control step
  double duration_s = 12.0 * 5553.6;
  int record_every = 0;            // 0 selects by duration: every step up to 120 s, else ~1 s
  DisturbanceToggles disturbances;
  bool orbit_rate_coupling = false;
  std::uint64_t seed = 0;

  /// Attitude tolerance per Euler axis for the nominal-mode alignment metric.
  double align_tolerance_deg = 5.0;
  /// Fractional band for settle_time on spin/de-spin targets.
  double settle_band = 0.01;

  MonteCarloRanges monte_carlo;

  /// Throws InvalidArgumentError / ConfigError on inconsistent settings.
  void validate() const;
  /// Catalog with the regolith placed according to the policy and seed.
  MassCatalog placed_catalog() const;
  int effective_record_every() const;
};

/// Inertia, geometry and CG offset expressed in the body frame of a scenario.
struct BodyModel {
  MassCatalog catalog;           // with the regolith placed
  Vec3 cg_cm = Vec3::Zero();     // geometric frame
  InertiaTensor inertia;         // body frame
  Mat3 body_to_geometric = Mat3::Identity();
  SpacecraftGeometry geometry;   // body frame, centroids relative to the CG
};

BodyModel body_model(const Scenario& s);

/// Built-in per-mode setups.
Scenario detumble_scenario(double rate_rpm = 35.0);
Scenario spin_scenario();
Scenario despin_scenario();
Scenario nominal_scenario();
Scenario conops_scenario();

struct TelemetryRecord {
  double t = 0.0;
  UnitQuaternion q;
  Vec3 omega = Vec3::Zero();
  EulerAngles euler;
  Vec3 tau_m = Vec3::Zero();
  double tau_rw = 0.0;
  double wheel_momentum = 0.0;
  ModeKind mode = ModeKind::kDetumble;
  Vec3 b_body = Vec3::Zero();   // not written to CSV; used by actuator checks
};

enum class RunStatus { kConverged, kDidNotConverge, kFailed };
std::string_view status_name(RunStatus s);

struct RunResult {
  RunStatus status = RunStatus::kDidNotConverge;
  std::optional<double> detumble_time_orbits;
  std::optional<double> settle_time_s;
  std::optional<double> align_time_s;
  double orbit_period_s = 0.0;
  AttitudeState final_state;
  ModeKind final_mode = ModeKind::kDetumble;
  double max_q_err_post_settle = 0.0;
  double max_rate_post_settle = 0.0;
  double max_cone_deg_post_settle = 0.0;
  int magnetic_saturations = 0;
  int wheel_torque_saturations = 0;
  int wheel_momentum_saturations = 0;
  std::vector<ModeKind> mode_sequence;
  std::string error;
};

struct RunOutput {
  std::vector<TelemetryRecord> telemetry;
  RunResult result;
};

class DivergenceError : public Error {
 public:
  DivergenceError(long step, double t, const std::string& what)
      : Error("divergence at step " + std::to_string(step) + " (t = " + std::to_string(t) +
              " s): " + what),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Runs one closed-loop scenario. Deterministic for a fixed scenario.
/// Throws DivergenceError if the state becomes non-finite.
RunOutput run_scenario(const Scenario& s);

/// First time (in orbits) after which |omega| stays below threshold for the
/// rest of the telemetry; nullopt if the final sample is not below it.
std::optional<double> detumble_time(const std::vector<TelemetryRecord>& telemetry,
                                    double threshold, double orbit_period_s);

/// First time after which |omega - target| <= band |target| for every later
/// sample. For a zero target `floor` is the absolute tolerance.
std::optional<double> settle_time(const std::vector<TelemetryRecord>& telemetry,
                                  const Vec3& target, double band, double floor = 0.0);

/// First time after which every Euler angle stays within tol_deg of zero.
std::optional<double> align_time(const std::vector<TelemetryRecord>& telemetry, double tol_deg);

/// Angle between body z and orbit z, degrees.
double z_cone_deg(const UnitQuaternion& q);

struct MonteCarloRun {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Vec3 regolith_cm = Vec3::Zero();
  Vec3 omega0 = Vec3::Zero();
  RunResult result;
};

struct MetricSummary {
  std::size_t count = 0;
  double min = 0.0, mean = 0.0, max = 0.0;
};

struct MonteCarloSummary {
  std::size_t runs = 0, converged = 0, did_not_converge = 0, failed = 0;
  MetricSummary detumble_time_orbits, settle_time_s, align_time_s;
};

struct MonteCarloResult {
  std::vector<MonteCarloRun> runs;   // ordered by index
  MonteCarloSummary summary;
};

/// Scenario for run `index` of a batch: per-run seed derived from
/// (seed, index), regolith and/or initial rates sampled per base.monte_carlo.
Scenario monte_carlo_member(const Scenario& base, std::uint64_t seed, std::size_t index);

/// n_runs independent runs on `workers` threads. Results are merged by run
/// index, so output does not depend on the worker count. Per-run divergence
/// is recorded as a failed run.
MonteCarloResult monte_carlo(const Scenario& base, std::size_t n_runs, std::uint64_t seed,
                             unsigned workers = 1);

}  // namespace adcslab
