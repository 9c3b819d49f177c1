#include "adcslab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "adcslab/random.hpp"

namespace adcslab {

void Scenario::validate() const {
  catalog.validate();
  environment.orbit.validate();
  geometry.validate();
  gains.validate();
  limits.validate();
  if (!(dt > 0.0)) throw InvalidArgumentError("dt must be positive");
  if (!(duration_s > 0.0)) throw InvalidArgumentError("duration must be positive");
  if (dt > duration_s) throw InvalidArgumentError("dt must not exceed the duration");
  if (substeps < 1) throw InvalidArgumentError("substeps must be >= 1");
  if (record_every < 0) throw InvalidArgumentError("record_every must be >= 0");
  if (!(settle_band > 0.0 && settle_band < 1.0)) {
    throw InvalidArgumentError("settle band must lie in (0, 1)");
  }
  if (!initial.omega.allFinite()) throw InvalidArgumentError("initial rates must be finite");
  if (regolith == RegolithPolicy::kFixed && !regolith_fixed_cm.allFinite()) {
    throw InvalidArgumentError("fixed regolith position must be finite");
  }
}

MassCatalog Scenario::placed_catalog() const {
  switch (regolith) {
    case RegolithPolicy::kStowed: return catalog.with_regolith_at(catalog.regolith.position_cm);
    case RegolithPolicy::kFixed: return catalog.with_regolith_at(regolith_fixed_cm);
    case RegolithPolicy::kSampled:
      return catalog.with_regolith_at(sample_regolith(catalog.chamber, seed));
  }
  return catalog;
}

int Scenario::effective_record_every() const {
  if (record_every > 0) return record_every;
  if (duration_s <= 120.0) return 1;
  return std::max(1, static_cast<int>(std::lround(1.0 / dt)));
}

BodyModel body_model(const Scenario& s) {
  BodyModel b;
  b.catalog = s.placed_catalog();
  b.cg_cm = compute_cg(b.catalog);
  const InertiaTensor j_geo = inertia_tensor(b.catalog);
  if (s.body_axes == BodyAxes::kPrincipal) {
    const PrincipalAxes axes = principal_axes(j_geo.matrix());
    b.body_to_geometric = axes.body_to_geometric;
    b.inertia = InertiaTensor::from_matrix(Mat3(axes.moments.asDiagonal()));
  } else {
    b.inertia = j_geo;
  }
  const Mat3 geo_to_body = b.body_to_geometric.transpose();
  const Vec3 cg_m = b.cg_cm * 0.01;
  b.geometry = s.geometry;
  for (auto& f : b.geometry.faces) {
    f.normal = geo_to_body * f.normal;
    f.centroid_m = geo_to_body * (f.centroid_m - cg_m);
  }
  return b;
}

Scenario detumble_scenario(double rate_rpm) {
  Scenario s;
  s.name = "detumble";
  s.initial_mode = ModeKind::kDetumble;
  s.initial.omega = Vec3::Constant(rate_rpm * kRpmToRadps);
  s.dt = 0.1;
  // resolves the nutation at 60 rpm (about 6 rad/s for this inertia)
  s.substeps = 10;
  s.duration_s = 12.0 * s.environment.orbit.period_s();
  return s;
}

Scenario spin_scenario() {
  Scenario s;
  s.name = "spin";
  s.initial_mode = ModeKind::kSpin;
  s.initial.omega = Vec3::Zero();
  s.dt = 0.1;
  s.duration_s = 60.0;
  return s;
}

Scenario despin_scenario() {
  Scenario s = spin_scenario();
  s.name = "despin";
  s.initial_mode = ModeKind::kDespin;
  s.initial.omega = Vec3(s.modes.spin_rate, 0.0, 0.0);
  return s;
}

Scenario nominal_scenario() {
  Scenario s;
  s.name = "nominal";
  s.initial_mode = ModeKind::kNominal;
  s.initial.q = normalize_canonical(euler_to_quat({90.0, 90.0, 90.0}));
  s.initial.omega = Vec3::Zero();
  s.dt = 0.1;
  s.duration_s = 4.0 * s.environment.orbit.period_s();
  return s;
}

Scenario conops_scenario() {
  Scenario s;
  s.name = "conops";
  s.initial_mode = ModeKind::kDetumble;
  s.initial.omega = Vec3::Constant(5.0 * kRpmToRadps);
  s.modes.auto_transitions = true;
  s.modes.nominal_dwell_s = 3000.0;
  s.modes.spin_duration_s = 600.0;
  s.dt = 0.1;
  s.substeps = 10;
  s.duration_s = 4.0 * s.environment.orbit.period_s();
  return s;
}

std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kDidNotConverge: return "did_not_converge";
    case RunStatus::kFailed: return "failed";
  }
  return "unknown";
}

namespace {

Dynamics closed_loop_dynamics(const InertiaTensor& j, const Vec3& tau_c, const Vec3& tau_d,
                              double rotor_momentum, bool orbit_coupling, double mean_motion) {
  const Vec3 h_rotor(rotor_momentum, 0.0, 0.0);
  return [=](double, const Vec4& q, const Vec3& omega) {
    StateRate r;
    r.q_dot = quat_derivative(q, omega);
    if (!orbit_coupling) {
      r.omega_dot = j.inverse() * (-omega.cross(j.matrix() * omega + h_rotor) + tau_c + tau_d);
      return r;
    }
    // Body rates are relative to the orbit frame, which turns at -n about y_o.
    const Vec3 w_orbit_body =
        UnitQuaternion::normalized(q).orbit_to_body(Vec3(0.0, -mean_motion, 0.0));
    const Vec3 w_inertial = omega + w_orbit_body;
    const Vec3 w_inertial_dot =
        j.inverse() * (-w_inertial.cross(j.matrix() * w_inertial + h_rotor) + tau_c + tau_d);
    r.omega_dot = w_inertial_dot + omega.cross(w_orbit_body);
    return r;
  };
}

double q_error_norm(const UnitQuaternion& q) { return normalize_canonical(q).vec().norm(); }

}  // namespace

double z_cone_deg(const UnitQuaternion& q) {
  const double c = std::clamp(1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y()), -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

RunOutput run_scenario(const Scenario& s) {
  s.validate();
  const BodyModel body = body_model(s);
  const double period = s.environment.orbit.period_s();
  const double mean_motion = s.environment.orbit.mean_motion();
  const int every = s.effective_record_every();
  const long n_steps = static_cast<long>(std::ceil(s.duration_s / s.dt - 1e-9));

  RunOutput out;
  out.telemetry.reserve(static_cast<std::size_t>(n_steps / every + 2));
  RunResult& res = out.result;
  res.orbit_period_s = period;

  AttitudeState state = s.initial;
  state.t = 0.0;
  state.q = normalize_canonical(state.q);
  Mode mode{s.initial_mode, 0.0, 0, s.initial_mode};
  double t_prev = -std::numeric_limits<double>::infinity();
  res.mode_sequence.push_back(mode.kind);

  for (long k = 0;; ++k) {
    mode = mode_transition(mode, state, s.modes, t_prev);
    if (mode.kind != res.mode_sequence.back()) res.mode_sequence.push_back(mode.kind);

    const EnvironmentSample env = sample_environment(s.environment, state.t, state.q);
    const Vec3 tau_d = total_disturbance(body.geometry, env, body.inertia, Vec3::Zero(),
                                         s.environment.orbit.mu, s.disturbances);

    const ControlOutput law = control_law(mode.kind, state, s.gains, s.modes, s.error_law);
    TorqueCommand cmd;
    WheelStep wheel{0.0, state.wheel_momentum, false, false};
    if (mode.kind != ModeKind::kSafe) {
      cmd = allocate_magnetorquer(law.tau_desired, env.b_body, s.limits, s.fidelity);
      wheel = wheel_step(law.tau_rw_cmd, state.wheel_momentum, s.limits, s.dt);
      cmd.tau_rw = wheel.tau_applied;
      cmd.saturated.wheel_torque = wheel.torque_saturated;
      cmd.saturated.wheel_momentum = wheel.momentum_saturated;
    }
    res.magnetic_saturations += cmd.saturated.magnetic;
    res.wheel_torque_saturations += cmd.saturated.wheel_torque;
    res.wheel_momentum_saturations += cmd.saturated.wheel_momentum;

    if (k % every == 0 || k == n_steps) {
      out.telemetry.push_back({state.t, state.q, state.omega, quat_to_euler(state.q), cmd.tau_m,
                               cmd.tau_rw, state.wheel_momentum, mode.kind, env.b_body});
    }
    if (k == n_steps) break;

    // Wheel gyroscopic coupling only at PHYSICAL fidelity; the rotor carries
    // the opposite of the momentum delivered to the body.
    const double rotor = s.fidelity == Fidelity::kPhysical ? -state.wheel_momentum : 0.0;
    const Dynamics dyn = closed_loop_dynamics(body.inertia, total_control(cmd), tau_d, rotor,
                                              s.orbit_rate_coupling, mean_motion);
    try {
      const double t_now = state.t;
      const double h = s.dt / s.substeps;
      for (int sub = 0; sub < s.substeps; ++sub) state = rk4_step(state, dyn, h);
      state.t = static_cast<double>(k + 1) * s.dt;
      t_prev = t_now;
    } catch (const NonFiniteStateError& e) {
      throw DivergenceError(k, state.t, e.what());
    }
    state.wheel_momentum = wheel.momentum_next;
  }

  res.final_state = state;
  res.final_mode = mode.kind;

  std::optional<double> settled_at;
  switch (s.initial_mode) {
    case ModeKind::kDetumble:
      res.detumble_time_orbits = detumble_time(out.telemetry, s.modes.detumble_threshold, period);
      if (res.detumble_time_orbits) settled_at = *res.detumble_time_orbits * period;
      if (s.modes.auto_transitions) {
        const std::vector<ModeKind> conops{ModeKind::kDetumble, ModeKind::kNominal, ModeKind::kSpin,
                                           ModeKind::kDespin, ModeKind::kNominal};
        const bool visited_all = std::search(res.mode_sequence.begin(), res.mode_sequence.end(),
                                             conops.begin(), conops.end()) !=
                                 res.mode_sequence.end();
        res.status = visited_all ? RunStatus::kConverged : RunStatus::kDidNotConverge;
        settled_at.reset();
      } else {
        res.status = settled_at ? RunStatus::kConverged : RunStatus::kDidNotConverge;
      }
      break;
    case ModeKind::kSpin:
    case ModeKind::kDespin: {
      const Vec3 target =
          s.initial_mode == ModeKind::kSpin ? Vec3(s.modes.spin_rate, 0, 0) : Vec3::Zero();
      res.settle_time_s = settle_time(out.telemetry, target, s.settle_band,
                                      s.settle_band * s.modes.spin_rate);
      settled_at = res.settle_time_s;
      res.status = settled_at ? RunStatus::kConverged : RunStatus::kDidNotConverge;
      break;
    }
    case ModeKind::kNominal:
      res.align_time_s = align_time(out.telemetry, s.align_tolerance_deg);
      settled_at = res.align_time_s;
      res.status = settled_at ? RunStatus::kConverged : RunStatus::kDidNotConverge;
      break;
    case ModeKind::kSafe:
      res.status = RunStatus::kConverged;
      break;
  }
  if (settled_at) {
    for (const auto& r : out.telemetry) {
      if (r.t < *settled_at) continue;
      res.max_q_err_post_settle = std::max(res.max_q_err_post_settle, q_error_norm(r.q));
      res.max_rate_post_settle = std::max(res.max_rate_post_settle, r.omega.norm());
      res.max_cone_deg_post_settle = std::max(res.max_cone_deg_post_settle, z_cone_deg(r.q));
    }
  }
  return out;
}

std::optional<double> detumble_time(const std::vector<TelemetryRecord>& telemetry,
                                    double threshold, double orbit_period_s) {
  if (telemetry.empty()) return std::nullopt;
  std::size_t first_ok = telemetry.size();
  for (std::size_t i = telemetry.size(); i-- > 0;) {
    if (!(telemetry[i].omega.norm() < threshold)) break;
    first_ok = i;
  }
  if (first_ok == telemetry.size()) return std::nullopt;
  return telemetry[first_ok].t / orbit_period_s;
}

std::optional<double> settle_time(const std::vector<TelemetryRecord>& telemetry,
                                  const Vec3& target, double band, double floor) {
  if (telemetry.empty()) return std::nullopt;
  const double tol = target.norm() > 0.0 ? band * target.norm() : floor;
  std::size_t first_ok = telemetry.size();
  for (std::size_t i = telemetry.size(); i-- > 0;) {
    if (!((telemetry[i].omega - target).norm() <= tol)) break;
    first_ok = i;
  }
  if (first_ok == telemetry.size()) return std::nullopt;
  return telemetry[first_ok].t;
}

std::optional<double> align_time(const std::vector<TelemetryRecord>& telemetry, double tol_deg) {
  std::size_t first_ok = telemetry.size();
  for (std::size_t i = telemetry.size(); i-- > 0;) {
    const auto& e = telemetry[i].euler;
    const bool ok = std::abs(e.roll_deg) < tol_deg && std::abs(e.pitch_deg) < tol_deg &&
                    std::abs(e.yaw_deg) < tol_deg;
    if (!ok) break;
    first_ok = i;
  }
  if (first_ok == telemetry.size()) return std::nullopt;
  return telemetry[first_ok].t;
}

Scenario monte_carlo_member(const Scenario& base, std::uint64_t seed, std::size_t index) {
  Scenario s = base;
  s.seed = derive_seed(seed, index);
  if (base.monte_carlo.sample_regolith) s.regolith = RegolithPolicy::kSampled;
  if (base.monte_carlo.omega_rpm) {
    std::mt19937_64 rng(splitmix64(s.seed ^ 0xA5A5A5A5A5A5A5A5ULL));
    const auto [lo, hi] = *base.monte_carlo.omega_rpm;
    for (int i = 0; i < 3; ++i) s.initial.omega[i] = uniform(rng, lo, hi) * kRpmToRadps;
  }
  return s;
}

namespace {

void summarize(MetricSummary& m, double v) {
  if (m.count == 0) {
    m.min = m.max = v;
  } else {
    m.min = std::min(m.min, v);
    m.max = std::max(m.max, v);
  }
  ++m.count;
  m.mean += v;
}

}  // namespace

MonteCarloResult monte_carlo(const Scenario& base, std::size_t n_runs, std::uint64_t seed,
                             unsigned workers) {
  if (n_runs == 0) throw InvalidArgumentError("n_runs must be at least 1");
  base.validate();
  MonteCarloResult out;
  out.runs.resize(n_runs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_runs; i = next++) {
      const Scenario member = monte_carlo_member(base, seed, i);
      MonteCarloRun& run = out.runs[i];
      run.index = i;
      run.seed = member.seed;
      run.regolith_cm = member.placed_catalog().regolith.position_cm;
      run.omega0 = member.initial.omega;
      try {
        run.result = run_scenario(member).result;
      } catch (const Error& e) {
        run.result = RunResult{};
        run.result.status = RunStatus::kFailed;
        run.result.error = e.what();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_runs)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  auto& sum = out.summary;
  sum.runs = n_runs;
  for (const auto& run : out.runs) {
    const auto& r = run.result;
    switch (r.status) {
      case RunStatus::kConverged: ++sum.converged; break;
      case RunStatus::kDidNotConverge: ++sum.did_not_converge; break;
      case RunStatus::kFailed: ++sum.failed; break;
    }
    if (r.detumble_time_orbits) summarize(sum.detumble_time_orbits, *r.detumble_time_orbits);
    if (r.settle_time_s) summarize(sum.settle_time_s, *r.settle_time_s);
    if (r.align_time_s) summarize(sum.align_time_s, *r.align_time_s);
  }
  for (auto* m : {&sum.detumble_time_orbits, &sum.settle_time_s, &sum.align_time_s}) {
    if (m->count > 0) m->mean /= static_cast<double>(m->count);
  }
  return out;
}

}  // namespace adcslab
