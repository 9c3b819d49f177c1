#include "adcslab/control.hpp"

#include <algorithm>
#include <cmath>

namespace adcslab {

void Gains::validate() const {
  if (!(kp > 0.0 && kd > 0.0 && k1 > 0.0 && k2 > 0.0)) {
    throw InvalidArgumentError("all control gains must be strictly positive");
  }
}

void ActuatorLimits::validate() const {
  if (!(max_dipole > 0.0 && max_magnetic_torque > 0.0 && max_wheel_torque > 0.0 &&
        max_wheel_momentum > 0.0)) {
    throw InvalidArgumentError("actuator limits must be strictly positive");
  }
}

ErrorState error_state(const UnitQuaternion& q, const UnitQuaternion& q_d, const Vec3& omega,
                       const Vec3& omega_d, ErrorLaw law) {
  const UnitQuaternion qc = normalize_canonical(q);
  const UnitQuaternion qdc = normalize_canonical(q_d);
  ErrorState e;
  if (law == ErrorLaw::kAdditive) {
    e.q_e_vec = qc.vec() - qdc.vec();
  } else {
    e.q_e_vec = normalize_canonical(qdc.conjugate() * qc).vec();
  }
  e.omega_e = omega - omega_d;
  return e;
}

Vec3 pd_torque(const ErrorState& err, const Gains& gains) {
  return -gains.kp * err.q_e_vec - gains.kd * err.omega_e;
}

SpinTorques spin_torques(const ErrorState& err, const Gains& gains) {
  SpinTorques s;
  s.tau_rw = -gains.k1 * err.omega_e.x();
  s.tau_m = -gains.k2 * Vec3(0.0, err.omega_e.y(), err.omega_e.z());
  return s;
}

namespace {

double clamp_abs(double v, double limit, bool& hit) {
  if (v > limit) {
    hit = true;
    return limit;
  }
  if (v < -limit) {
    hit = true;
    return -limit;
  }
  return v;
}

}  // namespace

TorqueCommand allocate_magnetorquer(const Vec3& tau_desired, const Vec3& b_body,
                                    const ActuatorLimits& limits, Fidelity fidelity) {
  TorqueCommand cmd;
  if (fidelity == Fidelity::kIdeal) {
    for (int i = 0; i < 3; ++i) {
      cmd.tau_m[i] = clamp_abs(tau_desired[i], limits.max_magnetic_torque, cmd.saturated.magnetic);
    }
    return cmd;
  }
  const double b2 = b_body.squaredNorm();
  if (!(b2 > 0.0)) throw ZeroFieldError();
  const Vec3 m = b_body.cross(tau_desired) / b2;
  for (int i = 0; i < 3; ++i) {
    cmd.dipole[i] = clamp_abs(m[i], limits.max_dipole, cmd.saturated.magnetic);
  }
  cmd.tau_m = cmd.dipole.cross(b_body);
  return cmd;
}

WheelStep wheel_step(double tau_cmd, double momentum, const ActuatorLimits& limits, double dt) {
  if (!(dt > 0.0)) throw InvalidArgumentError("dt must be positive");
  WheelStep w;
  double tau = clamp_abs(tau_cmd, limits.max_wheel_torque, w.torque_saturated);
  const double h_max = limits.max_wheel_momentum;
  const double h_next = momentum + tau * dt;
  if (h_next > h_max) {
    tau = std::max(0.0, (h_max - momentum) / dt);
    w.momentum_saturated = true;
  } else if (h_next < -h_max) {
    tau = std::min(0.0, (-h_max - momentum) / dt);
    w.momentum_saturated = true;
  }
  w.tau_applied = tau;
  w.momentum_next = w.momentum_saturated ? std::clamp(momentum + tau * dt, -h_max, h_max)
                                         : momentum + tau * dt;
  return w;
}

Vec3 total_control(const TorqueCommand& cmd) { return cmd.tau_m + Vec3(cmd.tau_rw, 0.0, 0.0); }

std::string_view mode_name(ModeKind m) {
  switch (m) {
    case ModeKind::kDetumble: return "detumble";
    case ModeKind::kNominal: return "nominal";
    case ModeKind::kSpin: return "spin";
    case ModeKind::kDespin: return "despin";
    case ModeKind::kSafe: return "safe";
  }
  return "unknown";
}

std::optional<ModeKind> parse_mode(std::string_view s) {
  for (auto m : {ModeKind::kDetumble, ModeKind::kNominal, ModeKind::kSpin, ModeKind::kDespin,
                 ModeKind::kSafe}) {
    if (mode_name(m) == s) return m;
  }
  return std::nullopt;
}

std::string_view command_name(CommandKind c) {
  switch (c) {
    case CommandKind::kSafe: return "safe";
    case CommandKind::kRelease: return "release";
    case CommandKind::kSpin: return "spin";
    case CommandKind::kDespin: return "despin";
    case CommandKind::kNominal: return "nominal";
    case CommandKind::kDetumble: return "detumble";
  }
  return "unknown";
}

std::optional<CommandKind> parse_command(std::string_view s) {
  for (auto c : {CommandKind::kSafe, CommandKind::kRelease, CommandKind::kSpin,
                 CommandKind::kDespin, CommandKind::kNominal, CommandKind::kDetumble}) {
    if (command_name(c) == s) return c;
  }
  return std::nullopt;
}

namespace {

Mode enter(const Mode& from, ModeKind kind, double t) {
  Mode m = from;
  if (kind == ModeKind::kSafe && from.kind != ModeKind::kSafe) m.before_safe = from.kind;
  m.kind = kind;
  m.entered_at = t;
  return m;
}

Mode apply_command(const Mode& mode, CommandKind c, double t) {
  if (mode.kind == ModeKind::kSafe) {
    return c == CommandKind::kRelease ? enter(mode, ModeKind::kDetumble, t) : mode;
  }
  switch (c) {
    case CommandKind::kSafe: return enter(mode, ModeKind::kSafe, t);
    case CommandKind::kRelease: return mode;
    case CommandKind::kSpin: return enter(mode, ModeKind::kSpin, t);
    case CommandKind::kDespin: return enter(mode, ModeKind::kDespin, t);
    case CommandKind::kNominal: return enter(mode, ModeKind::kNominal, t);
    case CommandKind::kDetumble: return enter(mode, ModeKind::kDetumble, t);
  }
  return mode;
}

}  // namespace

Mode mode_transition(const Mode& mode, const AttitudeState& state, const ModeConfig& cfg,
                     double t_prev) {
  const double t = state.t;
  if (!state.omega.allFinite() || !state.q.coeffs().allFinite() ||
      !std::isfinite(state.wheel_momentum)) {
    return mode.kind == ModeKind::kSafe ? mode : enter(mode, ModeKind::kSafe, t);
  }

  Mode m = mode;
  for (const auto& cmd : cfg.commands) {
    if (cmd.t_s > t_prev && cmd.t_s <= t) m = apply_command(m, cmd.kind, t);
  }
  if (!cfg.auto_transitions || m.kind == ModeKind::kSafe) return m;

  const double rate = state.omega.norm();
  switch (m.kind) {
    case ModeKind::kDetumble:
      if (rate < cfg.detumble_threshold) m = enter(m, ModeKind::kNominal, t);
      break;
    case ModeKind::kNominal:
      if (m.spin_cycles_done < cfg.spin_cycles && t - m.entered_at >= cfg.nominal_dwell_s) {
        m = enter(m, ModeKind::kSpin, t);
      }
      break;
    case ModeKind::kSpin:
      if (t - m.entered_at >= cfg.spin_duration_s) {
        m = enter(m, ModeKind::kDespin, t);
        ++m.spin_cycles_done;
      }
      break;
    case ModeKind::kDespin:
      if (rate < cfg.despin_threshold) m = enter(m, ModeKind::kNominal, t);
      break;
    case ModeKind::kSafe:
      break;
  }
  return m;
}

ControlOutput control_law(ModeKind mode, const AttitudeState& state, const Gains& gains,
                          const ModeConfig& cfg, ErrorLaw law) {
  ControlOutput out;
  switch (mode) {
    case ModeKind::kDetumble:
    case ModeKind::kNominal: {
      const auto err =
          error_state(state.q, UnitQuaternion::identity(), state.omega, Vec3::Zero(), law);
      out.tau_desired = pd_torque(err, gains);
      break;
    }
    case ModeKind::kSpin:
    case ModeKind::kDespin: {
      const Vec3 target = mode == ModeKind::kSpin ? Vec3(cfg.spin_rate, 0, 0) : Vec3::Zero();
      const auto err = error_state(state.q, UnitQuaternion::identity(), state.omega, target, law);
      const auto s = spin_torques(err, gains);
      out.tau_desired = s.tau_m;
      out.tau_rw_cmd = s.tau_rw;
      break;
    }
    case ModeKind::kSafe:
      break;
  }
  return out;
}

}  // namespace adcslab
