#pragma once

// Control laws, actuator models (3-axis magnetorquers, x-axis reaction
// wheel) and the mode state machine.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adcslab/attitude.hpp"

namespace adcslab {

struct Gains {
  double kp = 9e-5;   // PD attitude gain
  double kd = 9e-3;   // PD rate gain
  double k1 = 7e-3;   // spin law, wheel channel
  double k2 = 7e-4;   // spin law, magnetic channel

  void validate() const;
};

struct ErrorState {
  Vec3 q_e_vec = Vec3::Zero();
  Vec3 omega_e = Vec3::Zero();
};

enum class ErrorLaw { kAdditive, kMultiplicative };

/// Vector-part difference vec(q) - vec(q_d) and omega - omega_d, after
/// sign-canonicalizing both quaternions. kMultiplicative uses vec(q_d* q).
ErrorState error_state(const UnitQuaternion& q, const UnitQuaternion& q_d, const Vec3& omega,
                       const Vec3& omega_d, ErrorLaw law = ErrorLaw::kAdditive);

/// -Kp q_e - Kd omega_e.
Vec3 pd_torque(const ErrorState& err, const Gains& gains);

struct SpinTorques {
  double tau_rw = 0.0;
  Vec3 tau_m = Vec3::Zero();
};

/// Wheel: -K1 omega_e.x. Magnetorquers: -K2 (0, omega_e.y, omega_e.z).
SpinTorques spin_torques(const ErrorState& err, const Gains& gains);

struct ActuatorLimits {
  double max_dipole = 0.2;             // A m^2 per axis
  double max_magnetic_torque = 3.2e-6; // N m per axis, IDEAL fidelity
  double max_wheel_torque = 1e-3;      // N m
  double max_wheel_momentum = 1e-2;    // N m s

  void validate() const;
};

enum class Fidelity { kIdeal, kPhysical };

struct Saturation {
  bool magnetic = false;
  bool wheel_torque = false;
  bool wheel_momentum = false;
};

struct TorqueCommand {
  Vec3 tau_m = Vec3::Zero();    // N m, magnetic torque applied
  Vec3 dipole = Vec3::Zero();   // A m^2, PHYSICAL only
  double tau_rw = 0.0;          // N m, x-axis wheel
  Saturation saturated;
};

/// IDEAL: desired torque clamped per axis. PHYSICAL: dipole
/// m = (B x tau) / |B|^2 clamped per axis, applied torque m x B.
/// Throws ZeroFieldError for PHYSICAL with B = 0.
TorqueCommand allocate_magnetorquer(const Vec3& tau_desired, const Vec3& b_body,
                                    const ActuatorLimits& limits, Fidelity fidelity);

struct WheelStep {
  double tau_applied = 0.0;
  double momentum_next = 0.0;
  bool torque_saturated = false;
  bool momentum_saturated = false;
};

/// Clamps the torque, then trims it so |h| never exceeds the momentum limit.
/// `momentum` is the momentum delivered to the body by the wheel so far.
WheelStep wheel_step(double tau_cmd, double momentum, const ActuatorLimits& limits, double dt);

/// tau_m + (tau_rw, 0, 0).
Vec3 total_control(const TorqueCommand& cmd);

enum class ModeKind { kDetumble, kNominal, kSpin, kDespin, kSafe };

std::string_view mode_name(ModeKind m);
/// Accepts the lower-case names used in configs and CSV ("detumble", ...).
std::optional<ModeKind> parse_mode(std::string_view s);

struct Mode {
  ModeKind kind = ModeKind::kDetumble;
  double entered_at = 0.0;
  int spin_cycles_done = 0;
  ModeKind before_safe = ModeKind::kDetumble;
};

enum class CommandKind { kSafe, kRelease, kSpin, kDespin, kNominal, kDetumble };

struct ScheduledCommand {
  double t_s = 0.0;
  CommandKind kind = CommandKind::kSafe;
};

std::optional<CommandKind> parse_command(std::string_view s);
std::string_view command_name(CommandKind c);

struct ModeConfig {
  double detumble_threshold = 0.01;    // rad/s
  double despin_threshold = 1e-3;      // rad/s
  double spin_rate = kRpmToRadps;      // rad/s about body x
  /// Automatic ConOps progression. When false only explicit commands and the
  /// SAFE fallback change the mode.
  bool auto_transitions = false;
  double nominal_dwell_s = 3000.0;     // NOMINAL time before the scheduled spin-up
  double spin_duration_s = 600.0;      // SPIN time before the scheduled de-spin
  int spin_cycles = 1;
  std::vector<ScheduledCommand> commands;
};

/// Advances the ConOps mode machine for one step at state.t. Commands whose
/// time lies in (t_prev, state.t] are applied in order. SAFE is absorbing
/// until a release command, which returns to DETUMBLE.
Mode mode_transition(const Mode& mode, const AttitudeState& state, const ModeConfig& cfg,
                     double t_prev);

struct ControlOutput {
  Vec3 tau_desired = Vec3::Zero();
  double tau_rw_cmd = 0.0;
};

/// The control law selected by mode; SAFE returns zeros.
ControlOutput control_law(ModeKind mode, const AttitudeState& state, const Gains& gains,
                          const ModeConfig& cfg, ErrorLaw law = ErrorLaw::kAdditive);

}  // namespace adcslab
