#pragma once

// Quaternion/vector math, rigid-body rotational dynamics and the fixed-step
// RK4 integrator. Quaternions are scalar-first (q0, q1, q2, q3) and describe
// the body frame with respect to the orbit frame: v_orbit = R(q) v_body.

#include <functional>

#include <Eigen/Dense>

#include "adcslab/errors.hpp"

namespace adcslab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kRpmToRadps = 2.0 * kPi / 60.0;

class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  static UnitQuaternion identity() { return {}; }

  /// Scales (w, x, y, z) to unit norm without touching its sign.
  static UnitQuaternion normalized(const Vec4& q);

  /// Rotation by `angle_rad` about `axis` (axis need not be unit length).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle_rad);

  double w() const { return q_[0]; }
  double x() const { return q_[1]; }
  double y() const { return q_[2]; }
  double z() const { return q_[3]; }

  /// The vector part (q1, q2, q3).
  Vec3 vec() const { return q_.tail<3>(); }
  const Vec4& coeffs() const { return q_; }

  /// Hamilton product.
  UnitQuaternion operator*(const UnitQuaternion& rhs) const;
  UnitQuaternion conjugate() const;

  /// Body-to-orbit rotation matrix.
  Mat3 to_rotation_matrix() const;
  Vec3 body_to_orbit(const Vec3& v) const { return to_rotation_matrix() * v; }
  Vec3 orbit_to_body(const Vec3& v) const { return to_rotation_matrix().transpose() * v; }

  bool operator==(const UnitQuaternion&) const = default;

 private:
  explicit UnitQuaternion(const Vec4& q) : q_(q) {}
  Vec4 q_{1.0, 0.0, 0.0, 0.0};
};

/// Unit-norm, sign-canonical representative of q: q0 >= 0; when q0 == 0 the
/// first nonzero vector component is made positive.
UnitQuaternion normalize_canonical(const Vec4& q);
inline UnitQuaternion normalize_canonical(const UnitQuaternion& q) {
  return normalize_canonical(q.coeffs());
}

/// (1/2) Omega(omega) q with omega the body rate w.r.t. the orbit frame.
Vec4 quat_derivative(const Vec4& q, const Vec3& omega);
inline Vec4 quat_derivative(const UnitQuaternion& q, const Vec3& omega) {
  return quat_derivative(q.coeffs(), omega);
}

/// Symmetric positive-definite rigid-body inertia in kg m^2.
class InertiaTensor {
 public:
  /// Unit inertia; placeholder until a real tensor is assigned.
  InertiaTensor() : j_(Mat3::Identity()), j_inv_(Mat3::Identity()) {}

  /// Validates symmetry (1e-12 relative), positive definiteness and the
  /// triangle inequality on principal moments. Throws SingularInertiaError.
  static InertiaTensor from_matrix(const Mat3& j);
  static InertiaTensor diagonal(double jxx, double jyy, double jzz) {
    return from_matrix(Vec3(jxx, jyy, jzz).asDiagonal());
  }

  const Mat3& matrix() const { return j_; }
  const Mat3& inverse() const { return j_inv_; }
  Vec3 principal_moments() const;

 private:
  InertiaTensor(const Mat3& j, const Mat3& j_inv) : j_(j), j_inv_(j_inv) {}
  Mat3 j_;
  Mat3 j_inv_;
};

/// J^-1 (-omega x (J omega) + tau_c + tau_d).
Vec3 body_rates_derivative(const InertiaTensor& j, const Vec3& omega, const Vec3& tau_c,
                           const Vec3& tau_d);

struct AttitudeState {
  UnitQuaternion q;
  Vec3 omega = Vec3::Zero();   // rad/s, body frame
  double wheel_momentum = 0.0; // N m s, x-axis wheel
  double t = 0.0;              // s
};

struct StateRate {
  Vec4 q_dot;
  Vec3 omega_dot;
};

/// Rate of the combined (q, omega) state. q is passed un-normalized as the
/// integrator sees it at its internal stages.
using Dynamics = std::function<StateRate(double t, const Vec4& q, const Vec3& omega)>;

/// Classical RK4 step over (q, omega). The quaternion is renormalized and
/// sign-canonicalized afterwards; wheel momentum passes through unchanged.
/// Throws NonFiniteStateError if the result is not finite.
AttitudeState rk4_step(const AttitudeState& state, const Dynamics& dynamics, double dt);

/// Torque-free-plus-applied-torque rigid body dynamics with torques held
/// constant over the step.
Dynamics rigid_body_dynamics(const InertiaTensor& j, const Vec3& tau_c, const Vec3& tau_d);

struct EulerAngles {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double yaw_deg = 0.0;
};

/// 3-2-1 (yaw-pitch-roll) intrinsic angles in degrees. roll/yaw in (-180, 180],
/// pitch in [-90, 90]. At gimbal lock roll is set to 0 and the rotation is
/// folded into yaw.
EulerAngles quat_to_euler(const UnitQuaternion& q);
UnitQuaternion euler_to_quat(const EulerAngles& e);

/// Wraps an angle in degrees into (-180, 180].
double wrap_deg(double deg);

bool all_finite(const Vec3& v);

}  // namespace adcslab
