#include "adcslab/attitude.hpp"

#include <algorithm>
#include <cmath>

namespace adcslab {

UnitQuaternion UnitQuaternion::normalized(const Vec4& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ZeroQuaternionError();
  return UnitQuaternion(q / n);
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw InvalidArgumentError("rotation axis must be nonzero");
  const double half = 0.5 * angle_rad;
  Vec4 q;
  q << std::cos(half), std::sin(half) * axis / n;
  return normalized(q);
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& rhs) const {
  const double a0 = w();
  const Vec3 a = vec();
  const double b0 = rhs.w();
  const Vec3 b = rhs.vec();
  Vec4 out;
  out << a0 * b0 - a.dot(b), a0 * b + b0 * a + a.cross(b);
  return normalized(out);
}

UnitQuaternion UnitQuaternion::conjugate() const {
  return UnitQuaternion(Vec4(q_[0], -q_[1], -q_[2], -q_[3]));
}

Mat3 UnitQuaternion::to_rotation_matrix() const {
  const double q0 = q_[0], q1 = q_[1], q2 = q_[2], q3 = q_[3];
  Mat3 r;
  r << 1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2),
      2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1),
      2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2);
  return r;
}

UnitQuaternion normalize_canonical(const Vec4& q) {
  UnitQuaternion u = UnitQuaternion::normalized(q);
  Vec4 c = u.coeffs();
  bool flip = c[0] < 0.0;
  if (c[0] == 0.0) {
    for (int i = 1; i < 4; ++i) {
      if (c[i] != 0.0) {
        flip = c[i] < 0.0;
        break;
      }
    }
  }
  if (flip) c = -c;
  // -0.0 would otherwise survive into output files
  for (int i = 0; i < 4; ++i) c[i] += 0.0;
  return UnitQuaternion::normalized(c);
}

Vec4 quat_derivative(const Vec4& q, const Vec3& omega) {
  const double wx = omega.x(), wy = omega.y(), wz = omega.z();
  Eigen::Matrix4d big_omega;
  big_omega << 0, -wx, -wy, -wz,
               wx, 0, wz, -wy,
               wy, -wz, 0, wx,
               wz, wy, -wx, 0;
  return 0.5 * big_omega * q;
}

InertiaTensor InertiaTensor::from_matrix(const Mat3& j) {
  if (!j.allFinite()) throw SingularInertiaError("inertia tensor has non-finite entries");
  const double scale = j.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw SingularInertiaError("inertia tensor is zero");
  if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw SingularInertiaError("inertia tensor is not symmetric");
  }
  const Mat3 sym = 0.5 * (j + j.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(sym, Eigen::EigenvaluesOnly);
  const Vec3 m = eig.eigenvalues();
  if (!(m.minCoeff() > 1e-12 * scale)) {
    throw SingularInertiaError("inertia tensor is not positive definite (min principal moment " +
                               std::to_string(m.minCoeff()) + ")");
  }
  // sorted ascending, so the binding permutation is m0 + m1 >= m2
  if (m[0] + m[1] < m[2] * (1.0 - 1e-12)) {
    throw SingularInertiaError("principal moments violate the triangle inequality");
  }
  return InertiaTensor(sym, sym.inverse());
}

Vec3 InertiaTensor::principal_moments() const {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(j_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

Vec3 body_rates_derivative(const InertiaTensor& j, const Vec3& omega, const Vec3& tau_c,
                           const Vec3& tau_d) {
  const Vec3 h = j.matrix() * omega;
  return j.inverse() * (-omega.cross(h) + tau_c + tau_d);
}

AttitudeState rk4_step(const AttitudeState& state, const Dynamics& dynamics, double dt) {
  if (!(dt > 0.0)) throw InvalidArgumentError("dt must be positive");
  const double t = state.t;
  const Vec4 q = state.q.coeffs();
  const Vec3 w = state.omega;

  const StateRate k1 = dynamics(t, q, w);
  const StateRate k2 = dynamics(t + 0.5 * dt, q + 0.5 * dt * k1.q_dot, w + 0.5 * dt * k1.omega_dot);
  const StateRate k3 = dynamics(t + 0.5 * dt, q + 0.5 * dt * k2.q_dot, w + 0.5 * dt * k2.omega_dot);
  const StateRate k4 = dynamics(t + dt, q + dt * k3.q_dot, w + dt * k3.omega_dot);

  const Vec4 q_next = q + (dt / 6.0) * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
  const Vec3 w_next =
      w + (dt / 6.0) * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);

  const double q_norm = q_next.norm();
  if (!q_next.allFinite() || !w_next.allFinite() || !std::isfinite(q_norm) || q_norm == 0.0) {
    throw NonFiniteStateError("state became non-finite at t = " + std::to_string(t + dt) +
                              " s (step too large?)");
  }
  AttitudeState next = state;
  next.q = normalize_canonical(q_next);
  next.omega = w_next;
  next.t = t + dt;
  return next;
}

Dynamics rigid_body_dynamics(const InertiaTensor& j, const Vec3& tau_c, const Vec3& tau_d) {
  return [j, tau_c, tau_d](double, const Vec4& q, const Vec3& omega) {
    return StateRate{quat_derivative(q, omega), body_rates_derivative(j, omega, tau_c, tau_d)};
  };
}

double wrap_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r + 0.0;
}

EulerAngles quat_to_euler(const UnitQuaternion& q) {
  const double q0 = q.w(), q1 = q.x(), q2 = q.y(), q3 = q.z();
  const double sin_pitch = 2.0 * (q0 * q2 - q1 * q3);
  const double r21 = 2.0 * (q0 * q1 + q2 * q3);
  const double r22 = 1.0 - 2.0 * (q1 * q1 + q2 * q2);
  const double cos_pitch = std::hypot(r21, r22);

  EulerAngles e;
  if (cos_pitch < 1e-12) {
    e.roll_deg = 0.0;
    if (sin_pitch > 0.0) {
      e.pitch_deg = 90.0;
      e.yaw_deg = wrap_deg(2.0 * std::atan2(q3 - q1, q0 + q2) * kRadToDeg);
    } else {
      e.pitch_deg = -90.0;
      e.yaw_deg = wrap_deg(2.0 * std::atan2(q3 + q1, q0 - q2) * kRadToDeg);
    }
    return e;
  }
  e.roll_deg = wrap_deg(std::atan2(r21, r22) * kRadToDeg);
  e.pitch_deg = std::atan2(sin_pitch, cos_pitch) * kRadToDeg;
  e.yaw_deg = wrap_deg(
      std::atan2(2.0 * (q0 * q3 + q1 * q2), 1.0 - 2.0 * (q2 * q2 + q3 * q3)) * kRadToDeg);
  return e;
}

UnitQuaternion euler_to_quat(const EulerAngles& e) {
  const auto qx = UnitQuaternion::from_axis_angle(Vec3::UnitX(), e.roll_deg * kDegToRad);
  const auto qy = UnitQuaternion::from_axis_angle(Vec3::UnitY(), e.pitch_deg * kDegToRad);
  const auto qz = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), e.yaw_deg * kDegToRad);
  return qz * qy * qx;
}

bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace adcslab
