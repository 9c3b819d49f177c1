#include <doctest.h>

#include <cmath>
#include <random>

#include "adcslab/attitude.hpp"
#include "adcslab/random.hpp"

using namespace adcslab;

namespace {

Vec4 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec4 q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale),
              uniform(rng, -scale, scale));
}

// Rodrigues' formula, independent of the quaternion code.
Mat3 rodrigues(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(angle) * kx + (1 - std::cos(angle)) * kx * kx;
}

}  // namespace

TEST_CASE("quaternion derivative at identity") {
  const auto q = UnitQuaternion::identity();
  CHECK(quat_derivative(q, Vec3::Zero()).isZero(0.0));
  const Vec4 d = quat_derivative(q, Vec3(0.3, 0, 0));
  CHECK(d.isApprox(Vec4(0, 0.15, 0, 0)));
  const Vec4 e = quat_derivative(q, Vec3(0.1, -0.2, 0.4));
  CHECK(e.isApprox(Vec4(0, 0.05, -0.1, 0.2)));
}

TEST_CASE("quaternion derivative is tangent to the unit sphere") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec4 q = random_unit(rng);
    const Vec3 w = random_vec(rng, 5.0);
    CHECK(std::abs(q.dot(quat_derivative(q, w))) < 1e-14);
  }
}

TEST_CASE("quaternion derivative is right multiplication by the body rate") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto q = UnitQuaternion::normalized(random_unit(rng));
    const Vec3 w = random_vec(rng, 2.0);
    // 0.5 q (x) (0, w) with the product written out component by component
    const double q0 = q.w(), q1 = q.x(), q2 = q.y(), q3 = q.z();
    const Vec4 expect = 0.5 * Vec4(-q1 * w.x() - q2 * w.y() - q3 * w.z(),
                                   q0 * w.x() + q2 * w.z() - q3 * w.y(),
                                   q0 * w.y() + q3 * w.x() - q1 * w.z(),
                                   q0 * w.z() + q1 * w.y() - q2 * w.x());
    CHECK((quat_derivative(q, w) - expect).norm() < 1e-15);
  }
}

TEST_CASE("rotation matrix matches Rodrigues and composes") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = random_vec(rng, 1.0);
    const double angle = uniform(rng, -kPi, kPi);
    const auto q = UnitQuaternion::from_axis_angle(axis, angle);
    CHECK((q.to_rotation_matrix() - rodrigues(axis, angle)).cwiseAbs().maxCoeff() < 1e-14);

    const auto p = UnitQuaternion::normalized(random_unit(rng));
    const Mat3 lhs = (p * q).to_rotation_matrix();
    const Mat3 rhs = p.to_rotation_matrix() * q.to_rotation_matrix();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p * p.conjugate()).coeffs().isApprox(Vec4(1, 0, 0, 0)));
  }
}

TEST_CASE("canonical sign") {
  CHECK(normalize_canonical(Vec4(-2, 0, 0, 0)).coeffs() == Vec4(1, 0, 0, 0));
  CHECK(normalize_canonical(Vec4(-1, 1, -1, 1)).coeffs().isApprox(Vec4(0.5, -0.5, 0.5, -0.5)));
  CHECK(normalize_canonical(Vec4(0, -1, 2, 0)).x() > 0.0);
  CHECK(normalize_canonical(Vec4(0, 0, -3, 1)).coeffs().isApprox(Vec4(0, 0, 3, -1).normalized()));
  CHECK_THROWS_AS(normalize_canonical(Vec4::Zero()), ZeroQuaternionError);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Vec4 raw = random_unit(rng) * uniform(rng, 0.1, 10.0);
    const auto c = normalize_canonical(raw);
    CHECK(std::abs(c.coeffs().norm() - 1.0) < 1e-12);
    CHECK(c.w() >= 0.0);
    // q and -q are the same rotation
    CHECK(normalize_canonical(-raw) == c);
    CHECK(normalize_canonical(c).coeffs().isApprox(c.coeffs(), 1e-15));
  }
}

TEST_CASE("body rate derivative") {
  const auto j = InertiaTensor::diagonal(1, 2, 3);
  CHECK(body_rates_derivative(j, Vec3(1, 1, 1), Vec3::Zero(), Vec3::Zero())
            .isApprox(Vec3(-1, 1, -1.0 / 3.0)));
  // principal-axis spin is an equilibrium
  CHECK(body_rates_derivative(j, Vec3(0, 4, 0), Vec3::Zero(), Vec3::Zero()).isZero(0.0));
  // spherical body: no gyroscopic term
  const auto s = InertiaTensor::diagonal(2, 2, 2);
  CHECK(body_rates_derivative(s, Vec3(1, -2, 3), Vec3::Zero(), Vec3::Zero()).isZero(1e-15));
  // torques enter through J^-1
  CHECK(body_rates_derivative(j, Vec3::Zero(), Vec3(1, 2, 3), Vec3(1, 0, 0))
            .isApprox(Vec3(2, 1, 1)));
}

TEST_CASE("inertia validation") {
  CHECK_THROWS_AS(InertiaTensor::diagonal(1, 1, 0), SingularInertiaError);
  CHECK_THROWS_AS(InertiaTensor::diagonal(1, 1, 3), SingularInertiaError);  // 1 + 1 < 3
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 1e-3;
  CHECK_THROWS_AS(InertiaTensor::from_matrix(asym), SingularInertiaError);
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(InertiaTensor::from_matrix(bad), SingularInertiaError);
  CHECK_NOTHROW(InertiaTensor::diagonal(1, 1, 2));  // flat plate, triangle equality
  const auto j = InertiaTensor::diagonal(2, 3, 4);
  CHECK((j.matrix() * j.inverse()).isApprox(Mat3::Identity()));
}

TEST_CASE("rk4 matches the exact constant-rate rotation") {
  // torque-free spherical body: omega constant, q(t) = q0 (x) exp(w t / 2)
  const auto j = InertiaTensor::diagonal(1, 1, 1);
  const Vec3 w(0.3, -0.2, 0.5);
  AttitudeState s;
  s.q = UnitQuaternion::from_axis_angle(Vec3(1, 2, 3), 0.7);
  s.omega = w;
  const auto q0 = s.q;
  const auto dyn = rigid_body_dynamics(j, Vec3::Zero(), Vec3::Zero());
  for (int k = 0; k < 1000; ++k) s = rk4_step(s, dyn, 0.01);
  const auto exact = normalize_canonical(q0 * UnitQuaternion::from_axis_angle(w, w.norm() * 10.0));
  CHECK((s.q.coeffs() - exact.coeffs()).norm() < 1e-10);
  CHECK(s.t == doctest::Approx(10.0));
  CHECK(s.omega.isApprox(w));
}

TEST_CASE("rk4 converges at fourth order") {
  const auto j = InertiaTensor::diagonal(0.03, 0.028, 0.002);
  const auto dyn = rigid_body_dynamics(j, Vec3::Zero(), Vec3::Zero());
  auto run = [&](double dt) {
    AttitudeState s;
    s.omega = Vec3(0.2, 0.1, 1.0);
    const int n = static_cast<int>(std::lround(4.0 / dt));
    for (int k = 0; k < n; ++k) s = rk4_step(s, dyn, dt);
    return s.omega;
  };
  const Vec3 ref = run(0.0025);
  const double e1 = (run(0.04) - ref).norm();
  const double e2 = (run(0.02) - ref).norm();
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("rk4 rejects bad steps and non-finite states") {
  const auto j = InertiaTensor::diagonal(1, 1, 1);
  AttitudeState s;
  CHECK_THROWS_AS(rk4_step(s, rigid_body_dynamics(j, Vec3::Zero(), Vec3::Zero()), 0.0),
                  InvalidArgumentError);
  const Vec3 inf(std::numeric_limits<double>::infinity(), 0, 0);
  CHECK_THROWS_AS(rk4_step(s, rigid_body_dynamics(j, inf, Vec3::Zero()), 0.1),
                  NonFiniteStateError);
}

TEST_CASE("Euler angles") {
  const auto e = quat_to_euler(euler_to_quat({10, 20, 30}));
  CHECK(e.roll_deg == doctest::Approx(10));
  CHECK(e.pitch_deg == doctest::Approx(20));
  CHECK(e.yaw_deg == doctest::Approx(30));

  // 3-2-1: yaw about z applied first in the body-to-orbit product
  const auto yaw = euler_to_quat({0, 0, 90});
  CHECK(yaw.body_to_orbit(Vec3::UnitX()).isApprox(Vec3::UnitY()));

  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const EulerAngles in{uniform(rng, -179, 179), uniform(rng, -89, 89), uniform(rng, -179, 179)};
    const auto out = quat_to_euler(euler_to_quat(in));
    CHECK(out.roll_deg == doctest::Approx(in.roll_deg).epsilon(1e-9));
    CHECK(out.pitch_deg == doctest::Approx(in.pitch_deg).epsilon(1e-9));
    CHECK(out.yaw_deg == doctest::Approx(in.yaw_deg).epsilon(1e-9));
  }
}

TEST_CASE("Euler angles at gimbal lock fold roll into yaw") {
  for (double pitch : {90.0, -90.0}) {
    for (double roll : {-60.0, 0.0, 35.0}) {
      const auto q = euler_to_quat({roll, pitch, 20.0});
      const auto e = quat_to_euler(q);
      CHECK(e.roll_deg == 0.0);
      CHECK(e.pitch_deg == pitch);
      // same rotation
      const auto back = euler_to_quat(e);
      CHECK((back.to_rotation_matrix() - q.to_rotation_matrix()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  const auto e = quat_to_euler(normalize_canonical(euler_to_quat({90, 90, 90})));
  CHECK(e.pitch_deg == 90.0);
  CHECK(e.roll_deg == 0.0);
}

TEST_CASE("wrap_deg") {
  CHECK(wrap_deg(180) == 180);
  CHECK(wrap_deg(-180) == 180);
  CHECK(wrap_deg(540) == 180);
  CHECK(wrap_deg(190) == doctest::Approx(-170));
  CHECK(wrap_deg(-0.0) == 0.0);
  CHECK(!std::signbit(wrap_deg(-0.0)));
}
