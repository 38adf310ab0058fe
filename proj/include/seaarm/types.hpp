#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace seaarm {

inline constexpr int kNumJoints = 7;

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat7 = Eigen::Matrix<double, kNumJoints, kNumJoints>;
using JointVector = Eigen::Matrix<double, kNumJoints, 1>;
using Jacobian = Eigen::Matrix<double, 6, kNumJoints>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Rigid-body pose. Orientation is a Hamilton quaternion stored scalar-first
/// and kept canonical (w >= 0, unit norm).
struct Pose {
  Vec3 position{Vec3::Zero()};
  Eigen::Quaterniond orientation{Eigen::Quaterniond::Identity()};

  Pose() = default;

  Pose(const Vec3& p, const Eigen::Quaterniond& q) : position(p), orientation(q) {
    const double n = orientation.norm();
    if (!(std::abs(n - 1.0) < 1e-6)) {
      throw ConfigError("Pose: quaternion norm " + std::to_string(n) + " is not unit");
    }
    orientation.normalize();
    canonicalize();
  }

  void canonicalize() {
    if (orientation.w() < 0.0) {
      orientation.coeffs() = -orientation.coeffs();
    }
  }

  /// Composition: this pose applied first, then rhs in this pose's frame.
  Pose operator*(const Pose& rhs) const {
    Pose out;
    out.position = position + orientation * rhs.position;
    out.orientation = orientation * rhs.orientation;
    out.orientation.normalize();
    out.canonicalize();
    return out;
  }

  Eigen::Isometry3d matrix() const {
    Eigen::Isometry3d m = Eigen::Isometry3d::Identity();
    m.linear() = orientation.toRotationMatrix();
    m.translation() = position;
    return m;
  }
};

/// Spatial velocity of the end effector expressed in the world frame.
struct TaskTwist {
  Vec3 linear{Vec3::Zero()};
  Vec3 angular{Vec3::Zero()};

  Vec6 vector() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }

  static TaskTwist from_vector(const Vec6& v) {
    TaskTwist t;
    t.linear = v.head<3>();
    t.angular = v.tail<3>();
    return t;
  }
};

/// Intrinsic roll-pitch-yaw (x, then y, then z axis) to quaternion.
inline Eigen::Quaterniond quat_from_rpy(const Vec3& rpy) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                            Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                            Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()));
}

/// Inverse of quat_from_rpy for |pitch| < pi/2.
inline Vec3 rpy_from_quat(const Eigen::Quaterniond& q) {
  const Mat3 r = q.toRotationMatrix();
  Vec3 rpy;
  rpy.x() = std::atan2(r(2, 1), r(2, 2));
  rpy.y() = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  rpy.z() = std::atan2(r(1, 0), r(0, 0));
  return rpy;
}

/// World-frame angular velocity of a frame whose orientation is
/// R = Rz(yaw) Ry(pitch) Rx(roll) with the given Euler angle rates.
inline Vec3 euler_rates_to_angular_velocity(const Vec3& rpy, const Vec3& rpy_rate) {
  const Mat3 rz = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()).toRotationMatrix();
  const Mat3 rzy = rz * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()).toRotationMatrix();
  return rpy_rate.z() * Vec3::UnitZ() + rpy_rate.y() * (rz * Vec3::UnitY()) +
         rpy_rate.x() * (rzy * Vec3::UnitX());
}

/// Time derivative of euler_rates_to_angular_velocity.
inline Vec3 euler_rates_to_angular_acceleration(const Vec3& rpy, const Vec3& rpy_rate,
                                                const Vec3& rpy_accel) {
  const Mat3 rz = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()).toRotationMatrix();
  const Mat3 rzy = rz * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()).toRotationMatrix();
  const Vec3 ey = rz * Vec3::UnitY();
  const Vec3 ex = rzy * Vec3::UnitX();
  const Vec3 wz = rpy_rate.z() * Vec3::UnitZ();
  const Vec3 wzy = wz + rpy_rate.y() * ey;
  // Axis drift: d/dt ey = wz x ey, d/dt ex = wzy x ex.
  return rpy_accel.z() * Vec3::UnitZ() + rpy_accel.y() * ey + rpy_accel.x() * ex +
         rpy_rate.y() * wz.cross(ey) + rpy_rate.x() * wzy.cross(ex);
}

}  // namespace seaarm
