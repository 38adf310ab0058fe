#pragma once

#include <string>
#include <vector>

#include "seaarm/types.hpp"

namespace seaarm {

/// Motion of the floating platform sampled at one instant. Angles are
/// roll-pitch-yaw of the arm mount; the rate and acceleration fields are
/// Euler angle derivatives, not body rates. Linear fields describe the arm
/// mount point in the world frame.
struct BaseState {
  double t{0.0};
  Vec3 rpy{Vec3::Zero()};
  Vec3 rpy_rate{Vec3::Zero()};
  Vec3 rpy_accel{Vec3::Zero()};
  Vec3 position{Vec3::Zero()};
  Vec3 linear_accel{Vec3::Zero()};
};

/// Mount pose in the world frame.
inline Pose base_pose(const BaseState& s) { return Pose(s.position, quat_from_rpy(s.rpy)); }

/// World-frame angular velocity and acceleration of the mount.
inline Vec3 base_angular_velocity(const BaseState& s) {
  return euler_rates_to_angular_velocity(s.rpy, s.rpy_rate);
}
inline Vec3 base_angular_acceleration(const BaseState& s) {
  return euler_rates_to_angular_acceleration(s.rpy, s.rpy_rate, s.rpy_accel);
}

struct SineWave {
  double amplitude{0.0};
  double period_s{1.0};
  double phase_rad{0.0};
};

/// Deterministic platform motion. Either analytic sinusoids per angle plus an
/// optional heave sinusoid, or a recorded attitude trace resampled with a
/// natural cubic spline. The mount sits at a lever arm from the rotation
/// centre, so angular motion induces linear mount acceleration.
class MotionProfile {
 public:
  static MotionProfile analytic(const SineWave& roll, const SineWave& pitch, const SineWave& yaw,
                                const SineWave& heave = {}, const Vec3& mount_offset = Vec3(0, 0, 0.5));

  /// Uniformly sampled attitude rows (radians) starting at t = 0.
  static MotionProfile from_trace(double sample_period_s, std::vector<Vec3> rpy_rows,
                                  const Vec3& mount_offset = Vec3(0, 0, 0.5));

  /// CSV with header t,roll,pitch,yaw; angles in radians, uniform time grid.
  static MotionProfile load_trace_csv(const std::string& path,
                                      const Vec3& mount_offset = Vec3(0, 0, 0.5));

  BaseState sample(double t) const;

  const Vec3& mount_offset() const { return mount_offset_; }

 private:
  MotionProfile() = default;

  bool analytic_{true};
  SineWave roll_, pitch_, yaw_, heave_;
  Vec3 mount_offset_{0, 0, 0.5};

  double trace_dt_{0.0};
  std::vector<Vec3> trace_rpy_;
  std::vector<Vec3> trace_curvature_;
};

}  // namespace seaarm
