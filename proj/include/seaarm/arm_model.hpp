#pragma once

#include <array>

#include "seaarm/types.hpp"

namespace seaarm {

/// One revolute joint: a fixed transform from the parent frame to the joint
/// frame, plus the rotation axis expressed in the joint frame.
struct JointGeometry {
  Pose parent_to_joint;
  Vec3 axis{Vec3::UnitZ()};
};

/// Serial 7-R chain. Frame 0 is the arm mount; the flange transform maps the
/// last joint frame to the end effector.
class KinematicChain {
 public:
  KinematicChain(const std::array<JointGeometry, kNumJoints>& joints, const Pose& flange);

  /// Z-Y-Z-Y-Z-Y-Z axis layout with 0.34 m shoulder riser, two 0.40 m arm
  /// segments and a 0.126 m flange offset.
  static KinematicChain default_arm();

  const JointGeometry& joint(int i) const { return joints_[static_cast<size_t>(i)]; }
  const Pose& flange() const { return flange_; }

 private:
  std::array<JointGeometry, kNumJoints> joints_;
  Pose flange_;
};

/// Position and velocity limits per joint, plus acceleration and jerk
/// magnitudes used when shrinking velocity bounds near the limits.
struct JointLimits {
  JointVector position_lower, position_upper;
  JointVector velocity_lower, velocity_upper;
  JointVector accel_lower, accel_upper;
  JointVector jerk_lower, jerk_upper;

  JointLimits(const JointVector& q_l, const JointVector& q_u, const JointVector& qd_u,
              const JointVector& qdd_u, const JointVector& qddd_u);

  /// Factory-rated limits of the 7-DoF arm the controller targets.
  static JointLimits default_arm();
};

Pose forward_kinematics(const KinematicChain& chain, const JointVector& q, const Pose& base);

/// World-frame geometric Jacobian: row 0..2 linear, 3..5 angular.
Jacobian geometric_jacobian(const KinematicChain& chain, const JointVector& q, const Pose& base);

/// Task-space deviation [p_d - p; vec(q_d * q^-1)] with the quaternion part
/// sign-normalized so the scalar of the deviation is non-negative.
Vec6 pose_deviation(const Pose& current, const Pose& desired);

/// Damped least-squares inverse kinematics: qd = J^T (rho I + J J^T)^{-1} u.
JointVector damped_pinv_velocity(const Jacobian& jac, const Vec6& twist, double damping);

}  // namespace seaarm
