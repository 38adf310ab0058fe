#include "seaarm/arm_model.hpp"

namespace seaarm {

KinematicChain::KinematicChain(const std::array<JointGeometry, kNumJoints>& joints,
                               const Pose& flange)
    : joints_(joints), flange_(flange) {
  for (int i = 0; i < kNumJoints; ++i) {
    const double n = joints_[static_cast<size_t>(i)].axis.norm();
    if (!(std::abs(n - 1.0) < 1e-12)) {
      throw ConfigError("KinematicChain: axis of joint " + std::to_string(i + 1) +
                        " is not unit length");
    }
  }
}

KinematicChain KinematicChain::default_arm() {
  auto fixed = [](double z) { return Pose(Vec3(0, 0, z), Eigen::Quaterniond::Identity()); };
  std::array<JointGeometry, kNumJoints> joints = {{
      {fixed(0.34), Vec3::UnitZ()},
      {fixed(0.0), Vec3::UnitY()},
      {fixed(0.40), Vec3::UnitZ()},
      {fixed(0.0), Vec3::UnitY()},
      {fixed(0.40), Vec3::UnitZ()},
      {fixed(0.0), Vec3::UnitY()},
      {fixed(0.0), Vec3::UnitZ()},
  }};
  return KinematicChain(joints, fixed(0.126));
}

JointLimits::JointLimits(const JointVector& q_l, const JointVector& q_u, const JointVector& qd_u,
                         const JointVector& qdd_u, const JointVector& qddd_u)
    : position_lower(q_l),
      position_upper(q_u),
      velocity_lower(-qd_u),
      velocity_upper(qd_u),
      accel_lower(-qdd_u),
      accel_upper(qdd_u),
      jerk_lower(-qddd_u),
      jerk_upper(qddd_u) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(q_l[i] < q_u[i])) {
      throw ConfigError("JointLimits: position bounds of joint " + std::to_string(i + 1) +
                        " are not ordered");
    }
    if (!(qd_u[i] > 0.0) || !(qdd_u[i] > 0.0) || !(qddd_u[i] > 0.0)) {
      throw ConfigError("JointLimits: rate limits of joint " + std::to_string(i + 1) +
                        " must be positive");
    }
  }
}

JointLimits JointLimits::default_arm() {
  JointVector q_u, qd_u, qdd_u, qddd_u;
  q_u << 175, 120, 175, 120, 175, 120, 360;
  qd_u << 180, 180, 180, 180, 225, 225, 225;
  qdd_u << 900, 900, 900, 900, 1125, 1125, 1125;
  qddd_u << 18000, 18000, 18000, 18000, 22500, 22500, 22500;
  q_u *= kPi / 180.0;
  qd_u *= kPi / 180.0;
  qdd_u *= kPi / 180.0;
  qddd_u *= kPi / 180.0;
  return JointLimits(-q_u, q_u, qd_u, qdd_u, qddd_u);
}

Pose forward_kinematics(const KinematicChain& chain, const JointVector& q, const Pose& base) {
  Pose pose = base;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointGeometry& jg = chain.joint(i);
    pose = pose * jg.parent_to_joint;
    pose = pose * Pose(Vec3::Zero(), Eigen::Quaterniond(Eigen::AngleAxisd(q[i], jg.axis)));
  }
  return pose * chain.flange();
}

Jacobian geometric_jacobian(const KinematicChain& chain, const JointVector& q, const Pose& base) {
  std::array<Vec3, kNumJoints> origins, axes;
  Pose pose = base;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointGeometry& jg = chain.joint(i);
    pose = pose * jg.parent_to_joint;
    origins[static_cast<size_t>(i)] = pose.position;
    axes[static_cast<size_t>(i)] = pose.orientation * jg.axis;
    pose = pose * Pose(Vec3::Zero(), Eigen::Quaterniond(Eigen::AngleAxisd(q[i], jg.axis)));
  }
  const Vec3 tip = (pose * chain.flange()).position;

  Jacobian jac;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3& z = axes[static_cast<size_t>(i)];
    jac.col(i).head<3>() = z.cross(tip - origins[static_cast<size_t>(i)]);
    jac.col(i).tail<3>() = z;
  }
  return jac;
}

Vec6 pose_deviation(const Pose& current, const Pose& desired) {
  Eigen::Quaterniond dq = desired.orientation * current.orientation.inverse();
  if (dq.w() < 0.0) {
    dq.coeffs() = -dq.coeffs();
  }
  Vec6 d;
  d.head<3>() = desired.position - current.position;
  d.tail<3>() = dq.vec();
  return d;
}

JointVector damped_pinv_velocity(const Jacobian& jac, const Vec6& twist, double damping) {
  if (!(damping > 0.0)) {
    throw ConfigError("damped_pinv_velocity: damping must be positive");
  }
  Mat6 jjt = jac * jac.transpose();
  jjt.diagonal().array() += damping;
  return jac.transpose() * jjt.ldlt().solve(twist);
}

}  // namespace seaarm
