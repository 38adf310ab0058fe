#pragma once

#include <array>
#include <functional>

#include "seaarm/arm_model.hpp"
#include "seaarm/base_motion.hpp"

namespace seaarm {

/// Mass, centre of mass and rotational inertia of one link, expressed in the
/// link frame with the inertia tensor taken about the centre of mass.
struct LinkInertia {
  double mass{1.0};
  Vec3 com{Vec3::Zero()};
  Mat3 inertia{Mat3::Identity()};

  LinkInertia() = default;
  LinkInertia(double m, const Vec3& c, const Mat3& i);
};

struct PdGains {
  JointVector kp, kd;

  PdGains(const JointVector& p, const JointVector& d);
  static PdGains default_arm();
};

struct SimState {
  JointVector q{JointVector::Zero()};
  JointVector qd{JointVector::Zero()};
  double t{0.0};
};

struct SimDivergence : std::runtime_error {
  double t;
  int joint;
  SimDivergence(double time, int j);
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Joint friction applied inside the plant: coulomb_i tanh(qd_i / smoothing)
/// plus viscous_i qd_i on each joint torque. The tanh keeps the Coulomb term
/// smooth through velocity reversals so the integrator never chatters on the
/// sign change.
struct JointFriction {
  JointVector coulomb{JointVector::Zero()};
  JointVector viscous{JointVector::Zero()};
  double smoothing_rad_s{0.01};
};

/// Rigid-body model of the arm on a moving platform. The platform motion
/// enters the recursive Newton-Euler pass as the twist and acceleration of
/// the mount frame, with gravity folded into the mount linear acceleration.
/// `armature` is the reflected actuator inertia of each geared joint; it adds
/// armature_i qdd_i to the joint torque and so sits on the mass-matrix
/// diagonal without affecting gravity or velocity terms. `friction` acts on
/// the velocity only, so it lands in the bias torque and leaves the mass
/// matrix and the rest configuration untouched.
class ArmDynamics {
 public:
  ArmDynamics(const KinematicChain& chain, const std::array<LinkInertia, kNumJoints>& links,
              const JointLimits& limits, const Vec3& gravity = Vec3(0, 0, -9.81),
              const JointVector& armature = JointVector::Zero(),
              const JointFriction& friction = {});

  static std::array<LinkInertia, kNumJoints> default_links();
  static JointVector default_armature();
  static JointFriction default_friction();

  /// Joint torques that realize qdd at (q, qd) while the mount moves as given.
  JointVector inverse_dynamics(const JointVector& q, const JointVector& qd, const JointVector& qdd,
                               const BaseState& base) const;

  /// Gravity load with the platform level and at rest.
  JointVector gravity_torque(const JointVector& q) const;

  /// Joint-space inertia matrix (depends on q only).
  Mat7 mass_matrix(const JointVector& q) const;

  JointVector forward_dynamics(const JointVector& q, const JointVector& qd, const JointVector& tau,
                               const BaseState& base) const;

  /// Advance one control period with four semi-implicit Euler substeps, the
  /// platform resampled at each substep. Throws SimDivergence when any joint
  /// speed passes ten times its limit.
  SimState step(const SimState& state, const JointVector& tau, const MotionProfile& motion,
                double dt) const;

  const KinematicChain& chain() const { return chain_; }
  const JointLimits& limits() const { return limits_; }

 private:
  KinematicChain chain_;
  std::array<LinkInertia, kNumJoints> links_;
  JointLimits limits_;
  Vec3 gravity_;
  JointVector armature_;
  JointFriction friction_;
};

/// Joint PD with gravity compensation:
/// tau = -Kp (q - q_d) - Kd (qd - qd_d) + g(q).
JointVector pd_gravity_control(const JointVector& q, const JointVector& qd, const JointVector& q_d,
                               const JointVector& qd_d, const PdGains& gains,
                               const std::function<JointVector(const JointVector&)>& gravity_model);

}  // namespace seaarm
