#pragma once

#include <vector>

#include "seaarm/arm_model.hpp"
#include "seaarm/qp_solver.hpp"

namespace seaarm {

struct TrackerConfig {
  Mat6 q_weight{Mat6::Identity() * 100.0};
  Mat6 r_weight{Mat6::Identity() * 0.1};
  int horizon{10};
  double dt{0.01};
  double damping{0.01};  ///< damped least-squares factor in the IK map
  Mat6 k_feedback{(Vec6() << 60, 60, 60, 40, 40, 40).finished().asDiagonal()};
  /// Null-space centering toward `posture`, applied after the task map so the
  /// redundant joint does not wind up under periodic base motion. Zero gain
  /// disables the term.
  double posture_gain{0.0};
  JointVector posture{JointVector::Zero()};
  /// Fraction of each velocity bound actually commanded. The inner servo
  /// overshoots a saturated command while catching up, so commanding the full
  /// bound would carry the plant slightly past the hard limit.
  double velocity_headroom{1.0};

  void validate() const;
};

/// Desired end-effector poses at the current tick and the next `horizon`
/// ticks (horizon + 1 entries).
struct ReferenceWindow {
  std::vector<Pose> poses;
};

/// Joint velocity box that keeps position, velocity, acceleration and jerk
/// limits reachable from the current configuration within one period.
struct VelocityBounds {
  JointVector lower, upper;
  bool position_clamped{false};  ///< the query configuration sat outside the position limits
};

VelocityBounds velocity_bounds(const JointVector& q, const JointLimits& limits, double dt);

/// Stacked QP over the horizon: decision variable is the task-velocity
/// sequence, the plant model is a task-space integrator, and every step is
/// bound by the velocity box mapped through the damped pseudo-inverse of J.
QpProblem build_qp(const Pose& current, const ReferenceWindow& ref, const Jacobian& jac,
                   const VelocityBounds& bounds, const TrackerConfig& cfg);

struct TrackerStep {
  TaskTwist twist;             ///< first optimized task velocity
  JointVector qd_command;      ///< joint velocity handed to the joint controller
  JointVector q_desired;       ///< integrated desired configuration
  int qp_iterations{0};
  QpStatus qp_status{QpStatus::kOptimal};
  bool velocity_clipped{false};
};

/// Receding-horizon task-space tracker with joint-limit awareness.
class MpcTracker {
 public:
  explicit MpcTracker(const TrackerConfig& cfg);

  TrackerStep control_step(const Pose& current, const ReferenceWindow& ref, const JointVector& q,
                           const Jacobian& jac, const JointLimits& limits);

  const TrackerConfig& config() const { return cfg_; }

 private:
  TrackerConfig cfg_;
  QpSolver solver_;
};

/// One-step task-space law: u = xdot_d + K (x_d - x), pushed through the
/// damped pseudo-inverse and clipped to the velocity limits. No position,
/// acceleration or jerk handling.
TrackerStep traditional_step(const Pose& current, const Pose& desired, const TaskTwist& feedforward,
                             const JointVector& q, const Jacobian& jac, const JointLimits& limits,
                             const TrackerConfig& cfg);

}  // namespace seaarm
