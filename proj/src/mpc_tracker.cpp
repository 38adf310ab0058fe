#include "seaarm/mpc_tracker.hpp"

#include <cmath>

namespace seaarm {

void TrackerConfig::validate() const {
  if (horizon < 1) {
    throw ConfigError("TrackerConfig: horizon must be at least 1");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("TrackerConfig: dt must be positive");
  }
  if (!(damping > 0.0)) {
    throw ConfigError("TrackerConfig: damping must be positive");
  }
  if (posture_gain < 0.0) {
    throw ConfigError("TrackerConfig: posture_gain must be non-negative");
  }
  if (!(velocity_headroom > 0.0) || velocity_headroom > 1.0) {
    throw ConfigError("TrackerConfig: velocity_headroom must be in (0, 1]");
  }
}

VelocityBounds velocity_bounds(const JointVector& q, const JointLimits& limits, double dt) {
  if (!(dt > 0.0)) {
    throw ConfigError("velocity_bounds: dt must be positive");
  }
  VelocityBounds b;
  JointVector qc = q;
  for (int i = 0; i < kNumJoints; ++i) {
    if (qc[i] < limits.position_lower[i] || qc[i] > limits.position_upper[i]) {
      qc[i] = std::clamp(qc[i], limits.position_lower[i], limits.position_upper[i]);
      b.position_clamped = true;
    }
    const double room_up = limits.position_upper[i] - qc[i];
    const double room_dn = qc[i] - limits.position_lower[i];
    const double qdd = limits.accel_upper[i];
    const double qddd = limits.jerk_upper[i];
    b.upper[i] = std::min({room_up / dt, limits.velocity_upper[i],
                           std::sqrt(2.0 * qdd * room_up),
                           std::cbrt(4.5 * qddd * room_up * room_up)});
    b.lower[i] = std::max({-room_dn / dt, limits.velocity_lower[i],
                           -std::sqrt(2.0 * qdd * room_dn),
                           -std::cbrt(4.5 * qddd * room_dn * room_dn)});
  }
  return b;
}

namespace {

Eigen::Matrix<double, kNumJoints, 6> damped_pinv(const Jacobian& jac, double damping) {
  Mat6 jjt = jac * jac.transpose();
  jjt.diagonal().array() += damping;
  return jac.transpose() * jjt.inverse();
}

JointVector posture_centering(const Eigen::Matrix<double, kNumJoints, 6>& pinv,
                              const Jacobian& jac, const JointVector& q,
                              const TrackerConfig& cfg) {
  if (cfg.posture_gain == 0.0) {
    return JointVector::Zero();
  }
  const Eigen::Matrix<double, kNumJoints, kNumJoints> null_proj =
      Eigen::Matrix<double, kNumJoints, kNumJoints>::Identity() - pinv * jac;
  return cfg.posture_gain * (null_proj * (cfg.posture - q));
}

}  // namespace

QpProblem build_qp(const Pose& current, const ReferenceWindow& ref, const Jacobian& jac,
                   const VelocityBounds& bounds, const TrackerConfig& cfg) {
  cfg.validate();
  const int np = cfg.horizon;
  if (static_cast<int>(ref.poses.size()) != np + 1) {
    throw ConfigError("build_qp: reference window must hold horizon + 1 poses");
  }
  const int n = 6 * np;
  const double dt = cfg.dt;

  // The predicted deviation after k steps is dt * sum_{j<k} u_j away from the
  // current deviation, so the Hessian couples step pairs by how many stages
  // both of them influence.
  QpProblem p;
  p.P = MatX::Zero(n, n);
  p.g = VecX::Zero(n);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) {
      const int overlap = np - std::max(i, j);
      p.P.block<6, 6>(6 * i, 6 * j) = 2.0 * dt * dt * static_cast<double>(overlap) * cfg.q_weight;
    }
    p.P.block<6, 6>(6 * i, 6 * i) += 2.0 * cfg.r_weight;
  }
  for (int k = 1; k <= np; ++k) {
    const Vec6 dev = pose_deviation(current, ref.poses[static_cast<size_t>(k)]);
    const Vec6 qd = 2.0 * dt * (cfg.q_weight * dev);
    for (int j = 0; j < k; ++j) {
      p.g.segment<6>(6 * j) -= qd;
    }
  }

  const Eigen::Matrix<double, kNumJoints, 6> pinv = damped_pinv(jac, cfg.damping);
  p.A = MatX::Zero(kNumJoints * np, n);
  p.lb = VecX::Zero(kNumJoints * np);
  p.ub = VecX::Zero(kNumJoints * np);
  for (int k = 0; k < np; ++k) {
    p.A.block<kNumJoints, 6>(kNumJoints * k, 6 * k) = pinv;
    p.lb.segment<kNumJoints>(kNumJoints * k) = bounds.lower;
    p.ub.segment<kNumJoints>(kNumJoints * k) = bounds.upper;
  }
  return p;
}

MpcTracker::MpcTracker(const TrackerConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  QpSettings qs;
  // Tighter than the solver default so the commanded joint velocities sit
  // inside the bounds by a comfortable margin.
  qs.eps_abs = 2.5e-7;
  solver_ = QpSolver(qs);
}

TrackerStep MpcTracker::control_step(const Pose& current, const ReferenceWindow& ref,
                                     const JointVector& q, const Jacobian& jac,
                                     const JointLimits& limits) {
  VelocityBounds bounds = velocity_bounds(q, limits, cfg_.dt);
  bounds.lower *= cfg_.velocity_headroom;
  bounds.upper *= cfg_.velocity_headroom;
  const QpProblem qp = build_qp(current, ref, jac, bounds, cfg_);
  const QpSolution sol = solver_.solve(qp);

  TrackerStep out;
  out.qp_iterations = sol.iterations;
  out.qp_status = sol.status;
  Vec6 u0 = sol.x.head<6>();
  if (sol.status == QpStatus::kInfeasible) {
    u0.setZero();
  }
  out.twist = TaskTwist::from_vector(u0);
  const Eigen::Matrix<double, kNumJoints, 6> pinv = damped_pinv(jac, cfg_.damping);
  JointVector qd = pinv * u0 + posture_centering(pinv, jac, q, cfg_);
  for (int i = 0; i < kNumJoints; ++i) {
    if (qd[i] < bounds.lower[i] || qd[i] > bounds.upper[i]) {
      qd[i] = std::clamp(qd[i], bounds.lower[i], bounds.upper[i]);
      out.velocity_clipped = true;
    }
  }
  out.qd_command = qd;
  out.q_desired = q + qd * cfg_.dt;
  return out;
}

TrackerStep traditional_step(const Pose& current, const Pose& desired, const TaskTwist& feedforward,
                             const JointVector& q, const Jacobian& jac, const JointLimits& limits,
                             const TrackerConfig& cfg) {
  cfg.validate();
  const Vec6 u = feedforward.vector() + cfg.k_feedback * pose_deviation(current, desired);
  TrackerStep out;
  out.twist = TaskTwist::from_vector(u);
  const Eigen::Matrix<double, kNumJoints, 6> pinv = damped_pinv(jac, cfg.damping);
  JointVector qd = pinv * u + posture_centering(pinv, jac, q, cfg);
  VelocityBounds bounds = velocity_bounds(q, limits, cfg.dt);
  bounds.lower *= cfg.velocity_headroom;
  bounds.upper *= cfg.velocity_headroom;
  for (int i = 0; i < kNumJoints; ++i) {
    if (qd[i] < bounds.lower[i] || qd[i] > bounds.upper[i]) {
      qd[i] = std::clamp(qd[i], bounds.lower[i], bounds.upper[i]);
      out.velocity_clipped = true;
    }
  }
  out.qd_command = qd;
  out.q_desired = q + qd * cfg.dt;
  return out;
}

}  // namespace seaarm
