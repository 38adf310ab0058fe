#include "seaarm/dynamics.hpp"

#include <cmath>

namespace seaarm {

LinkInertia::LinkInertia(double m, const Vec3& c, const Mat3& i) : mass(m), com(c), inertia(i) {
  if (!(mass > 0.0)) {
    throw ConfigError("LinkInertia: mass must be positive");
  }
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ConfigError("LinkInertia: inertia tensor must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  const Vec3 ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    throw ConfigError("LinkInertia: inertia tensor must be positive definite");
  }
  // Principal moments of any rigid body obey the triangle inequality.
  if (ev[0] + ev[1] < ev[2] * (1.0 - 1e-9)) {
    throw ConfigError("LinkInertia: principal moments violate the triangle inequality");
  }
}

PdGains::PdGains(const JointVector& p, const JointVector& d) : kp(p), kd(d) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(kp[i] > 0.0) || !(kd[i] > 0.0)) {
      throw ConfigError("PdGains: gains of joint " + std::to_string(i + 1) + " must be positive");
    }
  }
}

PdGains PdGains::default_arm() {
  JointVector p, d;
  p << 150, 150, 150, 150, 70, 70, 70;
  d << 50, 50, 50, 50, 20, 20, 20;
  return PdGains(p, d);
}

SimDivergence::SimDivergence(double time, int j)
    : std::runtime_error("simulation diverged at t=" + std::to_string(time) + " on joint " +
                         std::to_string(j + 1)),
      t(time),
      joint(j) {}

ArmDynamics::ArmDynamics(const KinematicChain& chain,
                         const std::array<LinkInertia, kNumJoints>& links,
                         const JointLimits& limits, const Vec3& gravity,
                         const JointVector& armature, const JointFriction& friction)
    : chain_(chain),
      links_(links),
      limits_(limits),
      gravity_(gravity),
      armature_(armature),
      friction_(friction) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (armature_[i] < 0.0) {
      throw ConfigError("ArmDynamics: armature inertia must be non-negative");
    }
    if (friction_.coulomb[i] < 0.0 || friction_.viscous[i] < 0.0) {
      throw ConfigError("ArmDynamics: friction coefficients must be non-negative");
    }
  }
  if (friction_.smoothing_rad_s <= 0.0) {
    throw ConfigError("ArmDynamics: friction smoothing width must be positive");
  }
}

std::array<LinkInertia, kNumJoints> ArmDynamics::default_links() {
  auto diag = [](double x, double y, double z) {
    Mat3 m = Mat3::Zero();
    m.diagonal() << x, y, z;
    return m;
  };
  return {{
      {3.5, Vec3(0, 0, 0.03), diag(0.012, 0.012, 0.008)},
      {3.5, Vec3(0, 0, 0.20), diag(0.047, 0.047, 0.004)},
      {2.5, Vec3(0, 0, 0.03), diag(0.009, 0.009, 0.006)},
      {2.5, Vec3(0, 0, 0.20), diag(0.034, 0.034, 0.003)},
      {1.8, Vec3(0, 0, 0.02), diag(0.006, 0.006, 0.004)},
      {1.5, Vec3(0, 0, 0.02), diag(0.005, 0.005, 0.003)},
      {0.5, Vec3(0, 0, 0.06), diag(0.002, 0.002, 0.001)},
  }};
}

JointVector ArmDynamics::default_armature() {
  JointVector a;
  a << 0.55, 0.55, 0.45, 0.45, 0.45, 0.45, 0.35;
  return a;
}

JointFriction ArmDynamics::default_friction() {
  JointFriction f;
  f.coulomb << 5.0, 5.0, 3.8, 3.8, 2.0, 2.0, 1.2;
  f.viscous << 8.0, 8.0, 6.0, 6.0, 1.5, 1.5, 0.8;
  return f;
}

JointVector ArmDynamics::inverse_dynamics(const JointVector& q, const JointVector& qd,
                                          const JointVector& qdd, const BaseState& base) const {
  // Outward pass in link coordinates. The mount frame carries the platform
  // twist, with gravity folded into its linear acceleration.
  const Mat3 rb = quat_from_rpy(base.rpy).toRotationMatrix();
  Vec3 w_prev = rb.transpose() * base_angular_velocity(base);
  Vec3 dw_prev = rb.transpose() * base_angular_acceleration(base);
  Vec3 a_prev = rb.transpose() * (base.linear_accel - gravity_);

  std::array<Mat3, kNumJoints> rot;       // link i -> parent coordinates
  std::array<Vec3, kNumJoints> off;       // link i origin in parent coordinates
  std::array<Vec3, kNumJoints> w, dw, ac;
  std::array<Vec3, kNumJoints> force, torque;

  for (int i = 0; i < kNumJoints; ++i) {
    const size_t k = static_cast<size_t>(i);
    const JointGeometry& jg = chain_.joint(i);
    rot[k] = jg.parent_to_joint.orientation.toRotationMatrix() *
             Eigen::AngleAxisd(q[i], jg.axis).toRotationMatrix();
    off[k] = jg.parent_to_joint.position;
    const Mat3 rt = rot[k].transpose();
    const Vec3 a = jg.axis;

    const Vec3 w_par = rt * w_prev;
    w[k] = w_par + a * qd[i];
    dw[k] = rt * dw_prev + w_par.cross(a * qd[i]) + a * qdd[i];
    ac[k] = rt * (a_prev + dw_prev.cross(off[k]) + w_prev.cross(w_prev.cross(off[k])));

    const LinkInertia& li = links_[k];
    const Vec3 a_com = ac[k] + dw[k].cross(li.com) + w[k].cross(w[k].cross(li.com));
    force[k] = li.mass * a_com;
    torque[k] = li.inertia * dw[k] + w[k].cross(li.inertia * w[k]);

    w_prev = w[k];
    dw_prev = dw[k];
    a_prev = ac[k];
  }

  JointVector tau;
  Vec3 f_child = Vec3::Zero(), n_child = Vec3::Zero();
  for (int i = kNumJoints - 1; i >= 0; --i) {
    const size_t k = static_cast<size_t>(i);
    Vec3 f_down = Vec3::Zero(), n_down = Vec3::Zero();
    if (i + 1 < kNumJoints) {
      const size_t kc = static_cast<size_t>(i + 1);
      f_down = rot[kc] * f_child;
      n_down = rot[kc] * n_child + off[kc].cross(f_down);
    }
    const Vec3 f = force[k] + f_down;
    const Vec3 n = torque[k] + links_[k].com.cross(force[k]) + n_down;
    tau[i] = chain_.joint(i).axis.dot(n) + armature_[i] * qdd[i] +
             friction_.coulomb[i] * std::tanh(qd[i] / friction_.smoothing_rad_s) +
             friction_.viscous[i] * qd[i];
    f_child = f;
    n_child = n;
  }
  return tau;
}

JointVector ArmDynamics::gravity_torque(const JointVector& q) const {
  return inverse_dynamics(q, JointVector::Zero(), JointVector::Zero(), BaseState{});
}

Mat7 ArmDynamics::mass_matrix(const JointVector& q) const {
  const BaseState rest{};
  const JointVector bias = inverse_dynamics(q, JointVector::Zero(), JointVector::Zero(), rest);
  Mat7 m;
  for (int j = 0; j < kNumJoints; ++j) {
    JointVector e = JointVector::Zero();
    e[j] = 1.0;
    m.col(j) = inverse_dynamics(q, JointVector::Zero(), e, rest) - bias;
  }
  return 0.5 * (m + m.transpose());
}

JointVector ArmDynamics::forward_dynamics(const JointVector& q, const JointVector& qd,
                                          const JointVector& tau, const BaseState& base) const {
  const JointVector bias = inverse_dynamics(q, qd, JointVector::Zero(), base);
  const Mat7 m = mass_matrix(q);
  Eigen::LLT<Mat7> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("forward_dynamics: mass matrix is not positive definite");
  }
  return llt.solve(tau - bias);
}

SimState ArmDynamics::step(const SimState& state, const JointVector& tau,
                           const MotionProfile& motion, double dt) const {
  constexpr int kSubsteps = 4;
  const double h = dt / kSubsteps;
  SimState s = state;
  for (int sub = 0; sub < kSubsteps; ++sub) {
    const BaseState base = motion.sample(s.t);
    const JointVector qdd = forward_dynamics(s.q, s.qd, tau, base);
    s.qd += h * qdd;
    s.q += h * s.qd;
    s.t += h;
    for (int i = 0; i < kNumJoints; ++i) {
      if (std::abs(s.qd[i]) > 10.0 * limits_.velocity_upper[i]) {
        throw SimDivergence(s.t, i);
      }
    }
  }
  s.t = state.t + dt;
  return s;
}

JointVector pd_gravity_control(const JointVector& q, const JointVector& qd, const JointVector& q_d,
                               const JointVector& qd_d, const PdGains& gains,
                               const std::function<JointVector(const JointVector&)>& gravity_model) {
  return (-gains.kp.array() * (q - q_d).array() - gains.kd.array() * (qd - qd_d).array()).matrix() +
         gravity_model(q);
}

}  // namespace seaarm
