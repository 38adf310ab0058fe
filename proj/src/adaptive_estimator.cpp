#include "seaarm/adaptive_estimator.hpp"

namespace seaarm {

EstimatorState estimator_update(const EstimatorState& state, const JointVector& e,
                                const JointVector& edot, const EstimatorGains& gains, double dt) {
  gains.validate();
  if (!(dt > 0.0)) {
    throw ConfigError("estimator_update: dt must be positive");
  }
  EstimatorState next = state;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 inc = estimator_regressor(e[i], edot[i]) * e[i] * dt;
    for (int c = 0; c < 3; ++c) {
      const double lim = gains.accumulator_limit[c];
      double v = state.accumulator(c, i) + inc[c];
      if (v > lim) {
        v = lim;
        ++next.clamp_events;
      } else if (v < -lim) {
        v = -lim;
        ++next.clamp_events;
      }
      next.accumulator(c, i) = v;
    }
  }
  return next;
}

JointVector estimator_correction(const EstimatorState& state, const JointVector& e,
                                 const JointVector& edot, const EstimatorGains& gains) {
  gains.validate();
  const Vec3 h_inv = gains.h_diag.cwiseInverse();
  JointVector out;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 delta = estimator_regressor(e[i], edot[i]);
    out[i] = -state.accumulator.col(i).dot(h_inv.cwiseProduct(delta));
  }
  return out;
}

}  // namespace seaarm
