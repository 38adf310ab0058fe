#pragma once

#include "seaarm/types.hpp"

namespace seaarm {

/// Weighting of the [1, e, edot] regressor channels, shared by all joints,
/// plus a per-channel saturation bound on the accumulator components. The
/// channels integrate quantities of very different scale, so each needs its
/// own bound; in particular the edot channel acts as sampled damping and a
/// bound fit for the constant channel would let it destabilize low-inertia
/// joints.
struct EstimatorGains {
  Vec3 h_diag{1.0, 0.01, 10.0};
  Vec3 accumulator_limit{50.0, 50.0, 50.0};

  void validate() const {
    if (!(h_diag.minCoeff() > 0.0)) {
      throw ConfigError("EstimatorGains: H diagonal must be positive");
    }
    if (!(accumulator_limit.minCoeff() > 0.0)) {
      throw ConfigError("EstimatorGains: accumulator limits must be positive");
    }
  }
};

/// Per-joint accumulators s_i = integral of [1, e_i, edot_i] e_i dt, one
/// column per joint, plus a count of saturation events for diagnostics.
struct EstimatorState {
  Eigen::Matrix<double, 3, kNumJoints> accumulator{Eigen::Matrix<double, 3, kNumJoints>::Zero()};
  long clamp_events{0};
};

inline Vec3 estimator_regressor(double e, double edot) { return Vec3(1.0, e, edot); }

/// Rectangle-rule accumulator update with saturation. A component already at
/// the bound ignores further growth in that direction but integrates freely
/// back toward zero.
EstimatorState estimator_update(const EstimatorState& state, const JointVector& e,
                                const JointVector& edot, const EstimatorGains& gains, double dt);

/// Desired-position correction per joint: qtilde_i = -s_i' H^{-1} [1, e_i, edot_i].
JointVector estimator_correction(const EstimatorState& state, const JointVector& e,
                                 const JointVector& edot, const EstimatorGains& gains);

}  // namespace seaarm
