#pragma once

#include "seaarm/types.hpp"

namespace seaarm {

/// Position-velocity state of the tracked vehicle with its covariance.
struct TargetState {
  Vec6 x{Vec6::Zero()};  ///< [position; velocity]
  Mat6 covariance{Mat6::Identity()};

  Vec3 position() const { return x.head<3>(); }
  Vec3 velocity() const { return x.tail<3>(); }
};

/// Constant-velocity process with position-only measurements. The matrices
/// are derived from the period and the two noise intensities, so the block
/// structure holds by construction.
struct FilterModel {
  double dt{0.01};
  /// Measurement noise intensity. R = sigma_m^2 dt I, so the per-sample
  /// standard deviation is sigma_m sqrt(dt); the default matches a 0.02 m
  /// sensor at a 0.01 s period.
  double sigma_m{0.2};
  double sigma_s{1.0};  ///< process noise intensity
  double gate{16.266};  ///< chi-square gate on the squared normalized innovation

  Mat6 transition() const;
  Eigen::Matrix<double, 3, 6> observation() const;
  Mat6 process_noise() const;
  Mat3 measurement_noise() const;

  void validate() const;
};

TargetState kf_predict(const TargetState& state, const FilterModel& model);

struct KfUpdate {
  TargetState state;
  bool rejected{false};  ///< measurement failed the innovation gate
  double nis{0.0};       ///< squared normalized innovation
};

/// Joseph-form measurement update with innovation gating; a gated-out
/// measurement leaves the prediction untouched.
KfUpdate kf_update(const TargetState& state, const Vec3& measurement, const FilterModel& model);

}  // namespace seaarm
