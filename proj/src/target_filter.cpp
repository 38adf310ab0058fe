#include "seaarm/target_filter.hpp"

namespace seaarm {

void FilterModel::validate() const {
  if (!(dt > 0.0) || !(sigma_m > 0.0) || !(sigma_s > 0.0) || !(gate > 0.0)) {
    throw ConfigError("FilterModel: dt, noise intensities and gate must be positive");
  }
}

Mat6 FilterModel::transition() const {
  Mat6 d = Mat6::Identity();
  d.topRightCorner<3, 3>() = dt * Mat3::Identity();
  return d;
}

Eigen::Matrix<double, 3, 6> FilterModel::observation() const {
  Eigen::Matrix<double, 3, 6> f = Eigen::Matrix<double, 3, 6>::Zero();
  f.topLeftCorner<3, 3>() = Mat3::Identity();
  return f;
}

Mat6 FilterModel::process_noise() const {
  Mat6 qs;
  const double s2 = sigma_s * sigma_s;
  qs.topLeftCorner<3, 3>() = s2 * dt * dt * dt * Mat3::Identity();
  qs.topRightCorner<3, 3>() = s2 * dt * dt * Mat3::Identity();
  qs.bottomLeftCorner<3, 3>() = s2 * dt * dt * Mat3::Identity();
  qs.bottomRightCorner<3, 3>() = s2 * dt * Mat3::Identity();
  return qs;
}

Mat3 FilterModel::measurement_noise() const { return sigma_m * sigma_m * dt * Mat3::Identity(); }

TargetState kf_predict(const TargetState& state, const FilterModel& model) {
  model.validate();
  const Mat6 d = model.transition();
  TargetState out;
  out.x = d * state.x;
  out.covariance = d * state.covariance * d.transpose() + model.process_noise();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KfUpdate kf_update(const TargetState& state, const Vec3& measurement, const FilterModel& model) {
  model.validate();
  const auto f = model.observation();
  const Mat3 r = model.measurement_noise();
  const Vec3 innovation = measurement - f * state.x;
  const Mat3 s = f * state.covariance * f.transpose() + r;
  const Eigen::LLT<Mat3> llt(s);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("kf_update: innovation covariance is not positive definite");
  }

  KfUpdate out;
  out.nis = innovation.dot(llt.solve(innovation));
  if (out.nis > model.gate) {
    out.rejected = true;
    out.state = state;
    return out;
  }

  const Eigen::Matrix<double, 6, 3> gain = state.covariance * f.transpose() * llt.solve(Mat3::Identity());
  out.state.x = state.x + gain * innovation;
  const Mat6 ikf = Mat6::Identity() - gain * f;
  out.state.covariance = ikf * state.covariance * ikf.transpose() + gain * r * gain.transpose();
  out.state.covariance = 0.5 * (out.state.covariance + out.state.covariance.transpose());
  return out;
}

}  // namespace seaarm
