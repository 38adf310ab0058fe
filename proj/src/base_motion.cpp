#include "seaarm/base_motion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace seaarm {

namespace {

void eval_sine(const SineWave& w, double t, double& y, double& yd, double& ydd) {
  if (!(w.period_s > 0.0)) {
    throw ConfigError("MotionProfile: sine period must be positive");
  }
  const double omega = 2.0 * kPi / w.period_s;
  const double arg = omega * t + w.phase_rad;
  y = w.amplitude * std::sin(arg);
  yd = w.amplitude * omega * std::cos(arg);
  ydd = -w.amplitude * omega * omega * std::sin(arg);
}

/// Natural cubic spline curvatures for uniformly spaced samples (one axis).
std::vector<double> spline_curvature(const std::vector<Vec3>& rows, int axis, double h) {
  const size_t n = rows.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) {
    return m;
  }
  std::vector<double> diag(n, 4.0), rhs(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i) {
    rhs[i] = 6.0 * (rows[i - 1][axis] - 2.0 * rows[i][axis] + rows[i + 1][axis]) / (h * h);
  }
  for (size_t i = 2; i + 1 < n; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w;
    rhs[i] -= w * rhs[i - 1];
  }
  for (size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - m[i + 1]) / diag[i];
  }
  return m;
}

}  // namespace

MotionProfile MotionProfile::analytic(const SineWave& roll, const SineWave& pitch,
                                      const SineWave& yaw, const SineWave& heave,
                                      const Vec3& mount_offset) {
  MotionProfile p;
  p.analytic_ = true;
  p.roll_ = roll;
  p.pitch_ = pitch;
  p.yaw_ = yaw;
  p.heave_ = heave;
  p.mount_offset_ = mount_offset;
  double y, yd, ydd;
  eval_sine(roll, 0.0, y, yd, ydd);
  eval_sine(pitch, 0.0, y, yd, ydd);
  eval_sine(yaw, 0.0, y, yd, ydd);
  eval_sine(heave, 0.0, y, yd, ydd);
  return p;
}

MotionProfile MotionProfile::from_trace(double sample_period_s, std::vector<Vec3> rpy_rows,
                                        const Vec3& mount_offset) {
  if (!(sample_period_s > 0.0)) {
    throw ConfigError("MotionProfile: trace sample period must be positive");
  }
  if (rpy_rows.size() < 2) {
    throw ConfigError("MotionProfile: trace needs at least two rows");
  }
  MotionProfile p;
  p.analytic_ = false;
  p.trace_dt_ = sample_period_s;
  p.trace_rpy_ = std::move(rpy_rows);
  p.mount_offset_ = mount_offset;
  p.trace_curvature_.resize(p.trace_rpy_.size());
  for (int axis = 0; axis < 3; ++axis) {
    const auto m = spline_curvature(p.trace_rpy_, axis, sample_period_s);
    for (size_t i = 0; i < m.size(); ++i) {
      p.trace_curvature_[i][axis] = m[i];
    }
  }
  return p;
}

MotionProfile MotionProfile::load_trace_csv(const std::string& path, const Vec3& mount_offset) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("MotionProfile: cannot open trace file " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,roll,pitch,yaw", 0) != 0) {
    throw ConfigError("MotionProfile: trace file " + path + " must start with t,roll,pitch,yaw");
  }
  std::vector<double> times;
  std::vector<Vec3> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    double v[4];
    char comma;
    if (!(ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3])) {
      throw ConfigError("MotionProfile: malformed trace row '" + line + "'");
    }
    times.push_back(v[0]);
    rows.emplace_back(v[1], v[2], v[3]);
  }
  if (rows.size() < 2) {
    throw ConfigError("MotionProfile: trace file " + path + " needs at least two rows");
  }
  const double h = times[1] - times[0];
  for (size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9) {
      throw ConfigError("MotionProfile: trace time grid is not uniform");
    }
  }
  return from_trace(h, std::move(rows), mount_offset);
}

BaseState MotionProfile::sample(double t) const {
  if (t < 0.0) {
    throw std::out_of_range("MotionProfile: sample time is negative");
  }
  BaseState s;
  s.t = t;
  double heave = 0.0, heave_dd = 0.0;
  if (analytic_) {
    double yd, ydd;
    eval_sine(roll_, t, s.rpy.x(), s.rpy_rate.x(), s.rpy_accel.x());
    eval_sine(pitch_, t, s.rpy.y(), s.rpy_rate.y(), s.rpy_accel.y());
    eval_sine(yaw_, t, s.rpy.z(), s.rpy_rate.z(), s.rpy_accel.z());
    eval_sine(heave_, t, heave, yd, ydd);
    heave_dd = ydd;
  } else {
    const double end = trace_dt_ * static_cast<double>(trace_rpy_.size() - 1);
    if (t > end) {
      throw std::out_of_range("MotionProfile: sample time " + std::to_string(t) +
                              " is past the end of the trace (" + std::to_string(end) + ")");
    }
    size_t i = static_cast<size_t>(t / trace_dt_);
    if (i + 1 >= trace_rpy_.size()) {
      i = trace_rpy_.size() - 2;
    }
    const double h = trace_dt_;
    const double a = (static_cast<double>(i + 1) * h - t) / h;
    const double b = (t - static_cast<double>(i) * h) / h;
    for (int axis = 0; axis < 3; ++axis) {
      const double y0 = trace_rpy_[i][axis], y1 = trace_rpy_[i + 1][axis];
      const double m0 = trace_curvature_[i][axis], m1 = trace_curvature_[i + 1][axis];
      s.rpy[axis] = a * y0 + b * y1 +
                    ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
      s.rpy_rate[axis] = (y1 - y0) / h +
                         ((3.0 * b * b - 1.0) * m1 - (3.0 * a * a - 1.0) * m0) * h / 6.0;
      s.rpy_accel[axis] = a * m0 + b * m1;
    }
  }

  const Mat3 r = quat_from_rpy(s.rpy).toRotationMatrix();
  const Vec3 omega = base_angular_velocity(s);
  const Vec3 alpha = base_angular_acceleration(s);
  const Vec3 arm = r * mount_offset_;
  s.position = arm - mount_offset_ + Vec3(0, 0, heave);
  s.linear_accel = alpha.cross(arm) + omega.cross(omega.cross(arm)) + Vec3(0, 0, heave_dd);
  return s;
}

}  // namespace seaarm
