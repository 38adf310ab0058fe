#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seaarm/target_filter.hpp"

#include <cmath>
#include <random>

using namespace seaarm;

TEST_CASE("the model matrices have the constant-velocity block structure") {
  FilterModel m;
  m.dt = 0.02;
  m.sigma_m = 0.05;
  m.sigma_s = 0.7;

  const Mat6 d = m.transition();
  CHECK((d.topLeftCorner<3, 3>() - Mat3::Identity()).norm() == 0.0);
  CHECK((d.topRightCorner<3, 3>() - 0.02 * Mat3::Identity()).norm() == 0.0);
  CHECK(d.bottomLeftCorner<3, 3>().norm() == 0.0);
  CHECK((d.bottomRightCorner<3, 3>() - Mat3::Identity()).norm() == 0.0);

  const auto f = m.observation();
  CHECK((f.topLeftCorner<3, 3>() - Mat3::Identity()).norm() == 0.0);
  CHECK(f.topRightCorner<3, 3>().norm() == 0.0);

  const double s2 = 0.7 * 0.7;
  const Mat6 qs = m.process_noise();
  CHECK((qs.topLeftCorner<3, 3>() - s2 * std::pow(0.02, 3) * Mat3::Identity()).norm() < 1e-18);
  CHECK((qs.topRightCorner<3, 3>() - s2 * 0.02 * 0.02 * Mat3::Identity()).norm() < 1e-18);
  CHECK((qs - qs.transpose()).norm() == 0.0);

  const Mat3 r = m.measurement_noise();
  CHECK((r - 0.05 * 0.05 * 0.02 * Mat3::Identity()).norm() < 1e-18);
}

TEST_CASE("prediction propagates position by velocity and follows the covariance recursion") {
  FilterModel m;
  TargetState s;
  s.x << 1.0, -2.0, 0.5, 0.3, 0.0, -0.1;
  s.covariance = Mat6::Identity() * 0.2;
  s.covariance(0, 3) = s.covariance(3, 0) = 0.02;
  const TargetState p = kf_predict(s, m);
  CHECK((p.position() - (s.position() + m.dt * s.velocity())).norm() < 1e-15);
  CHECK((p.velocity() - s.velocity()).norm() == 0.0);
  const Mat6 d = m.transition();
  const Mat6 expected = d * s.covariance * d.transpose() + m.process_noise();
  CHECK((p.covariance - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p.covariance - p.covariance.transpose()).norm() == 0.0);
}

TEST_CASE("the update matches a direct least-squares fusion on a scalar-friendly case") {
  // With covariance and noise all isotropic the Kalman gain reduces to the
  // scalar blend p/(p + r) applied to the position block.
  FilterModel m;
  m.dt = 0.1;
  m.sigma_m = 0.3;
  TargetState s;
  s.x << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0;
  const double p0 = 0.5;
  s.covariance = Mat6::Identity() * p0;
  const Vec3 z(1.2, 1.9, 3.3);
  const KfUpdate u = kf_update(s, z, m);
  REQUIRE_FALSE(u.rejected);
  const double r = m.sigma_m * m.sigma_m * m.dt;
  const double k = p0 / (p0 + r);
  const Vec3 expected = s.position() + k * (z - s.position());
  CHECK((u.state.position() - expected).norm() < 1e-12);
  // Velocity is uncorrelated with position here, so it stays put.
  CHECK(u.state.velocity().norm() < 1e-15);
  // Posterior position variance follows the scalar formula.
  CHECK(u.state.covariance(0, 0) == doctest::Approx(p0 * r / (p0 + r)).epsilon(1e-12));
}

TEST_CASE("the posterior covariance stays symmetric positive definite through long runs") {
  FilterModel m;
  const double sample_sd = m.sigma_m * std::sqrt(m.dt);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, sample_sd);
  TargetState s;
  s.covariance = Mat6::Identity();
  Vec3 truth(0.0, 0.0, 1.0);
  const Vec3 vel(0.1, -0.05, 0.0);
  double err_sq = 0.0;
  int tail = 0;
  for (int step = 0; step < 800; ++step) {
    truth += vel * m.dt;
    s = kf_predict(s, m);
    const Vec3 z = truth + Vec3(noise(rng), noise(rng), noise(rng));
    const KfUpdate u = kf_update(s, z, m);
    s = u.state;
    CHECK((s.covariance - s.covariance.transpose()).norm() < 1e-14);
    const Eigen::LLT<Mat6> llt(s.covariance);
    CHECK(llt.info() == Eigen::Success);
    if (step >= 500) {
      err_sq += (s.position() - truth).squaredNorm();
      ++tail;
    }
  }
  // After convergence the estimate tracks within a few measurement sigmas.
  CHECK(std::sqrt(err_sq / tail) < 3.0 * sample_sd);
}

TEST_CASE("an implausible measurement is gated out and leaves the prediction untouched") {
  FilterModel m;
  TargetState s;
  s.x << 0.0, 0.0, 1.0, 0.0, 0.0, 0.0;
  s.covariance = Mat6::Identity() * 1e-4;
  const TargetState pred = kf_predict(s, m);
  const KfUpdate u = kf_update(pred, Vec3(5.0, 5.0, 5.0), m);
  CHECK(u.rejected);
  CHECK(u.nis > m.gate);
  CHECK((u.state.x - pred.x).norm() == 0.0);
  CHECK((u.state.covariance - pred.covariance).norm() == 0.0);

  // The same measurement passes once the filter is wildly uncertain.
  TargetState vague = pred;
  vague.covariance = Mat6::Identity() * 100.0;
  const KfUpdate accepted = kf_update(vague, Vec3(5.0, 5.0, 5.0), m);
  CHECK_FALSE(accepted.rejected);
  CHECK(accepted.nis <= m.gate);
}

TEST_CASE("the gate boundary follows the configured threshold") {
  FilterModel m;
  m.gate = 2.9;
  TargetState s;
  s.covariance = Mat6::Identity();
  // Innovation covariance is (1 + r) I; craft measurements just inside and
  // just outside nis = gate.
  const double sd = std::sqrt(1.0 + m.sigma_m * m.sigma_m * m.dt);
  const double inside = std::sqrt(m.gate) * sd * 0.999;
  const double outside = std::sqrt(m.gate) * sd * 1.001;
  CHECK_FALSE(kf_update(s, Vec3(inside, 0, 0), m).rejected);
  CHECK(kf_update(s, Vec3(outside, 0, 0), m).rejected);
}

TEST_CASE("filtering halves the position error of noisy measurements of a drifting target") {
  FilterModel m;
  m.sigma_s = 0.05;
  const double sample_sd = m.sigma_m * std::sqrt(m.dt);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, sample_sd);
  TargetState s;
  s.x << 0.4, 0.0, 1.4, 0.0, 0.0, 0.0;
  s.covariance.topLeftCorner<3, 3>() = Mat3::Identity() * 0.04;
  s.covariance.bottomRightCorner<3, 3>() = Mat3::Identity() * 0.25;
  double raw_sq = 0.0, filt_sq = 0.0;
  int count = 0;
  for (int step = 0; step < 3000; ++step) {
    const double t = m.dt * (step + 1);
    const Vec3 truth(0.4 + 0.05 * std::sin(0.4 * t), 0.05 * std::sin(0.3 * t), 1.4);
    s = kf_predict(s, m);
    const Vec3 z = truth + Vec3(noise(rng), noise(rng), noise(rng));
    s = kf_update(s, z, m).state;
    if (t > 1.0) {
      raw_sq += (z - truth).squaredNorm();
      filt_sq += (s.position() - truth).squaredNorm();
      ++count;
    }
  }
  const double raw_rmse = std::sqrt(raw_sq / count);
  const double filt_rmse = std::sqrt(filt_sq / count);
  CHECK(filt_rmse < 0.5 * raw_rmse);
}

TEST_CASE("model validation rejects non-positive parameters") {
  FilterModel m;
  m.dt = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.dt = 0.01;
  m.sigma_m = -1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.sigma_m = 0.02;
  m.sigma_s = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.sigma_s = 1.0;
  m.gate = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.gate = 16.266;
  CHECK_NOTHROW(m.validate());
}
