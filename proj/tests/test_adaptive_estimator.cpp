#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seaarm/adaptive_estimator.hpp"

#include <random>

using namespace seaarm;

namespace {

JointVector random_vector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("one update applies the rectangle-rule increment exactly") {
  EstimatorGains gains;
  EstimatorState state;
  JointVector e = JointVector::Zero();
  JointVector edot = JointVector::Zero();
  e[2] = 0.3;
  edot[2] = -0.1;
  const double dt = 0.01;
  const EstimatorState next = estimator_update(state, e, edot, gains, dt);
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 expected = Vec3(1.0, e[i], edot[i]) * e[i] * dt;
    CHECK((next.accumulator.col(i) - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK(next.clamp_events == 0);
}

TEST_CASE("accumulation over many steps matches a scalar reference integral") {
  EstimatorGains gains;
  EstimatorState state;
  const double dt = 0.005;
  Eigen::Matrix<double, 3, kNumJoints> reference =
      Eigen::Matrix<double, 3, kNumJoints>::Zero();
  std::mt19937_64 rng(7);
  for (int step = 0; step < 400; ++step) {
    const JointVector e = random_vector(rng, 0.5);
    const JointVector edot = random_vector(rng, 2.0);
    state = estimator_update(state, e, edot, gains, dt);
    for (int i = 0; i < kNumJoints; ++i) {
      reference.col(i) += Vec3(1.0, e[i], edot[i]) * e[i] * dt;
    }
  }
  CHECK((state.accumulator - reference).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(state.clamp_events == 0);
}

TEST_CASE("the correction is the weighted inner product of accumulator and regressor") {
  EstimatorGains gains;
  gains.h_diag = Vec3(2.0, 0.5, 4.0);
  EstimatorState state;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < kNumJoints; ++i) {
    for (int c = 0; c < 3; ++c) state.accumulator(c, i) = dist(rng);
  }
  const JointVector e = random_vector(rng, 0.4);
  const JointVector edot = random_vector(rng, 1.5);
  const JointVector corr = estimator_correction(state, e, edot, gains);
  for (int i = 0; i < kNumJoints; ++i) {
    const double expected = -(state.accumulator(0, i) / gains.h_diag[0] * 1.0 +
                              state.accumulator(1, i) / gains.h_diag[1] * e[i] +
                              state.accumulator(2, i) / gains.h_diag[2] * edot[i]);
    CHECK(corr[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("a persistent error drives the correction against that error") {
  // With e held positive the bias accumulator grows positive, so the
  // commanded correction must become negative: the desired position is pushed
  // below nominal to cancel a positive tracking offset.
  EstimatorGains gains;
  EstimatorState state;
  const JointVector e = JointVector::Constant(0.1);
  const JointVector edot = JointVector::Zero();
  for (int step = 0; step < 200; ++step) {
    state = estimator_update(state, e, edot, gains, 0.01);
  }
  const JointVector corr = estimator_correction(state, e, edot, gains);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK(state.accumulator(0, i) > 0.0);
    CHECK(corr[i] < 0.0);
  }
}

TEST_CASE("components clamp at the limit and count events") {
  EstimatorGains gains;
  gains.accumulator_limit = Vec3::Constant(0.05);
  EstimatorState state;
  const JointVector e = JointVector::Constant(1.0);
  const JointVector edot = JointVector::Zero();
  // Each step adds 0.1 to the constant and error channels of every joint, so
  // both saturate immediately and stay pinned.
  state = estimator_update(state, e, edot, gains, 0.1);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK(state.accumulator(0, i) == doctest::Approx(0.05));
    CHECK(state.accumulator(1, i) == doctest::Approx(0.05));
    CHECK(state.accumulator(2, i) == doctest::Approx(0.0));
  }
  CHECK(state.clamp_events == 2 * kNumJoints);
  const long after_first = state.clamp_events;
  state = estimator_update(state, e, edot, gains, 0.1);
  CHECK(state.clamp_events == 2 * after_first);
  CHECK(state.accumulator.row(0).maxCoeff() == doctest::Approx(0.05));
}

TEST_CASE("a saturated component integrates freely back toward zero") {
  EstimatorGains gains;
  gains.accumulator_limit = Vec3::Constant(0.05);
  EstimatorState state;
  state.accumulator.row(0).setConstant(0.05);
  // A negative error shrinks the constant channel immediately; saturation
  // does not latch.
  const JointVector e = JointVector::Constant(-0.2);
  const JointVector edot = JointVector::Zero();
  const EstimatorState next = estimator_update(state, e, edot, gains, 0.1);
  for (int i = 0; i < kNumJoints; ++i) {
    CHECK(next.accumulator(0, i) == doctest::Approx(0.05 - 0.02));
  }
  CHECK(next.clamp_events == 0);
}

TEST_CASE("the error channel accumulates e squared and never decreases") {
  // The increment on that channel is e_i^2 dt, so below saturation the row is
  // monotone in every joint regardless of the error sign.
  EstimatorGains gains;
  EstimatorState state;
  std::mt19937_64 rng(23);
  JointVector previous = JointVector::Zero();
  for (int step = 0; step < 100; ++step) {
    const JointVector e = random_vector(rng, 1.0);
    state = estimator_update(state, e, JointVector::Zero(), gains, 0.01);
    for (int i = 0; i < kNumJoints; ++i) {
      CHECK(state.accumulator(1, i) >= previous[i] - 1e-15);
      previous[i] = state.accumulator(1, i);
    }
  }
  CHECK(state.accumulator.row(1).minCoeff() > 0.0);
}

TEST_CASE("gain and step validation throws on bad values") {
  EstimatorGains gains;
  EstimatorState state;
  const JointVector z = JointVector::Zero();
  CHECK_THROWS_AS(estimator_update(state, z, z, gains, 0.0), ConfigError);
  CHECK_THROWS_AS(estimator_update(state, z, z, gains, -0.01), ConfigError);
  gains.h_diag[1] = 0.0;
  CHECK_THROWS_AS(estimator_update(state, z, z, gains, 0.01), ConfigError);
  CHECK_THROWS_AS(estimator_correction(state, z, z, gains), ConfigError);
  gains.h_diag[1] = 0.01;
  gains.accumulator_limit[2] = 0.0;
  CHECK_THROWS_AS(estimator_update(state, z, z, gains, 0.01), ConfigError);
}

TEST_CASE("default gains match the published weighting") {
  const EstimatorGains gains;
  CHECK(gains.h_diag[0] == 1.0);
  CHECK(gains.h_diag[1] == 0.01);
  CHECK(gains.h_diag[2] == 10.0);
  CHECK(gains.accumulator_limit == Vec3::Constant(50.0));
}
