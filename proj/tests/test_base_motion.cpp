#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "seaarm/base_motion.hpp"

using namespace seaarm;

namespace {

MotionProfile standard_wave() {
  return MotionProfile::analytic({deg_to_rad(6.0), 1.67, 0.0}, {deg_to_rad(3.0), 2.1, 0.0},
                                 {deg_to_rad(1.0), 3.3, 0.4}, {0.05, 2.5, 0.0});
}

}  // namespace

TEST_CASE("analytic profile angle rates and accelerations match finite differences") {
  const MotionProfile p = standard_wave();
  const double h = 1e-6;
  for (double t = 0.5; t < 8.0; t += 0.37) {
    const BaseState s = p.sample(t);
    const BaseState sp = p.sample(t + h);
    const BaseState sm = p.sample(t - h);
    const Vec3 rate_fd = (sp.rpy - sm.rpy) / (2.0 * h);
    const Vec3 accel_fd = (sp.rpy_rate - sm.rpy_rate) / (2.0 * h);
    CHECK((s.rpy_rate - rate_fd).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((s.rpy_accel - accel_fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("world angular velocity and acceleration match finite differences of the rotation") {
  const MotionProfile p = standard_wave();
  const double h = 1e-6;
  for (double t = 0.3; t < 6.0; t += 0.41) {
    const BaseState s = p.sample(t);
    const BaseState sp = p.sample(t + h);
    const BaseState sm = p.sample(t - h);

    const Mat3 r = quat_from_rpy(s.rpy).toRotationMatrix();
    const Mat3 rdot = (quat_from_rpy(sp.rpy).toRotationMatrix() -
                       quat_from_rpy(sm.rpy).toRotationMatrix()) /
                      (2.0 * h);
    const Mat3 wx = rdot * r.transpose();  // skew(omega)
    const Vec3 w_fd(wx(2, 1), wx(0, 2), wx(1, 0));
    CHECK((base_angular_velocity(s) - w_fd).cwiseAbs().maxCoeff() < 1e-6);

    const Vec3 a_fd = (base_angular_velocity(sp) - base_angular_velocity(sm)) / (2.0 * h);
    CHECK((base_angular_acceleration(s) - a_fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("mount position and linear acceleration are consistent") {
  const MotionProfile p = standard_wave();
  const double h = 1e-5;
  for (double t = 0.3; t < 6.0; t += 0.53) {
    const BaseState s = p.sample(t);
    const BaseState sp = p.sample(t + h);
    const BaseState sm = p.sample(t - h);
    const Vec3 accel_fd = (sp.position - 2.0 * s.position + sm.position) / (h * h);
    CHECK((s.linear_accel - accel_fd).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("level rest profile is exactly stationary") {
  const MotionProfile p = MotionProfile::analytic({}, {}, {});
  const BaseState s = p.sample(3.7);
  CHECK(s.rpy.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.position.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.linear_accel.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mount starts at the world origin when phases are zero") {
  const MotionProfile p = MotionProfile::analytic({0.1, 1.67, 0.0}, {0.05, 2.1, 0.0}, {});
  const BaseState s = p.sample(0.0);
  CHECK(s.position.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.rpy.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.rpy_rate.x() == doctest::Approx(0.1 * 2.0 * kPi / 1.67));
}

TEST_CASE("negative sample times are rejected") {
  CHECK_THROWS_AS(standard_wave().sample(-0.01), std::out_of_range);
}

TEST_CASE("trace spline reproduces a sampled sine within interpolation error") {
  const double period = 2.0;
  const double h = 0.02;
  std::vector<Vec3> rows;
  for (int i = 0; i <= 300; ++i) {
    const double t = i * h;
    rows.emplace_back(0.1 * std::sin(2.0 * kPi * t / period), 0.0, 0.0);
  }
  const MotionProfile p = MotionProfile::from_trace(h, rows);
  for (double t = 0.5; t < 5.5; t += 0.173) {
    const BaseState s = p.sample(t);
    const double truth = 0.1 * std::sin(2.0 * kPi * t / period);
    const double truth_rate = 0.1 * (2.0 * kPi / period) * std::cos(2.0 * kPi * t / period);
    CHECK(s.rpy.x() == doctest::Approx(truth).epsilon(1e-4));
    CHECK(s.rpy_rate.x() == doctest::Approx(truth_rate).epsilon(1e-2));
  }
  // Spline derivatives must be consistent with the spline values themselves.
  const double fd = 1e-6;
  for (double t = 0.4; t < 5.0; t += 0.311) {
    const Vec3 rate_fd = (p.sample(t + fd).rpy - p.sample(t - fd).rpy) / (2.0 * fd);
    CHECK((p.sample(t).rpy_rate - rate_fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("trace sampling past the recorded end throws") {
  std::vector<Vec3> rows(51, Vec3::Zero());
  const MotionProfile p = MotionProfile::from_trace(0.1, rows);
  CHECK_NOTHROW(p.sample(5.0));
  CHECK_THROWS_AS(p.sample(5.0001), std::out_of_range);
}

TEST_CASE("trace CSV loading checks the header and grid") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "seaarm_trace_test";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "good.csv");
    f << "t,roll,pitch,yaw\n";
    for (int i = 0; i < 30; ++i) {
      f << i * 0.05 << "," << 0.01 * i << ",0,0\n";
    }
  }
  const MotionProfile p = MotionProfile::load_trace_csv((dir / "good.csv").string());
  CHECK(p.sample(0.7).rpy.x() == doctest::Approx(0.14).epsilon(1e-6));

  {
    std::ofstream f(dir / "bad_header.csv");
    f << "time,r,p,y\n0,0,0,0\n0.1,0,0,0\n";
  }
  CHECK_THROWS_AS(MotionProfile::load_trace_csv((dir / "bad_header.csv").string()), ConfigError);

  {
    std::ofstream f(dir / "bad_grid.csv");
    f << "t,roll,pitch,yaw\n0,0,0,0\n0.1,0,0,0\n0.35,0,0,0\n";
  }
  CHECK_THROWS_AS(MotionProfile::load_trace_csv((dir / "bad_grid.csv").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("single-row traces are rejected") {
  CHECK_THROWS_AS(MotionProfile::from_trace(0.1, {Vec3::Zero()}), ConfigError);
}
