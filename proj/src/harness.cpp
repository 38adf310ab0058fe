#include "seaarm/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace seaarm {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Pose translated(const Pose& p, const Vec3& offset) {
  return Pose(p.position + offset, p.orientation);
}

double deviation_angle_deg(const Pose& current, const Pose& desired) {
  Eigen::Quaterniond dq = desired.orientation * current.orientation.inverse();
  if (dq.w() < 0.0) {
    dq.coeffs() = -dq.coeffs();
  }
  return rad_to_deg(2.0 * std::atan2(dq.vec().norm(), dq.w()));
}

struct AnalyticReference {
  ReferenceSpec spec;
  Pose start;
  Vec3 center{Vec3::Zero()};

  // The circle lies in the vertical plane through the start point so every
  // target stays well inside the reachable shell; a horizontal circle of the
  // same radius would sweep through the base column.
  void init(const Pose& start_pose) {
    start = start_pose;
    center = start.position - Vec3(0.0, 0.0, spec.radius_m);
  }

  // Path angle with a first-order soft start so the sweep begins from rest
  // instead of stepping the tip velocity into the low-inertia wrist.
  static constexpr double kSoftStartTau = 0.3;

  double angle_at(double t) const {
    return spec.angular_rate_rad_s * (t - kSoftStartTau * (1.0 - std::exp(-t / kSoftStartTau)));
  }

  double rate_at(double t) const {
    return spec.angular_rate_rad_s * (1.0 - std::exp(-t / kSoftStartTau));
  }

  Pose pose_at(double t) const {
    switch (spec.kind) {
      case ReferenceSpec::Kind::kHold:
      case ReferenceSpec::Kind::kMission:
        return start;
      case ReferenceSpec::Kind::kCircle: {
        const double th = angle_at(t);
        return Pose(center + spec.radius_m * Vec3(0.0, std::sin(th), std::cos(th)),
                    start.orientation);
      }
      case ReferenceSpec::Kind::kArc: {
        const double th = std::min(angle_at(t), spec.span_rad);
        return Pose(center + spec.radius_m * Vec3(0.0, std::sin(th), std::cos(th)),
                    start.orientation);
      }
    }
    return start;
  }

  TaskTwist twist_at(double t) const {
    TaskTwist tw;
    if (spec.kind == ReferenceSpec::Kind::kCircle ||
        (spec.kind == ReferenceSpec::Kind::kArc && angle_at(t) < spec.span_rad)) {
      const double th = angle_at(t);
      tw.linear = spec.radius_m * rate_at(t) * Vec3(0.0, std::cos(th), -std::sin(th));
    }
    return tw;
  }
};

ReferenceWindow window_from_directive(const MissionDirective& d, int horizon, double dt) {
  ReferenceWindow win;
  win.poses.reserve(static_cast<size_t>(horizon) + 1);
  for (int k = 0; k <= horizon; ++k) {
    win.poses.push_back(translated(d.target, d.target_velocity * (dt * k)));
  }
  return win;
}

std::string mission_label(const MissionState& s) {
  if (s.phase == MissionPhase::kTrackCatch) {
    return to_string(s.sub);
  }
  return to_string(s.phase);
}

// Re-expresses a world target as the pose the arm must reach relative to the
// base as it stands now, given where the base will have moved by then. The
// tracker's prediction model only covers motion the joints produce, so the
// known base motion has to be folded into the reference instead.
Pose base_relative_target(const MotionProfile& motion, double t_now, double t_future,
                          const Pose& world_target) {
  const Pose now = base_pose(motion.sample(t_now));
  const Pose future = base_pose(motion.sample(t_future));
  const Eigen::Quaterniond inv = future.orientation.conjugate();
  const Pose future_inverse(inv * -future.position, inv);
  return now * (future_inverse * world_target);
}

}  // namespace

RunMetrics run_scenario(const Scenario& sc, const std::string& out_dir) {
  sc.validate();
  const KinematicChain chain = KinematicChain::default_arm();
  const JointLimits limits = JointLimits::default_arm();
  const ArmDynamics dyn(chain, ArmDynamics::default_links(), limits, Vec3(0, 0, -9.81),
                        ArmDynamics::default_armature(), ArmDynamics::default_friction());
  const auto gravity = [&dyn](const JointVector& q) { return dyn.gravity_torque(q); };

  const double dt = sc.dt_s;
  const long n_ticks = std::lround(sc.duration_s / dt);
  const bool mission_mode = sc.reference.kind == ReferenceSpec::Kind::kMission;
  const bool use_estimator = sc.controller == ControllerKind::kMpcEstimator;
  const bool use_mpc = sc.controller != ControllerKind::kTraditional;

  const BaseState base0 = sc.base.sample(0.0);
  const Pose start = forward_kinematics(chain, sc.initial_q, base_pose(base0));

  AnalyticReference ref{sc.reference, {}, {}};
  ref.init(start);

  MissionConfig mc = sc.mission;
  mc.home = start;
  mc.calibrate_pose = translated(start, sc.layout.calibrate_offset_m);
  mc.place_pose = translated(start, sc.layout.place_offset_m);
  MissionController mctl(mc);
  MissionState mstate = mctl.initial_state(start);

  TargetState tstate;
  tstate.x.head<3>() = sc.vehicle.hover_m;
  tstate.covariance.topLeftCorner<3, 3>() = 0.04 * Mat3::Identity();
  tstate.covariance.bottomRightCorner<3, 3>() = 0.25 * Mat3::Identity();

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::pair<double, Vec3>> replay;
  if (!sc.vehicle.measurements_csv.empty()) {
    replay = read_measurements_csv(sc.vehicle.measurements_csv);
    if (static_cast<long>(replay.size()) < n_ticks) {
      throw ConfigError("run: measurement replay has fewer rows than the run has ticks");
    }
  }

  MpcTracker mpc(sc.tracker);
  EstimatorState est;
  SimState sim;
  sim.q = sc.initial_q;
  // Nominal joint command, integrated from the tracker's velocity output. The
  // servo lag q - qbar is the adaptation signal, so qbar must not re-anchor to
  // the measured state each tick.
  JointVector qbar = sc.initial_q;

  std::ofstream run_csv, phases_csv, meas_csv;
  const bool writing = !out_dir.empty();
  if (writing) {
    std::filesystem::create_directories(out_dir);
    const auto p = std::filesystem::path(out_dir);
    run_csv.open(p / "run.csv");
    run_csv << "t,ex,ey,ez,eroll,epitch,eyaw";
    for (int i = 1; i <= kNumJoints; ++i) {
      run_csv << ",q" << i;
    }
    for (int i = 1; i <= kNumJoints; ++i) {
      run_csv << ",qd" << i;
    }
    for (int i = 1; i <= 6; ++i) {
      run_csv << ",u" << i;
    }
    run_csv << ",qp_iters,phase\n";
    if (mission_mode) {
      phases_csv.open(p / "phases.csv");
      phases_csv << "t,phase,attempt\n";
      meas_csv.open(p / "measurements.csv");
      meas_csv << "t,x,y,z\n";
    }
  }

  RunMetrics m;
  m.scenario_name = sc.name;
  m.controller = to_string(sc.controller);
  double pos_sum = 0.0, ori_sum = 0.0;
  long steady_ticks = 0;
  std::string last_label;
  double restore_enter = -1.0;

  const auto wall_start = std::chrono::steady_clock::now();
  for (long k = 0; k < n_ticks; ++k) {
    const double t = k * dt;
    const BaseState base = sc.base.sample(t);
    const Pose bp = base_pose(base);
    const Pose pose = forward_kinematics(chain, sim.q, bp);
    const Jacobian jac = geometric_jacobian(chain, sim.q, bp);

    Pose desired;
    TaskTwist feedforward;
    ReferenceWindow window;
    std::string label = "track";

    if (mission_mode) {
      Vec3 z;
      if (!replay.empty()) {
        z = replay[static_cast<size_t>(k)].second;
      } else {
        const Vec3 truth = sc.vehicle.position(t);
        z = truth + sc.vehicle.measurement_sigma_m * Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
      if (meas_csv.is_open()) {
        meas_csv << fmt(t) << ',' << fmt(z.x()) << ',' << fmt(z.y()) << ',' << fmt(z.z()) << '\n';
      }
      tstate = kf_predict(tstate, sc.filter);
      tstate = kf_update(tstate, z, sc.filter).state;

      const bool was_restoring =
          mstate.phase == MissionPhase::kTrackCatch && mstate.sub == TrackSubState::kRestoring;
      auto [mnext, directive] = mctl.step(mstate, tstate, pose, sc.events, t);
      mstate = mnext;
      const bool now_restoring =
          mstate.phase == MissionPhase::kTrackCatch && mstate.sub == TrackSubState::kRestoring;
      if (!was_restoring && now_restoring) {
        restore_enter = t;
      } else if (was_restoring && !now_restoring && restore_enter >= 0.0) {
        m.restore_intervals.push_back({restore_enter, t});
        restore_enter = -1.0;
      }

      desired = directive.target;
      feedforward.linear = directive.target_velocity;
      window = window_from_directive(directive, sc.tracker.horizon, dt);
      label = mission_label(mstate);
      if (phases_csv.is_open() && label != last_label) {
        phases_csv << fmt(t) << ',' << label << ',' << mstate.attempt << '\n';
      }
      last_label = label;
    } else {
      desired = ref.pose_at(t);
      feedforward = ref.twist_at(t);
      window.poses.reserve(static_cast<size_t>(sc.tracker.horizon) + 1);
      for (int j = 0; j <= sc.tracker.horizon; ++j) {
        window.poses.push_back(ref.pose_at(t + j * dt));
      }
    }
    for (size_t j = 1; j < window.poses.size(); ++j) {
      window.poses[j] = base_relative_target(sc.base, t, t + static_cast<double>(j) * dt,
                                             window.poses[j]);
    }

    TrackerStep step;
    if (use_mpc) {
      step = mpc.control_step(pose, window, sim.q, jac, limits);
      m.qp_iterations_total += step.qp_iterations;
      m.qp_iterations_max = std::max(m.qp_iterations_max, step.qp_iterations);
      if (step.qp_status == QpStatus::kInfeasible) {
        ++m.qp_infeasible_ticks;
      }
      const VelocityBounds vb = velocity_bounds(sim.q, limits, dt);
      const JointVector raw = damped_pinv_velocity(jac, step.twist.vector(), sc.tracker.damping);
      for (int i = 0; i < kNumJoints; ++i) {
        const double viol = std::max(vb.lower[i] - raw[i], raw[i] - vb.upper[i]);
        m.max_velocity_bound_violation = std::max(m.max_velocity_bound_violation, viol);
      }
    } else {
      step = traditional_step(pose, desired, feedforward, sim.q, jac, limits, sc.tracker);
    }

    qbar += step.qd_command * dt;
    JointVector q_d = qbar;
    if (use_estimator) {
      const JointVector e = sim.q - qbar;
      const JointVector edot = sim.qd - step.qd_command;
      est = estimator_update(est, e, edot, sc.estimator, dt);
      q_d += estimator_correction(est, e, edot, sc.estimator);
    }
    const JointVector tau =
        pd_gravity_control(sim.q, sim.qd, q_d, step.qd_command, sc.pd, gravity);

    const Vec6 dev = pose_deviation(pose, desired);
    const double pos_err = dev.head<3>().norm();
    const double ori_err = deviation_angle_deg(pose, desired);
    m.series.push_back({t, pos_err, ori_err});
    if (t >= 1.0) {
      pos_sum += pos_err;
      ori_sum += ori_err;
      ++steady_ticks;
      m.max_position_error_m = std::max(m.max_position_error_m, pos_err);
      m.max_orientation_error_deg = std::max(m.max_orientation_error_deg, ori_err);
    }

    if (writing) {
      Eigen::Quaterniond dq = desired.orientation * pose.orientation.inverse();
      if (dq.w() < 0.0) {
        dq.coeffs() = -dq.coeffs();
      }
      const Vec3 erpy = rpy_from_quat(dq) * 180.0 / kPi;
      run_csv << fmt(t);
      for (int i = 0; i < 3; ++i) {
        run_csv << ',' << fmt(dev[i]);
      }
      for (int i = 0; i < 3; ++i) {
        run_csv << ',' << fmt(erpy[i]);
      }
      for (int i = 0; i < kNumJoints; ++i) {
        run_csv << ',' << fmt(sim.q[i]);
      }
      for (int i = 0; i < kNumJoints; ++i) {
        run_csv << ',' << fmt(q_d[i]);
      }
      const Vec6 u = step.twist.vector();
      for (int i = 0; i < 6; ++i) {
        run_csv << ',' << fmt(u[i]);
      }
      run_csv << ',' << (use_mpc ? step.qp_iterations : 0) << ',' << label << '\n';
    }

    sim = dyn.step(sim, tau, sc.base, dt);
    for (int i = 0; i < kNumJoints; ++i) {
      const double over = std::max({limits.position_lower[i] - sim.q[i],
                                    sim.q[i] - limits.position_upper[i],
                                    std::abs(sim.qd[i]) - limits.velocity_upper[i]});
      if (over > m.max_limit_violation) {
        m.max_limit_violation = over;
        m.limit_violation_joint = i + 1;
        m.limit_violation_t = t;
      }
    }
  }
  const auto wall_end = std::chrono::steady_clock::now();

  if (restore_enter >= 0.0) {
    m.restore_intervals.push_back({restore_enter, n_ticks * dt});
  }
  m.ticks = n_ticks;
  m.wall_time_s = std::chrono::duration<double>(wall_end - wall_start).count();
  if (steady_ticks > 0) {
    m.avg_position_error_m = pos_sum / steady_ticks;
    m.avg_orientation_error_deg = ori_sum / steady_ticks;
  }
  m.estimator_clamp_events = est.clamp_events;
  m.mission_done = mstate.phase == MissionPhase::kDone;
  m.catch_attempts = mstate.attempt;

  if (writing) {
    nlohmann::json j;
    j["scenario"] = sc.name;
    j["controller"] = m.controller;
    j["avg_position_error_m"] = m.avg_position_error_m;
    j["max_position_error_m"] = m.max_position_error_m;
    j["avg_orientation_error_deg"] = m.avg_orientation_error_deg;
    j["max_orientation_error_deg"] = m.max_orientation_error_deg;
    j["ticks"] = m.ticks;
    j["wall_time_s"] = m.wall_time_s;
    j["max_velocity_bound_violation"] = m.max_velocity_bound_violation;
    j["max_limit_violation"] = m.max_limit_violation;
    j["limit_violation_joint"] = m.limit_violation_joint;
    j["limit_violation_t"] = m.limit_violation_t;
    j["qp_iterations_total"] = m.qp_iterations_total;
    j["qp_iterations_max"] = m.qp_iterations_max;
    j["qp_infeasible_ticks"] = m.qp_infeasible_ticks;
    j["estimator_clamp_events"] = m.estimator_clamp_events;
    j["mission_done"] = m.mission_done;
    j["catch_attempts"] = m.catch_attempts;
    j["restore_intervals"] = m.restore_intervals;
    j["geometry"] = {
        {"reference", static_cast<int>(sc.reference.kind)},
        {"radius_m", sc.reference.radius_m},
        {"angular_rate_rad_s", sc.reference.angular_rate_rad_s},
        {"duration_s", sc.duration_s},
        {"dt_s", sc.dt_s},
    };
    std::ofstream mj(std::filesystem::path(out_dir) / "metrics.json");
    mj << j.dump(2) << '\n';
  }
  return m;
}

std::vector<TickRow> read_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("read_run_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,ex,ey,ez", 0) != 0) {
    throw ConfigError("read_run_csv: unexpected header in " + path);
  }
  std::vector<TickRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 29) {
      throw ConfigError("read_run_csv: row with " + std::to_string(cells.size()) + " cells");
    }
    TickRow r;
    size_t c = 0;
    r.t = std::stod(cells[c++]);
    for (int i = 0; i < 3; ++i) {
      r.position_error[i] = std::stod(cells[c++]);
    }
    for (int i = 0; i < 3; ++i) {
      r.orientation_error_deg[i] = std::stod(cells[c++]);
    }
    for (int i = 0; i < kNumJoints; ++i) {
      r.q[i] = std::stod(cells[c++]);
    }
    for (int i = 0; i < kNumJoints; ++i) {
      r.q_desired[i] = std::stod(cells[c++]);
    }
    for (int i = 0; i < 6; ++i) {
      r.twist[i] = std::stod(cells[c++]);
    }
    r.qp_iterations = std::stoi(cells[c++]);
    r.phase = cells[c++];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::pair<double, Vec3>> read_measurements_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("read_measurements_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,y,z", 0) != 0) {
    throw ConfigError("read_measurements_csv: unexpected header in " + path);
  }
  std::vector<std::pair<double, Vec3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    double v[4];
    char comma;
    if (!(ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3])) {
      throw ConfigError("read_measurements_csv: malformed row '" + line + "'");
    }
    rows.emplace_back(v[0], Vec3(v[1], v[2], v[3]));
  }
  return rows;
}

CompareResult compare_runs(const std::vector<std::string>& run_dirs) {
  if (run_dirs.size() < 2) {
    throw ConfigError("compare: need at least two run directories");
  }
  CompareResult out;
  nlohmann::json geometry;
  for (const auto& dir : run_dirs) {
    std::ifstream in(std::filesystem::path(dir) / "metrics.json");
    if (!in) {
      throw ConfigError("compare: no metrics.json in " + dir);
    }
    nlohmann::json j;
    in >> j;
    if (geometry.is_null()) {
      geometry = j["geometry"];
    } else if (geometry != j["geometry"]) {
      throw ConfigError("compare: " + dir + " was produced by a different scenario geometry");
    }
    CompareRow row;
    row.dir = dir;
    row.controller = j["controller"].get<std::string>();
    row.avg_position_error_m = j["avg_position_error_m"].get<double>();
    row.max_position_error_m = j["max_position_error_m"].get<double>();
    row.avg_orientation_error_deg = j["avg_orientation_error_deg"].get<double>();
    row.max_orientation_error_deg = j["max_orientation_error_deg"].get<double>();
    out.rows.push_back(row);
  }

  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s %-14s %12s %12s %14s %14s\n", "run", "controller",
                "avg_pos[m]", "max_pos[m]", "avg_ori[deg]", "max_ori[deg]");
  os << buf;
  for (const auto& r : out.rows) {
    std::snprintf(buf, sizeof(buf), "%-28s %-14s %12.4f %12.4f %14.3f %14.3f\n", r.dir.c_str(),
                  r.controller.c_str(), r.avg_position_error_m, r.max_position_error_m,
                  r.avg_orientation_error_deg, r.max_orientation_error_deg);
    os << buf;
  }
  os << '\n';
  for (size_t i = 0; i < out.rows.size(); ++i) {
    for (size_t j = 0; j < out.rows.size(); ++j) {
      if (i == j) {
        continue;
      }
      const auto& a = out.rows[i];
      const auto& b = out.rows[j];
      auto improvement = [](double x, double y) {
        return y != 0.0 ? (1.0 - x / y) * 100.0 : std::numeric_limits<double>::quiet_NaN();
      };
      std::snprintf(buf, sizeof(buf),
                    "%s vs %s: position %+.1f%%, orientation %+.1f%%\n", a.controller.c_str(),
                    b.controller.c_str(),
                    improvement(a.avg_position_error_m, b.avg_position_error_m),
                    improvement(a.avg_orientation_error_deg, b.avg_orientation_error_deg));
      os << buf;
    }
  }
  out.table = os.str();
  return out;
}

}  // namespace seaarm
