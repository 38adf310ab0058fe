#pragma once

#include <array>
#include <string>
#include <vector>

#include "seaarm/scenario.hpp"

namespace seaarm {

/// Aggregate tracking quality and diagnostics of one run. Averages skip the
/// first second so the start-up transient does not mask steady behaviour.
struct RunMetrics {
  std::string scenario_name;
  std::string controller;
  double avg_position_error_m{0.0};
  double max_position_error_m{0.0};
  double avg_orientation_error_deg{0.0};
  double max_orientation_error_deg{0.0};
  long ticks{0};
  double wall_time_s{0.0};
  double max_velocity_bound_violation{0.0};  ///< commanded joint speed past its box
  double max_limit_violation{0.0};           ///< plant state past the joint limits
  int limit_violation_joint{0};              ///< joint of the worst excursion, 0 if none
  double limit_violation_t{0.0};
  long qp_iterations_total{0};
  int qp_iterations_max{0};
  long qp_infeasible_ticks{0};
  long estimator_clamp_events{0};
  bool mission_done{false};
  int catch_attempts{0};
  std::vector<std::array<double, 2>> restore_intervals;  ///< [enter, exit] times

  /// Per-tick (t, position error, orientation error in degrees).
  std::vector<std::array<double, 3>> series;
};

/// Runs the closed loop and writes run.csv, metrics.json and, for mission
/// scenarios, phases.csv and measurements.csv into `out_dir` (created if
/// missing; empty string disables writing).
RunMetrics run_scenario(const Scenario& scenario, const std::string& out_dir);

/// Parsed copy of a run.csv row.
struct TickRow {
  double t;
  Vec3 position_error;
  Vec3 orientation_error_deg;
  JointVector q, q_desired;
  Vec6 twist;
  int qp_iterations;
  std::string phase;
};

std::vector<TickRow> read_run_csv(const std::string& path);

std::vector<std::pair<double, Vec3>> read_measurements_csv(const std::string& path);

struct CompareRow {
  std::string dir;
  std::string controller;
  double avg_position_error_m, max_position_error_m;
  double avg_orientation_error_deg, max_orientation_error_deg;
};

/// Metrics of several runs side by side with pairwise improvements
/// (1 - a/b) * 100%. Refuses to mix runs of different scenario geometry.
struct CompareResult {
  std::vector<CompareRow> rows;
  std::string table;
};

CompareResult compare_runs(const std::vector<std::string>& run_dirs);

}  // namespace seaarm
