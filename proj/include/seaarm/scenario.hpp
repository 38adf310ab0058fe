#pragma once

#include <string>

#include "seaarm/adaptive_estimator.hpp"
#include "seaarm/base_motion.hpp"
#include "seaarm/dynamics.hpp"
#include "seaarm/mission.hpp"
#include "seaarm/mpc_tracker.hpp"
#include "seaarm/target_filter.hpp"

namespace seaarm {

enum class ControllerKind { kTraditional, kMpc, kMpcEstimator };

const char* to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);

struct ReferenceSpec {
  enum class Kind { kHold, kCircle, kArc, kMission };
  Kind kind{Kind::kHold};
  double radius_m{0.35};
  double angular_rate_rad_s{0.5};
  double span_rad{kPi};
};

/// Truth model of the hovering vehicle: a hover point with sinusoidal drift
/// per axis, plus the noise level of its position measurements.
struct VehicleSpec {
  Vec3 hover_m{0.45, 0.0, 1.45};
  SineWave drift_x, drift_y, drift_z;
  double measurement_sigma_m{0.02};
  double tether_length_m{0.6};
  std::string measurements_csv;  ///< replay recorded measurements instead of sampling noise

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
};

/// Waypoint offsets applied to the starting effector pose to derive the
/// calibration and drop-off targets.
struct MissionLayout {
  Vec3 calibrate_offset_m{0.0, -0.25, 0.05};
  Vec3 place_offset_m{-0.1, -0.35, -0.05};
};

/// Everything one run needs. Loaded from JSON where every key except `name`
/// has a default; unknown keys are rejected.
struct Scenario {
  std::string name{"unnamed"};
  double duration_s{60.0};
  double dt_s{0.01};
  uint64_t seed{1};
  ControllerKind controller{ControllerKind::kMpcEstimator};
  JointVector initial_q{(JointVector() << 0.0, 0.1, 0.0, 1.3, 0.0, 0.8, 0.0).finished()};
  MotionProfile base{MotionProfile::analytic({}, {}, {})};
  ReferenceSpec reference;
  TrackerConfig tracker;
  EstimatorGains estimator;
  PdGains pd{PdGains::default_arm()};
  FilterModel filter;
  VehicleSpec vehicle;
  MissionConfig mission;
  MissionLayout layout;
  ScriptedEvents events;

  void validate() const;
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& base_dir);

/// Re-parse with one value replaced (JSON pointer syntax, value parsed as
/// JSON). Used by parameter sweeps.
std::string override_json_value(const std::string& text, const std::string& pointer,
                                const std::string& value);

}  // namespace seaarm
