#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "seaarm/target_filter.hpp"
#include "seaarm/types.hpp"

namespace seaarm {

/// Cylinder-like region the vehicle must occupy before the arm tracks it:
/// planar distance from the arm base within `radius`, altitude between the
/// two surfaces. The region is closed, so boundary points count as inside.
struct TrackingSpace {
  double radius{0.7};
  double z_lower{0.3};
  double z_upper{1.2};
  std::function<double(double, double)> lower_surface;  ///< overrides z_lower when set
  std::function<double(double, double)> upper_surface;  ///< overrides z_upper when set

  void validate() const;
};

bool in_tracking_space(const Vec3& p, const TrackingSpace& space);

/// Hanging-block position straight below the vehicle.
inline Vec3 block_position(const Vec3& vehicle, double tether_length) {
  return vehicle - Vec3(0, 0, tether_length);
}

/// Tracks how long the planar error has stayed below a threshold. Sampling
/// gaps longer than 1.5 periods restart the span.
class CatchConditionMonitor {
 public:
  CatchConditionMonitor(double threshold_m = 0.15, double window_s = 1.0, double sample_dt = 0.01);

  void push(double t, double planar_error);
  void reset();

  /// True when the error has been below the threshold for strictly longer
  /// than the window.
  bool satisfied(double now) const;

 private:
  double threshold_, window_, dt_;
  bool below_{false};
  double below_since_{0.0};
  bool have_sample_{false};
  double last_t_{0.0};
};

enum class MissionPhase { kTrackCatch, kTether, kCalibrate, kPlace, kDone };
enum class TrackSubState { kTracking, kCatching, kRestoring };

const char* to_string(MissionPhase phase);
const char* to_string(TrackSubState sub);

struct ScriptedEvent {
  enum class Kind { kCatchResult, kDockingSuccess, kPlatformLocked };
  Kind kind{Kind::kCatchResult};
  int attempt{0};      ///< kCatchResult: 1-based attempt the outcome applies to
  bool success{true};  ///< kCatchResult
  double time{0.0};    ///< other kinds: absolute mission time
};

/// External outcomes the simulation cannot produce on its own. With
/// `proximity_catch` set, a catch succeeds whenever the effector reaches the
/// block instead of consulting the script; an attempt with no scripted
/// result fails.
struct ScriptedEvents {
  std::vector<ScriptedEvent> events;
  bool proximity_catch{false};

  void validate() const;
  std::optional<bool> catch_result(int attempt) const;
  std::optional<double> time_of(ScriptedEvent::Kind kind) const;
};

struct MissionProtocolError : std::runtime_error {
  explicit MissionProtocolError(const std::string& what) : std::runtime_error(what) {}
};

struct MissionConfig {
  TrackingSpace tracking_space;
  double catch_threshold_m{0.15};
  double catch_window_s{1.0};
  double restore_duration_s{5.0};  ///< must lie in [4, 6]
  double lock_duration_s{0.8};
  double descend_rate{0.3};
  double proximity_radius{0.05};
  double attempt_timeout_s{8.0};
  double tether_length{0.6};
  double track_altitude{1.0};  ///< tracking height, above the block so the catch descends onto it
  double calibrate_duration_s{3.0};
  Pose home;
  Pose calibrate_pose;
  Pose place_pose;

  void validate() const;
};

struct MissionState {
  MissionPhase phase{MissionPhase::kTrackCatch};
  TrackSubState sub{TrackSubState::kTracking};
  int attempt{0};  ///< attempts started so far
  double phase_entry_t{0.0};
  double sub_entry_t{0.0};
  bool block_attracted{false};
  bool block_locked{false};
  bool docking_success{false};
  bool platform_locked{false};
  double attracted_t{-1.0};
  double catch_start_z{0.0};
  Pose hold_pose;
  CatchConditionMonitor monitor;
};

struct MissionDirective {
  enum class Action { kHold, kTrack, kDescend, kRestore, kStabilize, kWaypoint };
  Action action{Action::kHold};
  Pose target;
  Vec3 target_velocity{Vec3::Zero()};
};

const char* to_string(MissionDirective::Action action);

/// Phase logic for the grab-and-stow mission. Pure transition: the next
/// state and directive depend only on the arguments and the configuration.
class MissionController {
 public:
  explicit MissionController(const MissionConfig& cfg);

  std::pair<MissionState, MissionDirective> step(const MissionState& state,
                                                 const TargetState& vehicle, const Pose& effector,
                                                 const ScriptedEvents& events, double t) const;

  MissionState initial_state(const Pose& effector) const;

  const MissionConfig& config() const { return cfg_; }

 private:
  MissionConfig cfg_;
};

}  // namespace seaarm
