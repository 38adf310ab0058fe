#include "seaarm/mission.hpp"

#include <cmath>

namespace seaarm {

void TrackingSpace::validate() const {
  if (!(radius > 0.0)) {
    throw ConfigError("TrackingSpace: radius must be positive");
  }
  auto lower = [&](double x, double y) { return lower_surface ? lower_surface(x, y) : z_lower; };
  auto upper = [&](double x, double y) { return upper_surface ? upper_surface(x, y) : z_upper; };
  for (int ir = 0; ir <= 5; ++ir) {
    for (int ia = 0; ia < 8; ++ia) {
      const double r = radius * ir / 5.0;
      const double ang = 2.0 * kPi * ia / 8.0;
      const double x = r * std::cos(ang), y = r * std::sin(ang);
      if (!(lower(x, y) < upper(x, y))) {
        throw ConfigError("TrackingSpace: lower surface must stay below the upper surface");
      }
    }
  }
}

bool in_tracking_space(const Vec3& p, const TrackingSpace& space) {
  if (p.head<2>().norm() > space.radius) {
    return false;
  }
  const double lo = space.lower_surface ? space.lower_surface(p.x(), p.y()) : space.z_lower;
  const double hi = space.upper_surface ? space.upper_surface(p.x(), p.y()) : space.z_upper;
  return p.z() >= lo && p.z() <= hi;
}

CatchConditionMonitor::CatchConditionMonitor(double threshold_m, double window_s, double sample_dt)
    : threshold_(threshold_m), window_(window_s), dt_(sample_dt) {
  if (!(threshold_ > 0.0) || !(window_ > 0.0) || !(dt_ > 0.0)) {
    throw ConfigError("CatchConditionMonitor: threshold, window and period must be positive");
  }
}

void CatchConditionMonitor::push(double t, double planar_error) {
  if (have_sample_ && t - last_t_ > 1.5 * dt_) {
    below_ = false;
  }
  if (planar_error < threshold_) {
    if (!below_) {
      below_ = true;
      below_since_ = t;
    }
  } else {
    below_ = false;
  }
  have_sample_ = true;
  last_t_ = t;
}

void CatchConditionMonitor::reset() {
  below_ = false;
  have_sample_ = false;
}

bool CatchConditionMonitor::satisfied(double now) const {
  return below_ && (now - below_since_) > window_ && now - last_t_ <= 1.5 * dt_;
}

const char* to_string(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::kTrackCatch: return "track_catch";
    case MissionPhase::kTether: return "tether";
    case MissionPhase::kCalibrate: return "calibrate";
    case MissionPhase::kPlace: return "place";
    case MissionPhase::kDone: return "done";
  }
  return "?";
}

const char* to_string(TrackSubState sub) {
  switch (sub) {
    case TrackSubState::kTracking: return "tracking";
    case TrackSubState::kCatching: return "catching";
    case TrackSubState::kRestoring: return "restoring";
  }
  return "?";
}

const char* to_string(MissionDirective::Action action) {
  switch (action) {
    case MissionDirective::Action::kHold: return "hold";
    case MissionDirective::Action::kTrack: return "track";
    case MissionDirective::Action::kDescend: return "descend";
    case MissionDirective::Action::kRestore: return "restore";
    case MissionDirective::Action::kStabilize: return "stabilize";
    case MissionDirective::Action::kWaypoint: return "waypoint";
  }
  return "?";
}

void ScriptedEvents::validate() const {
  int last_attempt = 0;
  double last_time = -1.0;
  for (const auto& ev : events) {
    if (ev.kind == ScriptedEvent::Kind::kCatchResult) {
      if (ev.attempt <= last_attempt) {
        throw ConfigError("ScriptedEvents: catch results must use increasing attempt numbers");
      }
      last_attempt = ev.attempt;
    } else {
      if (ev.time < last_time) {
        throw ConfigError("ScriptedEvents: timed events must be ordered");
      }
      last_time = ev.time;
    }
  }
}

std::optional<bool> ScriptedEvents::catch_result(int attempt) const {
  for (const auto& ev : events) {
    if (ev.kind == ScriptedEvent::Kind::kCatchResult && ev.attempt == attempt) {
      return ev.success;
    }
  }
  return std::nullopt;
}

std::optional<double> ScriptedEvents::time_of(ScriptedEvent::Kind kind) const {
  for (const auto& ev : events) {
    if (ev.kind == kind) {
      return ev.time;
    }
  }
  return std::nullopt;
}

void MissionConfig::validate() const {
  tracking_space.validate();
  if (!(restore_duration_s >= 4.0 && restore_duration_s <= 6.0)) {
    throw ConfigError("MissionConfig: restore duration must lie in [4, 6] seconds");
  }
  if (!(catch_threshold_m > 0.0) || !(catch_window_s > 0.0) || !(lock_duration_s > 0.0) ||
      !(descend_rate > 0.0) || !(proximity_radius > 0.0) || !(tether_length > 0.0)) {
    throw ConfigError("MissionConfig: distances, rates and durations must be positive");
  }
}

MissionController::MissionController(const MissionConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

MissionState MissionController::initial_state(const Pose& effector) const {
  MissionState s;
  s.monitor = CatchConditionMonitor(cfg_.catch_threshold_m, cfg_.catch_window_s);
  s.hold_pose = effector;
  return s;
}

std::pair<MissionState, MissionDirective> MissionController::step(const MissionState& state,
                                                                  const TargetState& vehicle,
                                                                  const Pose& effector,
                                                                  const ScriptedEvents& events,
                                                                  double t) const {
  MissionState s = state;
  MissionDirective d;

  const Vec3 vp = vehicle.position();
  const Vec3 vv = vehicle.velocity();
  const Vec3 block = block_position(vp, cfg_.tether_length);

  auto enter_phase = [&](MissionPhase ph) {
    s.phase = ph;
    s.phase_entry_t = t;
  };
  auto enter_sub = [&](TrackSubState sub) {
    s.sub = sub;
    s.sub_entry_t = t;
  };

  const auto docking_time = events.time_of(ScriptedEvent::Kind::kDockingSuccess);
  const auto platform_time = events.time_of(ScriptedEvent::Kind::kPlatformLocked);
  if (docking_time && t >= *docking_time && !state.docking_success &&
      state.phase != MissionPhase::kTether) {
    throw MissionProtocolError("docking-success event arrived in phase " +
                               std::string(to_string(state.phase)));
  }
  if (platform_time && t >= *platform_time && !state.platform_locked &&
      state.phase != MissionPhase::kPlace) {
    throw MissionProtocolError("platform-locked event arrived in phase " +
                               std::string(to_string(state.phase)));
  }

  switch (state.phase) {
    case MissionPhase::kTrackCatch: {
      switch (state.sub) {
        case TrackSubState::kTracking: {
          if (!in_tracking_space(vp, cfg_.tracking_space)) {
            s.monitor.reset();
            d.action = MissionDirective::Action::kHold;
            d.target = cfg_.home;
            break;
          }
          const double err = (effector.position.head<2>() - block.head<2>()).norm();
          s.monitor.push(t, err);
          if (s.monitor.satisfied(t)) {
            enter_sub(TrackSubState::kCatching);
            s.attempt += 1;
            s.catch_start_z = effector.position.z();
            s.block_attracted = false;
            s.attracted_t = -1.0;
            d.action = MissionDirective::Action::kDescend;
            d.target = Pose(Vec3(block.x(), block.y(), effector.position.z()),
                            cfg_.home.orientation);
            d.target_velocity = Vec3(vv.x(), vv.y(), -cfg_.descend_rate);
            break;
          }
          d.action = MissionDirective::Action::kTrack;
          d.target = Pose(Vec3(block.x(), block.y(), cfg_.track_altitude), cfg_.home.orientation);
          d.target_velocity = Vec3(vv.x(), vv.y(), 0.0);
          break;
        }
        case TrackSubState::kCatching: {
          const double err = (effector.position.head<2>() - block.head<2>()).norm();
          s.monitor.push(t, err);

          if (s.block_attracted) {
            if (t - s.attracted_t >= cfg_.lock_duration_s) {
              s.block_locked = true;
              enter_phase(MissionPhase::kTether);
              s.hold_pose = effector;
              d.action = MissionDirective::Action::kStabilize;
              d.target = s.hold_pose;
              break;
            }
            d.action = MissionDirective::Action::kStabilize;
            d.target = Pose(block, cfg_.home.orientation);
            d.target_velocity = vv;
            break;
          }

          // The descend directive is only valid while the catch condition
          // still holds; losing it aborts the attempt.
          if (!s.monitor.satisfied(t)) {
            enter_sub(TrackSubState::kRestoring);
            d.action = MissionDirective::Action::kRestore;
            d.target = cfg_.home;
            break;
          }

          const bool reached = (effector.position - block).norm() <= cfg_.proximity_radius;
          const bool timed_out = t - state.sub_entry_t > cfg_.attempt_timeout_s;
          if (reached) {
            const bool success =
                events.proximity_catch || events.catch_result(s.attempt).value_or(false);
            if (success) {
              s.block_attracted = true;
              s.attracted_t = t;
              d.action = MissionDirective::Action::kStabilize;
              d.target = Pose(block, cfg_.home.orientation);
              d.target_velocity = vv;
              break;
            }
            enter_sub(TrackSubState::kRestoring);
            d.action = MissionDirective::Action::kRestore;
            d.target = cfg_.home;
            break;
          }
          if (timed_out) {
            enter_sub(TrackSubState::kRestoring);
            d.action = MissionDirective::Action::kRestore;
            d.target = cfg_.home;
            break;
          }

          const double z_des = std::max(block.z(), s.catch_start_z -
                                                       cfg_.descend_rate * (t - state.sub_entry_t));
          d.action = MissionDirective::Action::kDescend;
          d.target = Pose(Vec3(block.x(), block.y(), z_des), cfg_.home.orientation);
          d.target_velocity =
              Vec3(vv.x(), vv.y(), z_des > block.z() ? -cfg_.descend_rate : vv.z());
          break;
        }
        case TrackSubState::kRestoring: {
          if (t - state.sub_entry_t >= cfg_.restore_duration_s) {
            enter_sub(TrackSubState::kTracking);
            s.monitor.reset();
          }
          d.action = MissionDirective::Action::kRestore;
          d.target = cfg_.home;
          break;
        }
      }
      break;
    }
    case MissionPhase::kTether: {
      if (docking_time && t >= *docking_time) {
        s.docking_success = true;
        enter_phase(MissionPhase::kCalibrate);
        d.action = MissionDirective::Action::kWaypoint;
        d.target = cfg_.calibrate_pose;
        break;
      }
      d.action = MissionDirective::Action::kStabilize;
      d.target = state.hold_pose;
      break;
    }
    case MissionPhase::kCalibrate: {
      if (t - state.phase_entry_t >= cfg_.calibrate_duration_s) {
        enter_phase(MissionPhase::kPlace);
        d.action = MissionDirective::Action::kWaypoint;
        d.target = cfg_.place_pose;
        break;
      }
      d.action = MissionDirective::Action::kWaypoint;
      d.target = cfg_.calibrate_pose;
      break;
    }
    case MissionPhase::kPlace: {
      if (platform_time && t >= *platform_time) {
        s.platform_locked = true;
        enter_phase(MissionPhase::kDone);
        s.hold_pose = cfg_.place_pose;
        d.action = MissionDirective::Action::kHold;
        d.target = cfg_.place_pose;
        break;
      }
      d.action = MissionDirective::Action::kWaypoint;
      d.target = cfg_.place_pose;
      break;
    }
    case MissionPhase::kDone: {
      d.action = MissionDirective::Action::kHold;
      d.target = state.hold_pose;
      break;
    }
  }
  return {s, d};
}

}  // namespace seaarm
