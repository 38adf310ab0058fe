#include "seaarm/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace seaarm {

using nlohmann::json;

const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kTraditional: return "traditional";
    case ControllerKind::kMpc: return "mpc";
    case ControllerKind::kMpcEstimator: return "mpc_estimator";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "traditional") {
    return ControllerKind::kTraditional;
  }
  if (name == "mpc") {
    return ControllerKind::kMpc;
  }
  if (name == "mpc_estimator") {
    return ControllerKind::kMpcEstimator;
  }
  throw ConfigError("unknown controller '" + name +
                    "' (expected traditional, mpc or mpc_estimator)");
}

Vec3 VehicleSpec::position(double t) const {
  auto val = [t](const SineWave& w) {
    return w.amplitude * std::sin(2.0 * kPi / w.period_s * t + w.phase_rad);
  };
  return hover_m + Vec3(val(drift_x), val(drift_y), val(drift_z));
}

Vec3 VehicleSpec::velocity(double t) const {
  auto val = [t](const SineWave& w) {
    const double omega = 2.0 * kPi / w.period_s;
    return w.amplitude * omega * std::cos(omega * t + w.phase_rad);
  };
  return Vec3(val(drift_x), val(drift_y), val(drift_z));
}

void Scenario::validate() const {
  if (!(duration_s > 0.0)) {
    throw ConfigError("Scenario: duration must be positive");
  }
  if (!(dt_s > 0.0)) {
    throw ConfigError("Scenario: control period must be positive");
  }
  tracker.validate();
  estimator.validate();
  filter.validate();
  mission.validate();
  events.validate();
}

namespace {

void reject_unknown_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("scenario: unknown key '" + key + "' in " + where);
    }
  }
}

SineWave parse_sine(const json& j, const std::string& where, double amplitude_scale) {
  reject_unknown_keys(j, where, {"amplitude", "period_s", "phase_rad"});
  SineWave w;
  w.amplitude = j.value("amplitude", 0.0) * amplitude_scale;
  w.period_s = j.value("period_s", 1.0);
  w.phase_rad = j.value("phase_rad", 0.0);
  return w;
}

Vec3 parse_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("scenario: " + where + " must be an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

JointVector parse_joint_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != kNumJoints) {
    throw ConfigError("scenario: " + where + " must be an array of 7 numbers");
  }
  JointVector v;
  for (int i = 0; i < kNumJoints; ++i) {
    v[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

MotionProfile parse_base_motion(const json& j, const std::string& base_dir) {
  reject_unknown_keys(j, "base_motion",
                      {"roll_deg", "pitch_deg", "yaw_deg", "heave_m", "mount_offset_m",
                       "trace_csv"});
  Vec3 mount(0, 0, 0.5);
  if (j.contains("mount_offset_m")) {
    mount = parse_vec3(j["mount_offset_m"], "base_motion.mount_offset_m");
  }
  if (j.contains("trace_csv")) {
    const auto path = std::filesystem::path(base_dir) / j["trace_csv"].get<std::string>();
    return MotionProfile::load_trace_csv(path.string(), mount);
  }
  const double d2r = kPi / 180.0;
  SineWave roll, pitch, yaw, heave;
  if (j.contains("roll_deg")) {
    roll = parse_sine(j["roll_deg"], "base_motion.roll_deg", d2r);
  }
  if (j.contains("pitch_deg")) {
    pitch = parse_sine(j["pitch_deg"], "base_motion.pitch_deg", d2r);
  }
  if (j.contains("yaw_deg")) {
    yaw = parse_sine(j["yaw_deg"], "base_motion.yaw_deg", d2r);
  }
  if (j.contains("heave_m")) {
    heave = parse_sine(j["heave_m"], "base_motion.heave_m", 1.0);
  }
  return MotionProfile::analytic(roll, pitch, yaw, heave, mount);
}

ReferenceSpec parse_reference(const json& j) {
  reject_unknown_keys(j, "reference", {"type", "radius_m", "angular_rate_rad_s", "span_rad"});
  ReferenceSpec r;
  const std::string type = j.value("type", "hold");
  if (type == "hold") {
    r.kind = ReferenceSpec::Kind::kHold;
  } else if (type == "circle") {
    r.kind = ReferenceSpec::Kind::kCircle;
  } else if (type == "arc") {
    r.kind = ReferenceSpec::Kind::kArc;
  } else if (type == "mission") {
    r.kind = ReferenceSpec::Kind::kMission;
  } else {
    throw ConfigError("scenario: unknown reference type '" + type + "'");
  }
  r.radius_m = j.value("radius_m", r.radius_m);
  r.angular_rate_rad_s = j.value("angular_rate_rad_s", r.angular_rate_rad_s);
  r.span_rad = j.value("span_rad", r.span_rad);
  return r;
}

void parse_tracker(const json& j, TrackerConfig& cfg) {
  reject_unknown_keys(j, "tracker",
                      {"horizon", "q_weight", "r_weight", "k_feedback", "damping", "posture_gain",
                       "velocity_headroom"});
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.velocity_headroom = j.value("velocity_headroom", cfg.velocity_headroom);
  if (j.contains("q_weight")) {
    cfg.q_weight = Mat6::Identity() * j["q_weight"].get<double>();
  }
  if (j.contains("r_weight")) {
    cfg.r_weight = Mat6::Identity() * j["r_weight"].get<double>();
  }
  if (j.contains("k_feedback")) {
    const json& k = j["k_feedback"];
    if (!k.is_array() || k.size() != 6) {
      throw ConfigError("scenario: tracker.k_feedback must be an array of 6 numbers");
    }
    Vec6 diag;
    for (int i = 0; i < 6; ++i) {
      diag[i] = k[static_cast<size_t>(i)].get<double>();
    }
    cfg.k_feedback = diag.asDiagonal();
  }
  cfg.damping = j.value("damping", cfg.damping);
  cfg.posture_gain = j.value("posture_gain", cfg.posture_gain);
}

void parse_vehicle(const json& j, VehicleSpec& v) {
  reject_unknown_keys(j, "vehicle",
                      {"hover_m", "drift_x_m", "drift_y_m", "drift_z_m", "measurement_sigma_m",
                       "tether_length_m", "measurements_csv"});
  if (j.contains("hover_m")) {
    v.hover_m = parse_vec3(j["hover_m"], "vehicle.hover_m");
  }
  if (j.contains("drift_x_m")) {
    v.drift_x = parse_sine(j["drift_x_m"], "vehicle.drift_x_m", 1.0);
  }
  if (j.contains("drift_y_m")) {
    v.drift_y = parse_sine(j["drift_y_m"], "vehicle.drift_y_m", 1.0);
  }
  if (j.contains("drift_z_m")) {
    v.drift_z = parse_sine(j["drift_z_m"], "vehicle.drift_z_m", 1.0);
  }
  v.measurement_sigma_m = j.value("measurement_sigma_m", v.measurement_sigma_m);
  v.tether_length_m = j.value("tether_length_m", v.tether_length_m);
  v.measurements_csv = j.value("measurements_csv", v.measurements_csv);
}

void parse_mission(const json& j, MissionConfig& m, MissionLayout& layout,
                   ScriptedEvents& events) {
  reject_unknown_keys(
      j, "mission",
      {"restore_duration_s", "lock_duration_s", "catch_threshold_m", "catch_window_s",
       "descend_rate_m_s", "proximity_radius_m", "attempt_timeout_s", "track_altitude_m",
       "calibrate_duration_s", "tracking_radius_m", "tracking_z_m", "calibrate_offset_m",
       "place_offset_m", "proximity_catch", "events"});
  m.restore_duration_s = j.value("restore_duration_s", m.restore_duration_s);
  m.lock_duration_s = j.value("lock_duration_s", m.lock_duration_s);
  m.catch_threshold_m = j.value("catch_threshold_m", m.catch_threshold_m);
  m.catch_window_s = j.value("catch_window_s", m.catch_window_s);
  m.descend_rate = j.value("descend_rate_m_s", m.descend_rate);
  m.proximity_radius = j.value("proximity_radius_m", m.proximity_radius);
  m.attempt_timeout_s = j.value("attempt_timeout_s", m.attempt_timeout_s);
  m.track_altitude = j.value("track_altitude_m", m.track_altitude);
  m.calibrate_duration_s = j.value("calibrate_duration_s", m.calibrate_duration_s);
  m.tracking_space.radius = j.value("tracking_radius_m", m.tracking_space.radius);
  if (j.contains("tracking_z_m")) {
    const json& z = j["tracking_z_m"];
    if (!z.is_array() || z.size() != 2) {
      throw ConfigError("scenario: mission.tracking_z_m must be [lower, upper]");
    }
    m.tracking_space.z_lower = z[0].get<double>();
    m.tracking_space.z_upper = z[1].get<double>();
  }
  if (j.contains("calibrate_offset_m")) {
    layout.calibrate_offset_m = parse_vec3(j["calibrate_offset_m"], "mission.calibrate_offset_m");
  }
  if (j.contains("place_offset_m")) {
    layout.place_offset_m = parse_vec3(j["place_offset_m"], "mission.place_offset_m");
  }
  events.proximity_catch = j.value("proximity_catch", false);
  if (j.contains("events")) {
    for (const json& ej : j["events"]) {
      reject_unknown_keys(ej, "mission.events[]",
                          {"catch_attempt", "success", "docking_success_at_s",
                           "platform_locked_at_s"});
      ScriptedEvent ev;
      if (ej.contains("catch_attempt")) {
        ev.kind = ScriptedEvent::Kind::kCatchResult;
        ev.attempt = ej["catch_attempt"].get<int>();
        ev.success = ej.value("success", false);
      } else if (ej.contains("docking_success_at_s")) {
        ev.kind = ScriptedEvent::Kind::kDockingSuccess;
        ev.time = ej["docking_success_at_s"].get<double>();
      } else if (ej.contains("platform_locked_at_s")) {
        ev.kind = ScriptedEvent::Kind::kPlatformLocked;
        ev.time = ej["platform_locked_at_s"].get<double>();
      } else {
        throw ConfigError("scenario: mission event without a recognized key");
      }
      events.events.push_back(ev);
    }
  }
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
  }
  reject_unknown_keys(j, "scenario",
                      {"name", "duration_s", "dt_s", "seed", "controller", "initial_q_deg",
                       "base_motion", "reference", "tracker", "estimator", "pd", "filter",
                       "vehicle", "mission"});
  Scenario s;
  if (!j.contains("name")) {
    throw ConfigError("scenario: missing required key 'name'");
  }
  s.name = j["name"].get<std::string>();
  s.duration_s = j.value("duration_s", s.duration_s);
  s.dt_s = j.value("dt_s", s.dt_s);
  s.seed = j.value("seed", s.seed);
  if (j.contains("controller")) {
    s.controller = controller_from_string(j["controller"].get<std::string>());
  }
  if (j.contains("initial_q_deg")) {
    s.initial_q = parse_joint_vector(j["initial_q_deg"], "initial_q_deg") * kPi / 180.0;
  }
  if (j.contains("base_motion")) {
    s.base = parse_base_motion(j["base_motion"], base_dir);
  }
  if (j.contains("reference")) {
    s.reference = parse_reference(j["reference"]);
  }
  s.tracker.dt = s.dt_s;
  s.tracker.posture_gain = 1.0;
  s.tracker.posture = s.initial_q;
  if (j.contains("tracker")) {
    parse_tracker(j["tracker"], s.tracker);
  }
  if (j.contains("estimator")) {
    reject_unknown_keys(j["estimator"], "estimator", {"h_diag", "accumulator_limit"});
    if (j["estimator"].contains("h_diag")) {
      s.estimator.h_diag = parse_vec3(j["estimator"]["h_diag"], "estimator.h_diag");
    }
    if (j["estimator"].contains("accumulator_limit")) {
      s.estimator.accumulator_limit =
          parse_vec3(j["estimator"]["accumulator_limit"], "estimator.accumulator_limit");
    }
  }
  if (j.contains("pd")) {
    reject_unknown_keys(j["pd"], "pd", {"kp", "kd"});
    JointVector kp = s.pd.kp, kd = s.pd.kd;
    if (j["pd"].contains("kp")) {
      kp = parse_joint_vector(j["pd"]["kp"], "pd.kp");
    }
    if (j["pd"].contains("kd")) {
      kd = parse_joint_vector(j["pd"]["kd"], "pd.kd");
    }
    s.pd = PdGains(kp, kd);
  }
  s.filter.dt = s.dt_s;
  if (j.contains("filter")) {
    reject_unknown_keys(j["filter"], "filter", {"sigma_m", "sigma_s", "gate"});
    s.filter.sigma_m = j["filter"].value("sigma_m", s.filter.sigma_m);
    s.filter.sigma_s = j["filter"].value("sigma_s", s.filter.sigma_s);
    s.filter.gate = j["filter"].value("gate", s.filter.gate);
  }
  if (j.contains("vehicle")) {
    parse_vehicle(j["vehicle"], s.vehicle);
  }
  if (!s.vehicle.measurements_csv.empty()) {
    s.vehicle.measurements_csv =
        (std::filesystem::path(base_dir) / s.vehicle.measurements_csv).string();
  }
  s.mission.tether_length = s.vehicle.tether_length_m;
  if (j.contains("mission")) {
    parse_mission(j["mission"], s.mission, s.layout, s.events);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("scenario: cannot open " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string override_json_value(const std::string& text, const std::string& pointer,
                                const std::string& value) {
  json j = json::parse(text);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;  // bare strings are allowed
  }
  try {
    j[json::json_pointer(pointer)] = v;
  } catch (const json::exception& e) {
    throw ConfigError("sweep: cannot set '" + pointer + "': " + e.what());
  }
  return j.dump();
}

}  // namespace seaarm
