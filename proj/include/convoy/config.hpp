// Flat typed key-value config file with sections mirroring the module names:
//
//   [sim]        n_vehicles, dt_control, bcast_interval, drop_rate, laps, seed
//   [frame]      ref_lat_deg, ref_lon_deg, rotation_deg, earth_radius
//   [messaging]  window, staleness, reception_policy, port_base, broadcast_address
//   [planner]    follow_distance, v_min, v_max, theta_max, kind, model
//   [control]    kp, ki, kd, integral_clamp, accel_clamp, k_e, v_epsilon,
//                max_steer, pursuit_lookahead, leader_slew
//   [vehicle]    wheelbase, max_steer, max_accel, max_speed
//
// Every key is optional and overrides the built-in default. '#' and ';'
// start comments. Unknown sections or keys are errors, as are type or range
// violations; messages carry file, line and field.
#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "convoy/policy.hpp"
#include "convoy/sim.hpp"

namespace convoy {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& value, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + value + "'");
  }
}

inline long long parse_int(const std::string& value, const std::string& where) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError(where + ": expected an integer, got '" + value + "'");
  return v;
}

}  // namespace detail

inline SimConfig parse_config(std::istream& in, const std::string& origin) {
  SimConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"sim.n_vehicles",
       [&](const std::string& v, const std::string& w) {
         cfg.n_vehicles = static_cast<int>(detail::parse_int(v, w));
       }},
      {"sim.dt_control",
       [&](const std::string& v, const std::string& w) { cfg.dt_control = detail::parse_double(v, w); }},
      {"sim.bcast_interval",
       [&](const std::string& v, const std::string& w) {
         cfg.bcast_interval = detail::parse_double(v, w);
       }},
      {"sim.drop_rate",
       [&](const std::string& v, const std::string& w) { cfg.drop_rate = detail::parse_double(v, w); }},
      {"sim.laps",
       [&](const std::string& v, const std::string& w) {
         cfg.laps = static_cast<int>(detail::parse_int(v, w));
       }},
      {"sim.seed",
       [&](const std::string& v, const std::string& w) {
         cfg.seed = static_cast<std::uint64_t>(detail::parse_int(v, w));
       }},
      {"frame.ref_lat_deg",
       [&](const std::string& v, const std::string& w) {
         cfg.frame.ref.lat = deg2rad(detail::parse_double(v, w));
       }},
      {"frame.ref_lon_deg",
       [&](const std::string& v, const std::string& w) {
         cfg.frame.ref.lon = deg2rad(detail::parse_double(v, w));
       }},
      {"frame.rotation_deg",
       [&](const std::string& v, const std::string& w) {
         cfg.frame.rotation = deg2rad(detail::parse_double(v, w));
       }},
      {"frame.earth_radius",
       [&](const std::string& v, const std::string& w) {
         cfg.frame.earth_radius = detail::parse_double(v, w);
       }},
      {"messaging.window",
       [&](const std::string& v, const std::string& w) {
         cfg.buffer_window = static_cast<std::size_t>(detail::parse_int(v, w));
       }},
      {"messaging.staleness",
       [&](const std::string& v, const std::string& w) {
         cfg.staleness_horizon = detail::parse_double(v, w);
       }},
      {"messaging.reception_policy",
       [&](const std::string& v, const std::string&) { cfg.reception_policy = v; }},
      {"messaging.port_base",
       [&](const std::string& v, const std::string& w) {
         cfg.port_base = static_cast<int>(detail::parse_int(v, w));
       }},
      {"messaging.broadcast_address",
       [&](const std::string& v, const std::string&) { cfg.broadcast_address = v; }},
      {"planner.follow_distance",
       [&](const std::string& v, const std::string& w) {
         cfg.follow_distance = detail::parse_double(v, w);
       }},
      {"planner.v_min",
       [&](const std::string& v, const std::string& w) { cfg.v_min = detail::parse_double(v, w); }},
      {"planner.v_max",
       [&](const std::string& v, const std::string& w) { cfg.v_max = detail::parse_double(v, w); }},
      {"planner.theta_max",
       [&](const std::string& v, const std::string& w) { cfg.theta_max = detail::parse_double(v, w); }},
      {"planner.kind",
       [&](const std::string& v, const std::string&) { cfg.planner_kind = v; }},
      {"planner.model",
       [&](const std::string& v, const std::string&) { cfg.model_kind = v; }},
      {"control.kp",
       [&](const std::string& v, const std::string& w) { cfg.pid.kp = detail::parse_double(v, w); }},
      {"control.ki",
       [&](const std::string& v, const std::string& w) { cfg.pid.ki = detail::parse_double(v, w); }},
      {"control.kd",
       [&](const std::string& v, const std::string& w) { cfg.pid.kd = detail::parse_double(v, w); }},
      {"control.integral_clamp",
       [&](const std::string& v, const std::string& w) {
         cfg.pid.integral_clamp = detail::parse_double(v, w);
       }},
      {"control.accel_clamp",
       [&](const std::string& v, const std::string& w) {
         cfg.pid.output_clamp = detail::parse_double(v, w);
       }},
      {"control.k_e",
       [&](const std::string& v, const std::string& w) { cfg.stanley.k_e = detail::parse_double(v, w); }},
      {"control.v_epsilon",
       [&](const std::string& v, const std::string& w) {
         cfg.stanley.v_epsilon = detail::parse_double(v, w);
       }},
      {"control.max_steer",
       [&](const std::string& v, const std::string& w) {
         cfg.stanley.max_steer = detail::parse_double(v, w);
       }},
      {"control.pursuit_lookahead",
       [&](const std::string& v, const std::string& w) {
         cfg.pursuit_lookahead = detail::parse_double(v, w);
       }},
      {"control.leader_slew",
       [&](const std::string& v, const std::string& w) {
         cfg.leader_slew = detail::parse_double(v, w);
       }},
      {"vehicle.wheelbase",
       [&](const std::string& v, const std::string& w) {
         cfg.bicycle.wheelbase = detail::parse_double(v, w);
       }},
      {"vehicle.max_steer",
       [&](const std::string& v, const std::string& w) {
         cfg.bicycle.max_steer = detail::parse_double(v, w);
       }},
      {"vehicle.max_accel",
       [&](const std::string& v, const std::string& w) {
         cfg.bicycle.max_accel = detail::parse_double(v, w);
       }},
      {"vehicle.max_speed",
       [&](const std::string& v, const std::string& w) {
         cfg.bicycle.max_speed = detail::parse_double(v, w);
       }},
  };

  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "sim" && section != "frame" && section != "messaging" &&
          section != "planner" && section != "control" && section != "vehicle")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
    const std::string qualified = section + "." + key;
    const auto it = setters.find(qualified);
    if (it == setters.end())
      throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    it->second(value, where + " [" + section + "] " + key);
  }
  return cfg;
}

inline void validate_config(const SimConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("[" + field + "]: " + why);
  };
  if (cfg.n_vehicles < 1) fail("sim.n_vehicles", "must be >= 1");
  if (!(cfg.dt_control > 0.0)) fail("sim.dt_control", "must be > 0");
  if (!(cfg.bcast_interval > 0.0)) fail("sim.bcast_interval", "must be > 0");
  const double ratio = cfg.bcast_interval / cfg.dt_control;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    fail("sim.dt_control", "must divide bcast_interval");
  if (cfg.drop_rate < 0.0 || cfg.drop_rate > 1.0) fail("sim.drop_rate", "must lie in [0, 1]");
  if (cfg.laps < 1) fail("sim.laps", "must be >= 1 (zero laps would yield empty metrics)");
  if (std::abs(cfg.frame.ref.lat) > kPi / 2.0) fail("frame.ref_lat_deg", "must lie in [-90, 90]");
  if (std::abs(cfg.frame.ref.lon) > kPi) fail("frame.ref_lon_deg", "must lie in [-180, 180]");
  if (cfg.frame.rotation <= -kPi || cfg.frame.rotation > kPi)
    fail("frame.rotation_deg", "must lie in (-180, 180]");
  if (!(cfg.frame.earth_radius > 0.0)) fail("frame.earth_radius", "must be > 0");
  if (cfg.buffer_window < 1) fail("messaging.window", "must be >= 1");
  if (!(cfg.staleness_horizon > 0.0)) fail("messaging.staleness", "must be > 0");
  try {
    ReceptionPolicy::from_name(cfg.reception_policy);
  } catch (const std::invalid_argument& e) {
    fail("messaging.reception_policy", e.what());
  }
  if (cfg.port_base < 1024 || cfg.port_base + cfg.n_vehicles > 65535)
    fail("messaging.port_base", "must leave room for one port per vehicle in [1024, 65535]");
  if (!(cfg.follow_distance > 0.0)) fail("planner.follow_distance", "must be > 0");
  if (cfg.v_min > cfg.v_max) fail("planner.v_min", "must not exceed v_max");
  if (cfg.v_min < 0.0) fail("planner.v_min", "must be >= 0");
  if (!(cfg.theta_max > 0.0)) fail("planner.theta_max", "must be > 0");
  if (cfg.planner_kind != "non-model" && cfg.planner_kind != "model-based")
    fail("planner.kind", "must be non-model or model-based");
  if (cfg.model_kind != "straight" && cfg.model_kind != "quadratic")
    fail("planner.model", "must be straight or quadratic");
  if (!(cfg.pid.integral_clamp > 0.0)) fail("control.integral_clamp", "must be > 0");
  if (!(cfg.pid.output_clamp > 0.0)) fail("control.accel_clamp", "must be > 0");
  if (!(cfg.stanley.k_e > 0.0)) fail("control.k_e", "must be > 0");
  if (!(cfg.stanley.v_epsilon > 0.0)) fail("control.v_epsilon", "must be > 0");
  if (!(cfg.stanley.max_steer > 0.0)) fail("control.max_steer", "must be > 0");
  if (!(cfg.pursuit_lookahead > 0.0)) fail("control.pursuit_lookahead", "must be > 0");
  if (!(cfg.leader_slew > 0.0)) fail("control.leader_slew", "must be > 0");
  if (!(cfg.bicycle.wheelbase > 0.0)) fail("vehicle.wheelbase", "must be > 0");
  if (!(cfg.bicycle.max_steer > 0.0)) fail("vehicle.max_steer", "must be > 0");
  if (!(cfg.bicycle.max_accel > 0.0)) fail("vehicle.max_accel", "must be > 0");
  if (!(cfg.bicycle.max_speed > 0.0)) fail("vehicle.max_speed", "must be > 0");
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  SimConfig cfg = parse_config(in, path);
  validate_config(cfg);
  return cfg;
}

}  // namespace convoy
