// Low-level control: PID speed holding and Stanley lateral steering.
//
// The pipeline only expects a routine mapping (setpoint, state) to an
// actuation command, so alternative controllers drop in by replacing one
// callback.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "convoy/geo.hpp"
#include "convoy/types.hpp"

namespace convoy {

struct PidConfig {
  double kp = 2.0;
  double ki = 0.2;
  double kd = 0.0;
  double integral_clamp = 0.5;  // symmetric bound on the accumulator
  double output_clamp = 2.0;    // symmetric bound on the output, m/s^2
};

class PidController {
 public:
  PidController() = default;
  explicit PidController(const PidConfig& cfg) : cfg_(cfg) {}

  /// One discrete PID update on error = target - actual. The integral is
  /// clamped before use (anti-windup) and the derivative term is zero on the
  /// first call after a reset.
  double step(double target, double actual, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pid step requires dt > 0");
    const double error = target - actual;
    integral_ = std::clamp(integral_ + error * dt, -cfg_.integral_clamp, cfg_.integral_clamp);
    const double derivative = has_prev_ ? (error - prev_error_) / dt : 0.0;
    prev_error_ = error;
    has_prev_ = true;
    const double out = cfg_.kp * error + cfg_.ki * integral_ + cfg_.kd * derivative;
    return std::clamp(out, -cfg_.output_clamp, cfg_.output_clamp);
  }

  void reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    has_prev_ = false;
  }

  double integral() const { return integral_; }
  const PidConfig& config() const { return cfg_; }

 private:
  PidConfig cfg_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool has_prev_ = false;
};

struct StanleyConfig {
  double k_e = 1.5;        // cross-track gain, 1/s
  double v_epsilon = 0.1;  // m/s, softens the law at standstill
  double max_steer = 0.5;  // radians
};

/// steer = clamp(heading_error + atan(k_e * cross_track / (v + v_epsilon))).
/// The heading error is wrapped to (-pi, pi]; positive cross-track (ego left
/// of the path) steers right, back toward it.
inline double stanley_step(const StanleyConfig& cfg, double heading_error, double cross_track,
                           double v) {
  const double steer =
      wrap_pi(heading_error) + std::atan(cfg.k_e * cross_track / (v + cfg.v_epsilon));
  return std::clamp(steer, -cfg.max_steer, cfg.max_steer);
}

/// Default setpoint-to-command mapping: PID on speed, Stanley on heading.
/// `cross_track` comes from the planner's path error and is zero when the
/// planner does not track an explicit path.
inline ControlCommand actuate(const TargetSetpoint& setpoint, const VehicleState& state,
                              PidController& pid, const StanleyConfig& stanley, double dt,
                              double cross_track = 0.0) {
  ControlCommand cmd;
  cmd.accel = pid.step(setpoint.v_star, state.speed, dt);
  cmd.steer =
      stanley_step(stanley, wrap_pi(setpoint.theta_star - state.heading), cross_track, state.speed);
  return cmd;
}

/// Pluggable controller slot: anything mapping (setpoint, state) to a
/// command can replace the default PID + Stanley pair. The trailing
/// cross-track argument is zero unless a path-tracking planner supplies one.
using ControlLaw =
    std::function<ControlCommand(const TargetSetpoint&, const VehicleState&, double, double)>;

inline ControlLaw default_control_law(const PidConfig& pid_cfg, const StanleyConfig& stanley_cfg) {
  auto pid = std::make_shared<PidController>(pid_cfg);
  return [pid, stanley_cfg](const TargetSetpoint& sp, const VehicleState& st, double dt,
                            double cross_track) {
    return actuate(sp, st, *pid, stanley_cfg, dt, cross_track);
  };
}

}  // namespace convoy
