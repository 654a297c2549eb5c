// Small value types shared between the planning, control and plant layers.
#pragma once

#include "convoy/geo.hpp"

namespace convoy {

/// High-level motion target produced by a planner.
struct TargetSetpoint {
  double v_star = 0.0;      // m/s
  double theta_star = 0.0;  // radians, clockwise from frame north
};

/// Actuation request consumed by the vehicle plant.
struct ControlCommand {
  double accel = 0.0;  // m/s^2
  double steer = 0.0;  // radians, front-wheel angle
};

/// Ground-truth simulated vehicle state, expressed in the local frame.
struct VehicleState {
  int id = 0;
  LocalPoint position;
  double heading = 0.0;  // radians, clockwise from frame north
  double speed = 0.0;    // m/s, >= 0
  double steer = 0.0;    // radians, last applied front-wheel angle
  double t = 0.0;        // seconds
};

/// Kinematic bicycle parameters.
struct BicycleParams {
  double wheelbase = 0.5;   // meters
  double max_steer = 0.5;   // radians
  double max_accel = 2.0;   // m/s^2, symmetric clamp
  double max_speed = 3.0;   // m/s
};

}  // namespace convoy
