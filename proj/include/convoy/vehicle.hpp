// Kinematic bicycle plant, explicit Euler. Headings advance clockwise from
// frame north, so position integrates as (sin h, cos h) * v.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "convoy/geo.hpp"
#include "convoy/types.hpp"

namespace convoy {

inline VehicleState bicycle_step(VehicleState state, const ControlCommand& cmd,
                                 const BicycleParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("bicycle step requires dt > 0");
  const double accel = std::clamp(cmd.accel, -params.max_accel, params.max_accel);
  const double steer = std::clamp(cmd.steer, -params.max_steer, params.max_steer);

  state.speed = std::clamp(state.speed + accel * dt, 0.0, params.max_speed);
  state.heading = wrap_pi(state.heading + state.speed / params.wheelbase * std::tan(steer) * dt);
  state.position.qx += state.speed * std::sin(state.heading) * dt;
  state.position.qy += state.speed * std::cos(state.heading) * dt;
  state.steer = steer;
  state.t += dt;
  return state;
}

}  // namespace convoy
