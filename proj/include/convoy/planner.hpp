// Platooning planner: evaluates the convoy spacing cost over the tracked
// upstream vehicles and searches the admissible (speed, heading) box for the
// setpoint that minimizes it.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "convoy/buffer.hpp"
#include "convoy/geo.hpp"
#include "convoy/optimize.hpp"
#include "convoy/trajectory.hpp"
#include "convoy/types.hpp"

namespace convoy {

struct PlannerConfig {
  double follow_distance = 0.2;  // meters per convoy position
  double bcast_interval = 0.1;   // seconds, the propagation horizon
  double v_min = 0.0;            // m/s
  double v_max = 3.0;            // m/s
  double theta_max = 0.35;       // radians, heading offset bound
  int car_number = 1;            // own convoy index
};

/// Raised when no tracked upstream vehicle has a fresh record; callers hold
/// their previous setpoint.
struct NoTargetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sum over every tracked upstream vehicle of the Euclidean distance between
/// the ego's predicted future position and the goal that realizes the
/// desired following distance behind that vehicle's predicted future
/// position. Both predictions propagate the current motion by the broadcast
/// interval. `ego_yaw` is radians clockwise from true north, like the
/// heading field of the messages.
inline double platooning_cost(double ego_v, double ego_yaw, const GeoCoordinate& ego_geo,
                              HistoryBuffer& buffer, const PlannerConfig& cfg,
                              const FrameConfig& frame, double now) {
  const LocalPoint ego = to_local(ego_geo, frame);
  const double ego_yaw_local = ego_yaw - frame.rotation;
  const double horizon = cfg.bcast_interval;
  const double ego_fx = ego.qx + ego_v * std::sin(ego_yaw_local) * horizon;
  const double ego_fy = ego.qy + ego_v * std::cos(ego_yaw_local) * horizon;

  double total_cost = 0.0;
  int tracked = 0;
  for (int sender : buffer.senders()) {
    if (sender == cfg.car_number) continue;  // own records are not targets
    const auto record = buffer.latest_record(sender, now);
    if (!record) continue;
    const int target_car = record->event_flags.at("car");
    if (target_car >= cfg.car_number) continue;
    ++tracked;

    const LocalPoint target =
        to_local(GeoCoordinate{deg2rad(record->lat), deg2rad(record->lon)}, frame);
    const double yaw_target = deg2rad(record->heading) - frame.rotation;
    const double v_target = record->speed;
    const int position = cfg.car_number - target_car;
    const double gfd = cfg.follow_distance * position;

    const double target_fx = target.qx + v_target * std::sin(yaw_target) * horizon;
    const double target_fy = target.qy + v_target * std::cos(yaw_target) * horizon;
    const double goal_x = target_fx - gfd * std::sin(yaw_target);
    const double goal_y = target_fy - gfd * std::cos(yaw_target);
    total_cost += std::hypot(goal_x - ego_fx, goal_y - ego_fy);
  }
  if (tracked == 0) throw NoTargetError("no fresh upstream record to track");
  return total_cost;
}

/// Searches [v_min, v_max] x [heading - theta_max, heading + theta_max] for
/// the setpoint minimizing platooning_cost: a 21x21 uniform grid picks the
/// basin, then one golden-section pass per axis refines inside the
/// neighbouring cells. Grid ties break toward the smallest speed change,
/// then the smallest heading change. Deterministic throughout.
inline TargetSetpoint generate_target(const VehicleState& state, HistoryBuffer& buffer,
                                      const PlannerConfig& cfg, const FrameConfig& frame,
                                      double now) {
  const GeoCoordinate ego_geo = from_local(state.position, frame);
  const double yaw_global = state.heading + frame.rotation;

  auto cost_at = [&](double v, double dtheta) {
    return platooning_cost(v, yaw_global + dtheta, ego_geo, buffer, cfg, frame, now);
  };
  // Surfaces the no-target case before any search work happens.
  cost_at(state.speed, 0.0);

  constexpr int kGrid = 21;
  const double v_span = cfg.v_max - cfg.v_min;
  const double v_cell = v_span / (kGrid - 1);
  const double t_cell = 2.0 * cfg.theta_max / (kGrid - 1);

  double best_v = std::clamp(state.speed, cfg.v_min, cfg.v_max);
  double best_dt = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  auto consider = [&](double v, double dtheta, double cost) {
    if (cost < best_cost ||
        (cost == best_cost && (std::abs(v - state.speed) < std::abs(best_v - state.speed) ||
                               (std::abs(v - state.speed) == std::abs(best_v - state.speed) &&
                                std::abs(dtheta) < std::abs(best_dt))))) {
      best_cost = cost;
      best_v = v;
      best_dt = dtheta;
    }
  };
  for (int i = 0; i < kGrid; ++i) {
    const double v = v_span > 0.0 ? cfg.v_min + i * v_cell : cfg.v_min;
    for (int j = 0; j < kGrid; ++j) {
      const double dtheta = cfg.theta_max > 0.0 ? -cfg.theta_max + j * t_cell : 0.0;
      consider(v, dtheta, cost_at(v, dtheta));
      if (cfg.theta_max <= 0.0) break;
    }
    if (v_span <= 0.0) break;
  }

  constexpr int kGoldenIters = 20;
  if (v_span > 0.0) {
    const auto [v, cost] = golden_section_min(
        [&](double v) { return cost_at(v, best_dt); }, std::max(cfg.v_min, best_v - v_cell),
        std::min(cfg.v_max, best_v + v_cell), kGoldenIters);
    consider(v, best_dt, cost);
  }
  if (cfg.theta_max > 0.0) {
    const auto [dtheta, cost] = golden_section_min(
        [&](double dt) { return cost_at(best_v, dt); }, std::max(-cfg.theta_max, best_dt - t_cell),
        std::min(cfg.theta_max, best_dt + t_cell), kGoldenIters);
    consider(best_v, dtheta, cost);
  }
  return TargetSetpoint{best_v, state.heading + best_dt};
}

}  // namespace convoy
