// Deterministic discrete-time convoy simulation.
//
// Per control tick, in fixed order:
//   1. every vehicle evaluates its broadcast gate and transmits through the
//      lossy channel (its own message also enters its own buffer directly,
//      bypassing the channel)
//   2. staged deliveries are policy-filtered and inserted into buffers
//   3. the leader tracks the oval (pure pursuit + PID speed); followers plan
//      a setpoint from their buffers and run their control law
//   4. all plants advance one step
//   5. one log row is appended per vehicle
// The whole evolution is a pure function of the config, including the seed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "convoy/buffer.hpp"
#include "convoy/control.hpp"
#include "convoy/geo.hpp"
#include "convoy/logio.hpp"
#include "convoy/planner.hpp"
#include "convoy/policy.hpp"
#include "convoy/track.hpp"
#include "convoy/trajectory.hpp"
#include "convoy/transport.hpp"
#include "convoy/types.hpp"
#include "convoy/vehicle.hpp"

namespace convoy {

struct SimConfig {
  // [sim]
  int n_vehicles = 3;
  double dt_control = 0.02;    // seconds; must divide bcast_interval
  double bcast_interval = 0.1;  // seconds
  double drop_rate = 0.0;
  int laps = 5;
  std::uint64_t seed = 42;

  // [frame]
  FrameConfig frame{GeoCoordinate{deg2rad(28.602), deg2rad(-81.200)}, 0.0, kEarthMeanRadius};

  // [messaging]
  std::size_t buffer_window = 20;   // 2 s of history at 10 Hz
  double staleness_horizon = 1.0;   // seconds
  std::string reception_policy = "all-predecessor";
  int port_base = 47000;
  std::string broadcast_address = "127.0.0.1";

  // [planner]
  double follow_distance = 0.2;  // meters per convoy position
  double v_min = 0.0;
  double v_max = 3.0;
  double theta_max = 0.35;
  std::string planner_kind = "non-model";  // non-model | model-based
  std::string model_kind = "straight";     // straight | quadratic

  // [control]
  PidConfig pid;
  StanleyConfig stanley;
  double pursuit_lookahead = 0.5;  // meters, leader only
  double leader_slew = 0.3;        // m/s^2 reference shaping, leader only

  // [vehicle]
  BicycleParams bicycle;
};

struct SimResult {
  std::vector<LogRow> log;
  MessageStats messages;
  int laps_completed = 0;
  double sim_time = 0.0;
};

class World {
 public:
  explicit World(const SimConfig& cfg)
      : cfg_(cfg),
        bus_(ChannelModel{cfg.drop_rate, cfg.seed}, ReceptionPolicy::from_name(cfg.reception_policy)) {
    const double start_s = 0.25 + cfg.follow_distance * (cfg.n_vehicles - 1);
    agents_.reserve(cfg.n_vehicles);
    for (int id = 0; id < cfg.n_vehicles; ++id) {
      Agent agent(HistoryBuffer(cfg.buffer_window, cfg.staleness_horizon),
                  BroadcastGate(cfg.bcast_interval), PidController(cfg.pid));
      const auto pose = track_.at(start_s - cfg.follow_distance * id);
      agent.state.id = id;
      agent.state.position = pose.point;
      agent.state.heading = pose.heading;
      agent.state.speed = schedule_.v_first_half;
      agent.setpoint = TargetSetpoint{agent.state.speed, agent.state.heading};
      agent.planner = PlannerConfig{cfg.follow_distance, cfg.bcast_interval, cfg.v_min,
                                    cfg.v_max, cfg.theta_max, id};
      agent.control = default_control_law(cfg.pid, cfg.stanley);
      agents_.push_back(std::move(agent));
    }
    leader_proj_ = track_.project(agents_[0].state.position);
    leader_v_ref_ = schedule_.v_first_half;
    for (auto& agent : agents_) bus_.attach(agent.state.id, &agent.buffer);
    append_log_rows();  // t = 0 snapshot so logs replay the full evolution
  }

  /// Replace a follower's control law (the leader does not use one).
  void set_control_law(int id, ControlLaw law) { agents_.at(id).control = std::move(law); }

  void tick() {
    const double now = time_;

    // 1: gated broadcasts
    for (auto& agent : agents_) {
      if (!agent.gate.should_broadcast(agent.buffer, now)) continue;
      const BasicSafetyMessage msg = make_bsm(agent);
      bus_.broadcast(msg);
      agent.buffer.insert(msg);  // own state bypasses the channel
    }

    // 2: deliveries
    const auto accepted = bus_.flush();
    for (auto& agent : agents_) {
      const auto it = accepted.find(agent.state.id);
      agent.received_this_tick = it == accepted.end() ? 0 : it->second;
    }

    // 3: decisions (commands are computed for all vehicles before any plant moves)
    std::vector<ControlCommand> commands(agents_.size());
    commands[0] = leader_command();
    for (std::size_t i = 1; i < agents_.size(); ++i) commands[i] = follower_command(agents_[i], now);

    // 4: plants
    for (std::size_t i = 0; i < agents_.size(); ++i)
      agents_[i].state = bicycle_step(agents_[i].state, commands[i], cfg_.bicycle, cfg_.dt_control);
    time_ += cfg_.dt_control;
    for (auto& agent : agents_) agent.state.t = time_;
    update_leader_progress();

    // 5: log
    append_log_rows();
  }

  void run() {
    // generous ceiling against misconfiguration; the leader's progress is
    // what actually terminates the run
    const double slowest = std::min(schedule_.v_first_half, schedule_.v_second_half);
    const std::size_t max_ticks = static_cast<std::size_t>(
        10.0 * cfg_.laps * track_.lap_length() / std::max(0.1, slowest) / cfg_.dt_control);
    while (laps_completed() < cfg_.laps) {
      if (tick_count_++ > max_ticks)
        throw std::runtime_error("simulation failed to complete the configured laps");
      tick();
    }
  }

  SimResult result() const {
    return SimResult{log_, bus_.stats(), laps_completed(), time_};
  }

  int laps_completed() const {
    return static_cast<int>(std::floor(leader_cum_arc_ / track_.lap_length()));
  }

  double time() const { return time_; }
  const OvalTrack& track() const { return track_; }
  const std::vector<LogRow>& log() const { return log_; }
  const VehicleState& state(int id) const { return agents_.at(id).state; }

 private:
  struct Agent {
    Agent(HistoryBuffer b, BroadcastGate g, PidController p)
        : buffer(std::move(b)), gate(std::move(g)), speed_pid(std::move(p)) {}

    VehicleState state;
    HistoryBuffer buffer;
    BroadcastGate gate;
    PidController speed_pid;  // leader speed tracking
    std::uint64_t next_seq = 0;
    TargetSetpoint setpoint;
    PlannerConfig planner;
    ControlLaw control;
    int received_this_tick = 0;
    double cross_track = 0.0;
  };

  BasicSafetyMessage make_bsm(Agent& agent) {
    const auto& st = agent.state;
    const GeoCoordinate geo = from_local(st.position, cfg_.frame);
    BasicSafetyMessage msg;
    msg.car = st.id;
    msg.seq = agent.next_seq++;
    msg.t = st.t;
    msg.lat = rad2deg(geo.lat);
    msg.lon = rad2deg(geo.lon);
    msg.heading = heading_to_degrees(heading_to_global(st.heading, cfg_.frame));
    msg.speed = st.speed;
    msg.event_flags = {{"car", st.id}};
    return msg;
  }

  // Pure pursuit on the oval plus PID toward the schedule speed. The speed
  // reference is slew-limited so the convoy sees ramps instead of steps when
  // the schedule switches between lap halves.
  ControlCommand leader_command() {
    Agent& leader = agents_[0];
    const auto& st = leader.state;
    const double s = track_.project(st.position);
    const double v_sched = schedule_.speed_at(s, track_.lap_length());
    const double max_dv = cfg_.leader_slew * cfg_.dt_control;
    leader_v_ref_ += std::clamp(v_sched - leader_v_ref_, -max_dv, max_dv);
    const double v_ref = leader_v_ref_;
    const auto goal = track_.at(s + cfg_.pursuit_lookahead).point;
    const double alpha =
        wrap_pi(std::atan2(goal.qx - st.position.qx, goal.qy - st.position.qy) - st.heading);
    ControlCommand cmd;
    cmd.steer = std::atan(2.0 * cfg_.bicycle.wheelbase * std::sin(alpha) / cfg_.pursuit_lookahead);
    cmd.steer = std::clamp(cmd.steer, -cfg_.bicycle.max_steer, cfg_.bicycle.max_steer);
    cmd.accel = leader.speed_pid.step(v_ref, st.speed, cfg_.dt_control);
    leader.setpoint = TargetSetpoint{v_ref, track_.at(s).heading};
    return cmd;
  }

  // Followers replan every tick against the newest records they hold. When
  // no fresh upstream record exists the previous setpoint is held with its
  // speed decaying 10% per cycle toward zero.
  ControlCommand follower_command(Agent& agent, double now) {
    try {
      if (cfg_.planner_kind == "model-based") {
        agent.setpoint = model_based_target(agent, now, agent.cross_track);
      } else {
        agent.setpoint =
            generate_target(agent.state, agent.buffer, agent.planner, cfg_.frame, now);
        agent.cross_track = 0.0;  // the non-model planner tracks no explicit path
      }
    } catch (const NoTargetError&) {
      agent.setpoint.v_star *= 0.9;  // hold heading, decay speed toward 0
    } catch (const DegenerateFitError&) {
      agent.setpoint.v_star *= 0.9;
    }
    return agent.control(agent.setpoint, agent.state, cfg_.dt_control, agent.cross_track);
  }

  /// Curve-aware variant for the immediate predecessor: fit its buffered
  /// track, predict it one broadcast interval ahead, and aim at the point
  /// one following distance behind that prediction along the curve. The
  /// fitted path also supplies the cross-track error for the Stanley law.
  TargetSetpoint model_based_target(Agent& agent, double now, double& cross_track) {
    const int predecessor = agent.state.id - 1;
    const auto records = agent.buffer.history(predecessor, now);
    const TrajectoryKind kind =
        cfg_.model_kind == "quadratic" ? TrajectoryKind::kQuadratic : TrajectoryKind::kStraight;
    const std::size_t needed = kind == TrajectoryKind::kQuadratic ? 3 : 2;
    if (records.size() < needed) throw NoTargetError("not enough predecessor history for a fit");

    std::vector<LocalPoint> samples;
    samples.reserve(records.size());
    for (const auto& r : records)
      samples.push_back(to_local(GeoCoordinate{deg2rad(r.lat), deg2rad(r.lon)}, cfg_.frame));
    TrajectoryModel model = fit_trajectory(samples, kind);
    if (kind == TrajectoryKind::kQuadratic &&
        std::sqrt(model.residual() / static_cast<double>(samples.size())) > 0.05) {
      // the window doubles back in x (corner apex); a chord fit is the honest model
      model = fit_trajectory(samples, TrajectoryKind::kStraight);
    }
    model.set_end_speed(records.back().speed);

    const GapPolicy policy{GapPolicy::Mode::kTimeGap, 0.0, cfg_.bcast_interval};
    const PathError err = path_error(model, agent.state.position, policy);
    cross_track = err.cross_track;

    const double preview_arc = model.arc_length() + model.end_speed() * cfg_.bcast_interval;
    const double gfd = cfg_.follow_distance;  // immediate predecessor only
    const LocalPoint goal = model.point_at_arc(preview_arc - gfd);

    const auto& st = agent.state;
    const double dist = std::hypot(goal.qx - st.position.qx, goal.qy - st.position.qy);
    const double v_star = std::clamp(dist / cfg_.bcast_interval, cfg_.v_min, cfg_.v_max);
    const double bearing = std::atan2(goal.qx - st.position.qx, goal.qy - st.position.qy);
    const double dtheta =
        std::clamp(wrap_pi(bearing - st.heading), -cfg_.theta_max, cfg_.theta_max);
    return TargetSetpoint{v_star, st.heading + dtheta};
  }

  void append_log_rows() {
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const auto& st = agents_[i].state;
      LogRow row;
      row.t = time_;
      row.car = st.id;
      row.qx = st.position.qx;
      row.qy = st.position.qy;
      row.heading_deg = heading_to_degrees(st.heading);
      row.speed = st.speed;
      row.v_star = agents_[i].setpoint.v_star;
      row.steer = st.steer;
      row.gap_to_predecessor =
          i == 0 ? 0.0
                 : std::hypot(st.position.qx - agents_[i - 1].state.position.qx,
                              st.position.qy - agents_[i - 1].state.position.qy);
      row.msgs_received_this_tick = agents_[i].received_this_tick;
      log_.push_back(row);
    }
  }

  void update_leader_progress() {
    const double s = track_.project(agents_[0].state.position);
    double delta = s - leader_proj_;
    const double lap = track_.lap_length();
    if (delta < -lap / 2.0) delta += lap;
    if (delta > lap / 2.0) delta -= lap;
    leader_cum_arc_ += delta;
    leader_proj_ = s;
  }

  SimConfig cfg_;
  OvalTrack track_;
  LeaderSchedule schedule_;
  InProcessBus bus_;
  std::vector<Agent> agents_;
  std::vector<LogRow> log_;
  double time_ = 0.0;
  double leader_v_ref_ = 0.0;
  double leader_proj_ = 0.0;
  double leader_cum_arc_ = 0.0;
  std::size_t tick_count_ = 0;
};

inline SimResult run_sim(const SimConfig& cfg) {
  World world(cfg);
  world.run();
  return world.result();
}

}  // namespace convoy
