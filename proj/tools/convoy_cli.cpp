// Command-line front end: single runs, drop-rate sweeps, metric recomputation
// from logs, plan-view plots, and a multi-process UDP demo agent.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.
#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "convoy/config.hpp"
#include "convoy/experiment.hpp"
#include "convoy/metrics.hpp"
#include "convoy/svg.hpp"
#include "convoy/udp.hpp"

namespace {

void print_metrics(double drop_rate, const convoy::RunMetrics& m) {
  std::printf("drop_rate            %.2f\n", drop_rate);
  std::printf("platooning_error_p95 %.2f cm\n", m.log.platooning_error_p95_cm);
  std::printf("speed_spread_p95     %.3f m/s\n", m.log.speed_spread_p95);
  std::printf("laps_completed       %d\n", m.log.laps_completed);
  std::printf("messages             sent %llu, delivered %llu, dropped %llu, "
              "stale %llu, out-of-order %llu\n",
              static_cast<unsigned long long>(m.messages.sent),
              static_cast<unsigned long long>(m.messages.delivered),
              static_cast<unsigned long long>(m.messages.dropped),
              static_cast<unsigned long long>(m.messages.discarded_stale),
              static_cast<unsigned long long>(m.messages.discarded_out_of_order));
}

int run_command(const std::string& config_path, double* drop_rate, std::uint64_t* seed,
                const std::string& out_dir) {
  convoy::SimConfig cfg = convoy::load_config(config_path);
  if (drop_rate) cfg.drop_rate = *drop_rate;
  if (seed) cfg.seed = *seed;
  convoy::validate_config(cfg);
  const auto result = convoy::run_experiment(cfg, out_dir);
  print_metrics(cfg.drop_rate, result.metrics);
  std::ofstream metrics_csv(std::filesystem::path(out_dir) / "metrics.csv", std::ios::binary);
  metrics_csv << convoy::metrics_to_csv({{cfg.drop_rate, result.metrics}});
  std::printf("log   %s\nplot  %s\n", result.log_path.c_str(), result.plot_path.c_str());
  return 0;
}

int sweep_command(const std::string& config_path, const std::vector<double>& rates,
                  std::uint64_t* seed, const std::string& out_dir) {
  convoy::SimConfig cfg = convoy::load_config(config_path);
  if (seed) cfg.seed = *seed;
  for (double rate : rates)
    if (rate < 0.0 || rate > 1.0)
      throw convoy::ConfigError("--drop-rates entries must lie in [0, 1]");
  const auto table = convoy::run_sweep(cfg, rates, out_dir);
  std::printf("%-10s %-24s %-20s\n", "drop_rate", "platooning_error_p95_cm",
              "speed_spread_p95_mps");
  for (const auto& [rate, metrics] : table)
    std::printf("%-10.2f %-24.2f %-20.3f\n", rate, metrics.log.platooning_error_p95_cm,
                metrics.log.speed_spread_p95);
  std::printf("outputs in %s (metrics.csv, run_<rate>.csv, trajectories_<rate>.svg)\n",
              out_dir.c_str());
  return 0;
}

int metrics_command(const std::string& log_path, double follow_distance) {
  const auto rows = convoy::read_log_csv(log_path);
  const auto metrics = convoy::compute_log_metrics(rows, follow_distance);
  std::printf("platooning_error_p95 %.2f cm\n", metrics.platooning_error_p95_cm);
  std::printf("speed_spread_p95     %.3f m/s\n", metrics.speed_spread_p95);
  std::printf("laps_completed       %d\n", metrics.laps_completed);
  return 0;
}

int plot_command(const std::string& log_path, const std::string& out_path,
                 const std::string& label) {
  convoy::write_plot_svg(out_path, convoy::read_log_csv(log_path), label);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

// One vehicle per process, wall-clock paced, sockets on loopback or LAN.
// Non-deterministic by nature; meant for demos rather than experiments.
int demo_udp_command(const std::string& config_path, int vehicle_id, double duration_s) {
  using clock = std::chrono::steady_clock;
  convoy::SimConfig cfg = convoy::load_config(config_path);
  if (vehicle_id < 0 || vehicle_id >= cfg.n_vehicles)
    throw convoy::ConfigError("--vehicle must lie in [0, n_vehicles)");

  convoy::UdpConfig udp_cfg{cfg.port_base, cfg.broadcast_address};
  convoy::UdpTransport transport(vehicle_id, udp_cfg);
  const convoy::ChannelModel channel{cfg.drop_rate, cfg.seed};
  const auto policy = convoy::ReceptionPolicy::from_name(cfg.reception_policy);
  convoy::HistoryBuffer buffer(cfg.buffer_window, cfg.staleness_horizon);
  convoy::BroadcastGate gate(cfg.bcast_interval);
  convoy::OvalTrack track;
  convoy::LeaderSchedule schedule;
  convoy::PidController speed_pid(cfg.pid);
  convoy::PlannerConfig planner{cfg.follow_distance, cfg.bcast_interval, cfg.v_min,
                                cfg.v_max,           cfg.theta_max,      vehicle_id};
  auto control = convoy::default_control_law(cfg.pid, cfg.stanley);

  convoy::VehicleState state;
  state.id = vehicle_id;
  const double start_s = 0.25 + cfg.follow_distance * (cfg.n_vehicles - 1);
  const auto pose = track.at(start_s - cfg.follow_distance * vehicle_id);
  state.position = pose.point;
  state.heading = pose.heading;
  state.speed = schedule.v_first_half;
  convoy::TargetSetpoint setpoint{state.speed, state.heading};
  double leader_v_ref = schedule.v_first_half;

  std::uint64_t seq = 0;
  std::uint64_t received = 0;
  const auto t0 = clock::now();
  auto next_tick = t0;
  std::printf("vehicle %d on port %d, %s for %.0f s\n", vehicle_id,
              cfg.port_base + vehicle_id, vehicle_id == 0 ? "leading" : "following", duration_s);

  while (true) {
    const double now = std::chrono::duration<double>(clock::now() - t0).count();
    if (now >= duration_s) break;
    state.t = now;

    if (gate.should_broadcast(buffer, now)) {
      const auto geo = convoy::from_local(state.position, cfg.frame);
      convoy::BasicSafetyMessage msg;
      msg.car = vehicle_id;
      msg.seq = seq++;
      msg.t = now;
      msg.lat = convoy::rad2deg(geo.lat);
      msg.lon = convoy::rad2deg(geo.lon);
      msg.heading = convoy::heading_to_degrees(convoy::heading_to_global(state.heading, cfg.frame));
      msg.speed = state.speed;
      msg.event_flags = {{"car", vehicle_id}};
      transport.broadcast(msg, cfg.n_vehicles);
      buffer.insert(msg);
    }

    for (auto& msg : transport.drain(channel)) {
      if (!policy.accept(vehicle_id, msg.car)) continue;
      if (buffer.insert(msg)) ++received;
    }

    convoy::ControlCommand cmd;
    if (vehicle_id == 0) {
      const double s = track.project(state.position);
      const double v_sched = schedule.speed_at(s, track.lap_length());
      const double max_dv = cfg.leader_slew * cfg.dt_control;
      leader_v_ref += std::clamp(v_sched - leader_v_ref, -max_dv, max_dv);
      const auto goal = track.at(s + cfg.pursuit_lookahead).point;
      const double alpha = convoy::wrap_pi(
          std::atan2(goal.qx - state.position.qx, goal.qy - state.position.qy) - state.heading);
      cmd.steer = std::clamp(
          std::atan(2.0 * cfg.bicycle.wheelbase * std::sin(alpha) / cfg.pursuit_lookahead),
          -cfg.bicycle.max_steer, cfg.bicycle.max_steer);
      cmd.accel = speed_pid.step(leader_v_ref, state.speed, cfg.dt_control);
    } else {
      try {
        setpoint = convoy::generate_target(state, buffer, planner, cfg.frame, now);
      } catch (const convoy::NoTargetError&) {
        setpoint.v_star *= 0.9;
      }
      cmd = control(setpoint, state, cfg.dt_control, 0.0);
    }
    state = convoy::bicycle_step(state, cmd, cfg.bicycle, cfg.dt_control);

    next_tick += std::chrono::microseconds(static_cast<long>(cfg.dt_control * 1e6));
    std::this_thread::sleep_until(next_tick);
  }
  std::printf("vehicle %d: sent %llu datagrams, stored %llu messages, final pos (%.2f, %.2f)\n",
              vehicle_id, static_cast<unsigned long long>(transport.sent_datagrams()),
              static_cast<unsigned long long>(received), state.position.qx, state.position.qy);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative platooning simulator and experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", log_path, out_path, label;
  double drop_rate = 0.0, follow_distance = 0.2, duration = 30.0;
  std::uint64_t seed = 0;
  std::vector<double> rates{0.0, 0.1, 0.4, 0.5};
  int vehicle_id = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write run.csv / trajectories.svg");
  run->add_option("--config", config_path, "Config file")->required();
  auto* run_drop = run->add_option("--drop-rate", drop_rate, "Override [sim] drop_rate");
  auto* run_seed = run->add_option("--seed", seed, "Override [sim] seed");
  run->add_option("--out", out_dir, "Output directory (default .)");

  auto* sweep = app.add_subcommand("sweep", "Run a drop-rate sweep and write metrics.csv");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--drop-rates", rates, "Comma-separated drop rates")->delimiter(',');
  auto* sweep_seed = sweep->add_option("--seed", seed, "Override [sim] seed");
  sweep->add_option("--out", out_dir, "Output directory (default .)");

  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a run.csv log");
  metrics->add_option("--log", log_path, "Log CSV")->required();
  metrics->add_option("--follow-distance", follow_distance, "Gap set-point (default 0.2 m)");

  auto* plot = app.add_subcommand("plot", "Render a plan-view SVG from a run.csv log");
  plot->add_option("--log", log_path, "Log CSV")->required();
  plot->add_option("--out", out_path, "Output SVG path")->required();
  plot->add_option("--label", label, "Legend label");

  auto* demo = app.add_subcommand("demo-udp", "Run one vehicle agent over UDP sockets");
  demo->add_option("--config", config_path, "Config file")->required();
  demo->add_option("--vehicle", vehicle_id, "Vehicle id (0 = leader)")->required();
  demo->add_option("--duration", duration, "Wall-clock seconds to run (default 30)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a config error
  }

  try {
    if (run->parsed())
      return run_command(config_path, run_drop->count() ? &drop_rate : nullptr,
                         run_seed->count() ? &seed : nullptr, out_dir);
    if (sweep->parsed())
      return sweep_command(config_path, rates, sweep_seed->count() ? &seed : nullptr, out_dir);
    if (metrics->parsed()) return metrics_command(log_path, follow_distance);
    if (plot->parsed()) return plot_command(log_path, out_path, label);
    if (demo->parsed()) return demo_udp_command(config_path, vehicle_id, duration);
  } catch (const convoy::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
