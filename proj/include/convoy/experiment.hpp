// Experiment runner: single runs and drop-rate sweeps, with CSV logs,
// metrics tables and plan-view figures.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "convoy/config.hpp"
#include "convoy/logio.hpp"
#include "convoy/metrics.hpp"
#include "convoy/sim.hpp"
#include "convoy/svg.hpp"

namespace convoy {

struct ExperimentResult {
  RunMetrics metrics;
  std::string log_path;
  std::string plot_path;
};

inline std::string format_rate(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate);
  return buf;
}

/// Runs the configured scenario, writes `run<suffix>.csv` and
/// `trajectories<suffix>.svg` into `out_dir` and returns the metrics (gap
/// error excludes a one-lap warm-up).
inline ExperimentResult run_experiment(const SimConfig& cfg, const std::string& out_dir,
                                       const std::string& suffix = "") {
  validate_config(cfg);
  std::filesystem::create_directories(out_dir);
  const SimResult sim = run_sim(cfg);

  ExperimentResult result;
  result.log_path = (std::filesystem::path(out_dir) / ("run" + suffix + ".csv")).string();
  write_log_csv(result.log_path, sim.log);
  result.plot_path =
      (std::filesystem::path(out_dir) / ("trajectories" + suffix + ".svg")).string();
  write_plot_svg(result.plot_path, sim.log, "drop rate " + format_rate(cfg.drop_rate));
  result.metrics.log = compute_log_metrics(sim.log, cfg.follow_distance);
  result.metrics.messages = sim.messages;
  return result;
}

/// Column order follows the reported table: drop rate, platooning error
/// (cm), speed difference (m/s).
inline constexpr const char* kMetricsHeader =
    "drop_rate,platooning_error_p95_cm,speed_spread_p95_mps";

inline std::string metrics_to_csv(const std::vector<std::pair<double, RunMetrics>>& table) {
  std::string out(kMetricsHeader);
  out.push_back('\n');
  char line[96];
  for (const auto& [rate, metrics] : table) {
    std::snprintf(line, sizeof line, "%.2f,%.2f,%.3f\n", rate,
                  metrics.log.platooning_error_p95_cm, metrics.log.speed_spread_p95);
    out += line;
  }
  return out;
}

/// One run per drop rate (same seed), one metrics row per rate. Per-rate
/// logs land in run_<rate>.csv / trajectories_<rate>.svg plus metrics.csv.
inline std::vector<std::pair<double, RunMetrics>> run_sweep(const SimConfig& base,
                                                            const std::vector<double>& drop_rates,
                                                            const std::string& out_dir) {
  std::vector<std::pair<double, RunMetrics>> table;
  for (const double rate : drop_rates) {
    SimConfig cfg = base;
    cfg.drop_rate = rate;
    const auto result = run_experiment(cfg, out_dir, "_" + format_rate(rate));
    table.emplace_back(rate, result.metrics);
  }
  std::ofstream out(std::filesystem::path(out_dir) / "metrics.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics.csv in " + out_dir);
  out << metrics_to_csv(table);
  return table;
}

}  // namespace convoy
