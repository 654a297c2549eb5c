// Run metrics: 95th-percentile platooning error against the gap set-point
// and 95th-percentile instantaneous speed spread, both computed after a
// one-lap warm-up. Everything here works from log rows alone so metrics can
// be recomputed from a CSV file.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "convoy/logio.hpp"
#include "convoy/track.hpp"
#include "convoy/transport.hpp"

namespace convoy {

/// Nearest-rank 95th percentile: the sorted sample at index ceil(0.95 * n),
/// 1-based. Throws on empty input.
inline double percentile_95(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("percentile of empty sample set");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  const std::size_t rank = (95 * n + 99) / 100;  // integer ceil(0.95 n)
  return samples[rank - 1];
}

struct LogMetrics {
  double platooning_error_p95_cm = 0.0;
  double speed_spread_p95 = 0.0;  // m/s
  int laps_completed = 0;
};

struct RunMetrics {
  LogMetrics log;
  MessageStats messages;
};

/// Reconstructs the leader's unwrapped arc progress from its logged
/// positions. Returns (cumulative arc per leader row, warm-up cutoff time);
/// the cutoff is the time of the first row at or past one full lap.
inline std::pair<std::vector<double>, double> leader_progress(const std::vector<LogRow>& rows,
                                                              const OvalTrack& track) {
  std::vector<double> cum;
  double cum_arc = 0.0;
  double prev_s = 0.0;
  bool first = true;
  double warmup_end = -1.0;
  const double lap = track.lap_length();
  for (const auto& row : rows) {
    if (row.car != 0) continue;
    const double s = track.project(LocalPoint{row.qx, row.qy});
    if (!first) {
      double delta = s - prev_s;
      if (delta < -lap / 2.0) delta += lap;
      if (delta > lap / 2.0) delta -= lap;
      cum_arc += delta;
    }
    first = false;
    prev_s = s;
    cum.push_back(cum_arc);
    if (warmup_end < 0.0 && cum_arc >= lap) warmup_end = row.t;
  }
  if (cum.empty()) throw std::runtime_error("log has no leader rows");
  return {cum, warmup_end};
}

inline LogMetrics compute_log_metrics(const std::vector<LogRow>& rows, double follow_distance,
                                      const OvalTrack& track = OvalTrack{}) {
  if (rows.empty()) throw std::runtime_error("empty log yields empty metrics");
  const auto [cum, warmup_end] = leader_progress(rows, track);
  if (warmup_end < 0.0)
    throw std::runtime_error("log covers less than one lap; metrics would be empty");

  std::vector<double> gap_errors;
  for (const auto& row : rows) {
    if (row.car == 0 || row.t < warmup_end) continue;
    gap_errors.push_back(std::abs(row.gap_to_predecessor - follow_distance));
  }

  // rows are tick-major, so vehicles of one tick are consecutive
  std::vector<double> spreads;
  std::size_t i = 0;
  while (i < rows.size()) {
    const double t = rows[i].t;
    double lo = rows[i].speed, hi = rows[i].speed;
    std::size_t j = i;
    while (j < rows.size() && rows[j].t == t) {
      lo = std::min(lo, rows[j].speed);
      hi = std::max(hi, rows[j].speed);
      ++j;
    }
    if (t >= warmup_end) spreads.push_back(hi - lo);
    i = j;
  }

  LogMetrics m;
  m.laps_completed = static_cast<int>(std::floor(cum.back() / track.lap_length()));
  m.platooning_error_p95_cm = gap_errors.empty() ? 0.0 : percentile_95(gap_errors) * 100.0;
  m.speed_spread_p95 = spreads.empty() ? 0.0 : percentile_95(spreads);
  return m;
}

}  // namespace convoy
