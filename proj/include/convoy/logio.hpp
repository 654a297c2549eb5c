// Run log rows and their CSV form. One row per vehicle per control tick;
// doubles are written as 6-decimal fixed point so logs are byte-stable
// across platforms.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace convoy {

struct LogRow {
  double t = 0.0;
  int car = 0;
  double qx = 0.0;
  double qy = 0.0;
  double heading_deg = 0.0;  // frame-local heading, [0, 360)
  double speed = 0.0;
  double v_star = 0.0;
  double steer = 0.0;
  double gap_to_predecessor = 0.0;  // meters; 0 for the leader
  int msgs_received_this_tick = 0;
};

inline constexpr const char* kLogHeader =
    "t,car,qx,qy,heading_deg,speed,v_star,steer,gap_to_predecessor,msgs_received_this_tick";

inline std::string log_to_csv(const std::vector<LogRow>& rows) {
  std::string out(kLogHeader);
  out.push_back('\n');
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.6f,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", r.t, r.car,
                  r.qx, r.qy, r.heading_deg, r.speed, r.v_star, r.steer, r.gap_to_predecessor,
                  r.msgs_received_this_tick);
    out += line;
  }
  return out;
}

inline void write_log_csv(const std::string& path, const std::vector<LogRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open log file for writing: " + path);
  out << log_to_csv(rows);
}

inline std::vector<LogRow> parse_log_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty log file");
  if (line == std::string(kLogHeader) + "\r") line.pop_back();
  if (line != kLogHeader)
    throw std::runtime_error(origin + ": unexpected log header '" + line + "'");
  std::vector<LogRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    LogRow r;
    const int matched =
        std::sscanf(line.c_str(), "%lf,%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%d", &r.t, &r.car, &r.qx,
                    &r.qy, &r.heading_deg, &r.speed, &r.v_star, &r.steer, &r.gap_to_predecessor,
                    &r.msgs_received_this_tick);
    if (matched != 10)
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": malformed log row");
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<LogRow> read_log_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log file: " + path);
  return parse_log_csv(in, path);
}

}  // namespace convoy
