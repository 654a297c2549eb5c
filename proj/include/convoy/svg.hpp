// Plan-view trajectory figure: one polyline per vehicle in the local frame,
// axis-equal scaling, legend, optional title label. Output is plain SVG
// text with fixed-point coordinates so figures are byte-stable.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "convoy/logio.hpp"

namespace convoy {

inline std::string render_plot_svg(const std::vector<LogRow>& rows, const std::string& label = "") {
  if (rows.empty()) throw std::invalid_argument("cannot plot an empty log");

  std::map<int, std::vector<std::pair<double, double>>> tracks;
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (const auto& row : rows) {
    tracks[row.car].emplace_back(row.qx, row.qy);
    min_x = std::min(min_x, row.qx);
    max_x = std::max(max_x, row.qx);
    min_y = std::min(min_y, row.qy);
    max_y = std::max(max_y, row.qy);
  }

  constexpr double kCanvas = 640.0;
  constexpr double kMargin = 48.0;
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  const double scale = (kCanvas - 2.0 * kMargin) / span;  // same scale on both axes
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  auto px = [&](double x) { return kCanvas / 2.0 + (x - cx) * scale; };
  auto py = [&](double y) { return kCanvas / 2.0 - (y - cy) * scale; };  // +qy is up

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const int n_colors = static_cast<int>(sizeof(kColors) / sizeof(kColors[0]));

  std::string svg;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                kCanvas, kCanvas, kCanvas, kCanvas);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\" stroke=\"#333\"/>\n";
  if (!label.empty())
    svg += "<text x=\"16\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\">" + label +
           "</text>\n";

  for (const auto& [car, pts] : tracks) {
    const char* color = kColors[car % n_colors];
    if (pts.size() == 1) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"3\" fill=\"%s\"/>\n",
                    px(pts[0].first), py(pts[0].second), color);
      svg += buf;
      continue;
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f ", px(x), py(y));
      svg += buf;
    }
    svg += "\"/>\n";
  }

  double legend_y = 52.0;
  for (const auto& [car, pts] : tracks) {
    const char* color = kColors[car % n_colors];
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"16\" y1=\"%.0f\" x2=\"44\" y2=\"%.0f\" stroke=\"%s\" "
                  "stroke-width=\"3\"/>\n",
                  legend_y, legend_y, color);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"50\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"14\">vehicle "
                  "%d</text>\n",
                  legend_y + 5.0, car);
    svg += buf;
    legend_y += 20.0;
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_plot_svg(const std::string& path, const std::vector<LogRow>& rows,
                           const std::string& label = "") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open svg file for writing: " + path);
  out << render_plot_svg(rows, label);
}

}  // namespace convoy
