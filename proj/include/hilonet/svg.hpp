#pragma once
// Minimal SVG chart writer for learning curves and 2-D trajectory
// plots. Output is a single self-contained file per chart.

#include <string>
#include <vector>

namespace hilonet {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Line chart with axes, ticks and a legend.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

struct SvgPath {
  std::vector<std::pair<double, double>> points;
  std::string color;  // empty = auto palette
};

struct SvgMarker {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  std::string label;
};

// Square-aspect plot of 2-D paths, used for expert demonstrations and
// policy rollouts.
void write_trajectory_plot(const std::string& path, const std::string& title,
                           const std::vector<SvgPath>& paths,
                           const std::vector<SvgMarker>& markers);

}  // namespace hilonet
