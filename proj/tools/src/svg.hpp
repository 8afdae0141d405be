#pragma once

#include <string>
#include <vector>

namespace pvdecay::cli {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool points = false;  // scatter instead of a polyline
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

/// Minimal standalone SVG line/scatter chart with axes and a legend.
/// Non-finite points (and non-positive ones on a log axis) are skipped.
std::string render_svg(const Plot& plot);

}  // namespace pvdecay::cli
