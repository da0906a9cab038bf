#pragma once

// Small self-contained SVG emitters for the benchmark artifacts: log-log
// convergence curves with stderr bands and dashed bound overlays, and density
// heatmaps on the 2-D domain box. Pure string rendering, no I/O.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixest/common.hpp"

namespace mixest::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (iteration, value)
  std::vector<double> band;  // optional stderr per point; empty if none
  bool dashed = false;       // bound overlays render dashed
};

struct LinePlot {
  std::string title;
  std::string x_label = "iterations";
  std::string y_label = "metric";
  std::vector<Series> series;
  int width = 880;
  int height = 560;
};

// Renders a log-log plot. Nonpositive or non-finite points are dropped per
// series; series without positive points are skipped.
std::string render_log_log(const LinePlot& plot);

struct Heatmap {
  std::string title;
  // Row b holds y = ymin + (b + 1/2) dy, column a holds x = xmin + (a + 1/2) dx.
  Eigen::MatrixXd values;
  DomainBox box;
  int cell_px = 5;
};

// Renders nonnegative values with a viridis ramp. A quarter-power gamma keeps
// low-density structure visible next to sharp spikes.
std::string render_heatmap(const Heatmap& map);

}  // namespace mixest::svg
