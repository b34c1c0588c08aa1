#pragma once

#include <string>
#include <utility>
#include <vector>

namespace subdyadic::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePanel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Values on a rectangular (x, y) lattice; NaN cells are left blank.
struct Heatmap {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::string value_label;
  std::vector<double> x;
  std::vector<double> y;
  /// values[j * x.size() + i] at (x[i], y[j]).
  std::vector<double> values;
  /// Polyline drawn on top (e.g. a critical line).
  Series overlay;
};

/// Standalone SVG documents. Output depends only on the inputs (fixed
/// number formatting), so repeated runs are byte-identical.
std::string render(const std::vector<LinePanel>& panels);
std::string render(const Heatmap& map);
/// Heatmaps stacked vertically.
std::string render(const std::vector<Heatmap>& maps);

}  // namespace subdyadic::plot
