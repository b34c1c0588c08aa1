#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subdyadic/grid.hpp"

namespace subdyadic {

/// The set of cell offsets o (minimum-image, in cells) with |o| h <= radius,
/// stored as one half-width per row offset. A cell belongs to the window iff
/// its center lies in the closed periodic ball; this predicate is the single
/// definition of "ball" for every region sum in the library.
class Window {
 public:
  Window(const GridSpec& spec, double radius);

  static bool contains(const GridSpec& spec, double radius, int o0, int o1 = 0);

  double radius() const { return radius_; }
  /// Row offsets present, in (-N/2, N/2]; for d = 1 the single row 0.
  std::span<const int> row_offsets() const { return rows_; }
  /// Half width of the row at row_offsets()[i]; -1 never occurs. A value of
  /// N/2 or more means the full periodic row.
  std::span<const int> half_widths() const { return widths_; }
  /// Number of cells in the window.
  std::size_t count() const { return count_; }
  bool full_row(std::size_t i) const { return 2 * widths_[i] + 1 >= n_; }

 private:
  double radius_;
  int n_;
  std::vector<int> rows_;
  std::vector<int> widths_;
  std::size_t count_ = 0;
};

/// out[x] = sum of values over cells x + o, o in the window.
std::vector<double> window_sum(const GridSpec& spec, std::span<const double> values, const Window& win);
/// out[x] = max of values over cells x + o, o in the window.
std::vector<double> window_max(const GridSpec& spec, std::span<const double> values, const Window& win);

}  // namespace subdyadic
