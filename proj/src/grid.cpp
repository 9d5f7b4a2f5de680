#include "uavsense/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uavsense/errors.hpp"

namespace uavsense {

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance(const Point3& a, const Point3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

GridSpec GridSpec::make(double side_length_m, double granularity_m) {
  if (!(side_length_m > 0.0) || !std::isfinite(side_length_m)) {
    throw ValidationError("grid.side_length_m", "must be positive and finite");
  }
  if (!(granularity_m > 0.0) || !std::isfinite(granularity_m)) {
    throw ValidationError("grid.granularity_m", "must be positive and finite");
  }
  const double ratio = side_length_m / granularity_m;
  const double rounded = std::round(ratio);
  if (std::abs(rounded * granularity_m - side_length_m) > 1e-9 * side_length_m) {
    throw ValidationError("grid.granularity_m",
                          "side length must be an integer multiple of the granularity");
  }
  if (rounded < 2.0) {
    throw ValidationError("grid.granularity_m", "grid needs at least 2 cells per side");
  }
  GridSpec g;
  g.side_length_m_ = side_length_m;
  g.granularity_m_ = granularity_m;
  g.dimension_ = static_cast<int>(rounded);
  return g;
}

Point2 grid_center(const GridIndex& idx, const GridSpec& grid) {
  if (!grid.contains(idx)) {
    throw std::out_of_range("grid index (" + std::to_string(idx.i + 1) + "," +
                            std::to_string(idx.j + 1) + ") outside 1.." +
                            std::to_string(grid.dimension()));
  }
  const double d = grid.granularity_m();
  return {(idx.i + 0.5) * d, (idx.j + 0.5) * d};
}

namespace {

int snap_axis(double v, const GridSpec& grid) {
  const double t = v / grid.granularity_m() - 0.5;
  const int k = static_cast<int>(std::ceil(t - 0.5));
  return std::clamp(k, 0, grid.dimension() - 1);
}

}  // namespace

GridIndex snap_to_grid(const Point2& p, const GridSpec& grid) {
  return {snap_axis(p.x, grid), snap_axis(p.y, grid)};
}

}  // namespace uavsense
