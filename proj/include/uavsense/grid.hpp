#pragma once

#include <compare>
#include <cstddef>

namespace uavsense {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

double distance(const Point2& a, const Point2& b);
double distance(const Point3& a, const Point3& b);

/// Zero-based grid cell index; `i` runs along x, `j` along y. Files and
/// user-facing output use one-based indices, converted at the I/O boundary.
struct GridIndex {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Square L x L region split into D x D cells of side `granularity_m`.
class GridSpec {
 public:
  GridSpec() = default;

  /// Throws ValidationError unless side/granularity is an integer >= 2
  /// (relative tolerance 1e-9). Non-integer ratios are rejected, not rounded.
  static GridSpec make(double side_length_m, double granularity_m);

  double side_length_m() const noexcept { return side_length_m_; }
  double granularity_m() const noexcept { return granularity_m_; }
  int dimension() const noexcept { return dimension_; }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(dimension_);
  }

  bool contains(const GridIndex& idx) const noexcept {
    return idx.i >= 0 && idx.j >= 0 && idx.i < dimension_ && idx.j < dimension_;
  }
  bool contains(const Point2& p) const noexcept {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= side_length_m_ && p.y <= side_length_m_;
  }

  /// Row-major linear index, i-major: linear(i, j) = i * D + j.
  std::size_t linear(const GridIndex& idx) const noexcept {
    return static_cast<std::size_t>(idx.i) * static_cast<std::size_t>(dimension_) +
           static_cast<std::size_t>(idx.j);
  }
  GridIndex unlinear(std::size_t k) const noexcept {
    return {static_cast<int>(k / static_cast<std::size_t>(dimension_)),
            static_cast<int>(k % static_cast<std::size_t>(dimension_))};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  double side_length_m_ = 0.0;
  double granularity_m_ = 0.0;
  int dimension_ = 0;
};

/// Center of cell `idx`: ((i + 1/2) * delta, (j + 1/2) * delta) for zero-based
/// indices. Throws std::out_of_range for an index outside the grid.
Point2 grid_center(const GridIndex& idx, const GridSpec& grid);

/// Cell whose center is nearest to `p`; ties go to the lower index. Points
/// outside the region clamp to the border cells.
GridIndex snap_to_grid(const Point2& p, const GridSpec& grid);

}  // namespace uavsense
