#include "uavsense/trajectory.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>

namespace uavsense {

double step_distance(const GridIndex& a, const GridIndex& b, const GridSpec& grid) {
  const int di = std::abs(a.i - b.i);
  const int dj = std::abs(a.j - b.j);
  const double d = grid.granularity_m();
  if (di <= 1 && dj <= 1) {
    if (di + dj == 2) return d * std::numbers::sqrt2;
    return d * (di + dj);
  }
  return d * std::hypot(static_cast<double>(di), static_cast<double>(dj));
}

double path_distance(std::span<const GridIndex> waypoints, const GridSpec& grid) {
  double total = 0.0;
  for (std::size_t n = 1; n < waypoints.size(); ++n) {
    total += step_distance(waypoints[n - 1], waypoints[n], grid);
  }
  return total;
}

double path_inverse_prob(std::span<const GridIndex> waypoints, const TargetMap& target) {
  double total = 0.0;
  for (const auto& w : waypoints) total += target.inverse_weight(w);
  return total;
}

double total_probability(std::span<const GridIndex> waypoints, const TargetMap& target) {
  std::set<GridIndex> seen;
  double total = 0.0;
  for (const auto& w : waypoints) {
    if (seen.insert(w).second) total += target.at(w);
  }
  return total;
}

Trajectory make_trajectory(std::vector<GridIndex> waypoints, const GridSpec& grid,
                           const TargetMap& target) {
  Trajectory t;
  t.f_d = path_distance(waypoints, grid);
  t.f_p = path_inverse_prob(waypoints, target);
  t.total_prob = total_probability(waypoints, target);
  t.waypoints = std::move(waypoints);
  return t;
}

}  // namespace uavsense
