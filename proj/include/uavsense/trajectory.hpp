#pragma once

#include <span>
#include <vector>

#include "uavsense/grid.hpp"
#include "uavsense/target_map.hpp"

namespace uavsense {

/// Ordered waypoint sequence with its cached path functionals.
struct Trajectory {
  std::vector<GridIndex> waypoints;
  double f_d = 0.0;         // total flying distance, meters
  double f_p = 0.0;         // sum of inverse sensing probabilities
  double total_prob = 0.0;  // sensing probability over distinct cells

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Length of one step: delta or sqrt(2) * delta for 8-neighbours, otherwise
/// the Euclidean center distance.
double step_distance(const GridIndex& a, const GridIndex& b, const GridSpec& grid);

double path_distance(std::span<const GridIndex> waypoints, const GridSpec& grid);

/// 1/P at the first waypoint plus 1/P at every later waypoint (floored
/// inverse weights, revisits counted each time).
double path_inverse_prob(std::span<const GridIndex> waypoints, const TargetMap& target);

/// Sum of P over the distinct cells visited.
double total_probability(std::span<const GridIndex> waypoints, const TargetMap& target);

Trajectory make_trajectory(std::vector<GridIndex> waypoints, const GridSpec& grid,
                           const TargetMap& target);

}  // namespace uavsense
