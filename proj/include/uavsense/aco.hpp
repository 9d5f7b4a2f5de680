#pragma once

#include <optional>
#include <vector>

#include "uavsense/solver_params.hpp"

namespace uavsense {

/// Dense symmetric distance matrix; +inf marks an unreachable pair.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(int size = 0);
  int size() const noexcept { return size_; }
  double operator()(int a, int b) const { return values_[index(a, b)]; }
  double& operator()(int a, int b) { return values_[index(a, b)]; }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(b);
  }
  int size_ = 0;
  std::vector<double> values_;
};

double tour_length(const DistanceMatrix& dist, const std::vector<int>& order);

/// Greedy path: from `first` always move to the nearest unvisited node
/// (ties to the lower index), finishing at `last`.
std::optional<std::vector<int>> nearest_neighbor_path(const DistanceMatrix& dist, int first, int last);

/// In-place 2-opt and single-node relocation on a path whose first and last
/// nodes stay fixed, repeated until neither move shortens it.
void improve_path_locally(const DistanceMatrix& dist, std::vector<int>& order);

/// Fixed-endpoint path TSP by ant colony optimisation: a permutation that
/// starts at `first`, ends at `last` and visits every other node once,
/// minimising total distance. The greedy path seeds the pheromone level and
/// the incumbent, so the result is never longer than it; each iteration's
/// best tour is polished with `improve_path_locally` before reinforcement. Deterministic for a
/// given `params.rng_seed`. Returns nullopt when some node is unreachable.
std::optional<std::vector<int>> aco_path_tsp(const DistanceMatrix& dist, int first, int last,
                                             const AcoParams& params);

}  // namespace uavsense
