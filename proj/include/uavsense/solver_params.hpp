#pragma once

#include <cstdint>

namespace uavsense {

/// Dual search and primal recovery settings for the Lagrangian planner.
struct LagrangianParams {
  double lambda_tolerance = 1e-6;
  int max_bisection_iters = 64;
  int k_paths = 100;
  friend bool operator==(const LagrangianParams&, const LagrangianParams&) = default;
};

/// Ant colony settings for the fixed-endpoint path TSP.
struct AcoParams {
  int ants = 32;
  int iterations = 200;
  double pheromone_influence = 1.0;  // alpha
  double heuristic_influence = 3.0;  // beta
  double evaporation = 0.5;          // in (0, 1)
  std::uint64_t rng_seed = 1;
  friend bool operator==(const AcoParams&, const AcoParams&) = default;
};

/// Throws ValidationError (field prefix `solver.`) when out of range.
void validate(const LagrangianParams& p);
void validate(const AcoParams& p);

}  // namespace uavsense
