#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavsense/plan_graph.hpp"
#include "uavsense/solver_params.hpp"
#include "uavsense/trajectory.hpp"

namespace uavsense {

enum class SolverTag { kBenchmark, kSol1, kSol2, kSol3 };

std::string to_string(SolverTag tag);
/// Accepts "benchmark", "sol1", "sol2", "sol3"; throws ValidationError otherwise.
SolverTag parse_solver_tag(const std::string& name);

struct SolverReport {
  SolverTag tag = SolverTag::kBenchmark;
  Trajectory trajectory;
  std::optional<double> dual_bound;  // g(lambda*), Lagrangian planner only
  std::optional<double> lambda;      // final dual variable, Lagrangian planner only
  int paths_examined = 0;            // K-shortest paths pulled during primal recovery
  int extra_waypoints = 0;           // detour / tour waypoints actually added
  double wallclock_s = 0.0;
};

/// Distance-shortest SNR-feasible trajectory. Throws InfeasibleError when
/// its length exceeds the budget or the endpoints are disconnected.
SolverReport benchmark_shortest(const PlanGraph& g, double distance_budget_m);

/// Constrained minimum-f^P trajectory via Lagrangian relaxation: LARAC-style
/// dual search on lambda, then K-shortest-path primal recovery under the
/// aggregated weight f^P + lambda* f^D. The result is always feasible and
/// `dual_bound` <= its f^P. Throws InfeasibleError for infeasible instances.
SolverReport solve_lagrangian(const PlanGraph& g, double distance_budget_m,
                              const LagrangianParams& params);

/// Feasible cells that are not on `initial`, sorted by probability
/// (descending, ties by ascending (i, j)).
std::vector<GridIndex> unvisited_by_probability(const PlanGraph& g, const Trajectory& initial);

/// Single-detour improvement: for each of the top `candidates` unvisited
/// cells, leave `initial` at its nearest waypoint, fly to the cell and then
/// to the finish along distance-shortest legs. Returns the best of these and
/// `initial` by total probability within the budget.
SolverReport improve_single_detour(const PlanGraph& g, const Trajectory& initial, int candidates,
                                   double distance_budget_m);

/// Multi-waypoint improvement: a shortest fixed-endpoint tour (ACO on the
/// metric closure) through all waypoints of `initial` plus the top r
/// unvisited cells, for r = `candidates` down to 0 until the tour fits the
/// budget. Falls back to `initial` verbatim.
SolverReport improve_multi_waypoint(const PlanGraph& g, const Trajectory& initial, int candidates,
                                    double distance_budget_m, const AcoParams& aco);

/// Removes closed loops from a waypoint sequence whenever every cell inside
/// the loop is also visited outside it, so the distinct-cell set is kept.
std::vector<GridIndex> shortcut_loops(std::vector<GridIndex> waypoints);

}  // namespace uavsense
