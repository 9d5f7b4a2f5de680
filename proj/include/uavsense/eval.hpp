#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavsense/plan_graph.hpp"
#include "uavsense/scenario.hpp"
#include "uavsense/solvers.hpp"
#include "uavsense/target_map.hpp"
#include "uavsense/trajectory.hpp"

namespace uavsense {

/// Maps plus graph for one scenario. Map construction is done once here and
/// is not part of any solver's wallclock.
struct PlanningInstance {
  ScenarioConfig config;
  SnrMap snr;
  CellMask blocked;
  TargetMap target;
  PlanGraph graph;
};

/// Builds S, the obstacle mask, the truncated P and the graph. Throws
/// InfeasibleError when an endpoint violates the SNR threshold.
PlanningInstance make_instance(const ScenarioConfig& config);

struct MonteCarloResult {
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 99% Wilson score interval
  double ci_high = 0.0;
  double analytic = 0.0;

  bool analytic_inside() const { return analytic >= ci_low && analytic <= ci_high; }
};

/// 99% Wilson score interval for `hits` successes out of `n`.
std::pair<double, double> wilson_interval_99(std::uint64_t hits, std::uint64_t n);

/// Draws `samples` targets from the truncated mixture and counts how often
/// the target's cell is one of the trajectory's distinct cells. Throws
/// ValidationError when samples == 0.
MonteCarloResult monte_carlo_validate(const Trajectory& t, const ScenarioConfig& config,
                                      const CellMask& blocked, const TargetMap& target,
                                      std::uint64_t samples, std::uint64_t seed);

struct OracleResult {
  double optimum_value = 0.0;
  Trajectory optimum_path;
  std::uint64_t paths_enumerated = 0;
};

/// Exhaustive minimum f^P over simple start-finish paths with f^D <= budget.
/// Refuses graphs with more than 20 vertices (ConfigurationError). Returns
/// nullopt when no path fits the budget.
std::optional<OracleResult> brute_force_csp(const PlanGraph& g, double distance_budget_m);

/// Exhaustive maximum total probability over simple start-finish paths with
/// f^D <= budget. Refuses graphs with more than 16 vertices.
std::optional<OracleResult> brute_force_max_prob(const PlanGraph& g, double distance_budget_m);

struct SweepOptions {
  std::vector<SolverTag> solvers{SolverTag::kBenchmark, SolverTag::kSol1, SolverTag::kSol2,
                                 SolverTag::kSol3};
  std::vector<SolverTag> initials{SolverTag::kSol1, SolverTag::kBenchmark};
  int detour_candidates = 10;
  int tour_candidates = 30;
  LagrangianParams lagrangian;
  AcoParams aco;
};

/// Sweep options populated from the scenario's solver section, with the ACO
/// seed derived from the scenario seed.
SweepOptions sweep_options_from(const ScenarioConfig& config);

struct SweepRow {
  double dbar_m = 0.0;
  SolverTag solver = SolverTag::kBenchmark;
  std::optional<SolverTag> initial;  // sol2 / sol3 only
  bool feasible = false;
  double total_prob = 0.0;
  double f_d_m = 0.0;
  double wallclock_s = 0.0;
  std::optional<Trajectory> trajectory;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Runs every requested solver at every budget. Improvement solvers run once
/// per initial trajectory and their wallclock includes computing it.
SweepResult sweep(const PlanningInstance& instance, const std::vector<double>& dbar_list,
                  const SweepOptions& options);

/// CSV with columns dbar_m,solver,initial,total_prob,f_d_m,wallclock_s.
/// Infeasible rows carry `nan` metrics; wallclock is left empty when
/// `include_timing` is false.
std::string sweep_to_csv(const SweepResult& result, bool include_timing);

/// Runs one solver (computing the initial trajectory first when needed).
SolverReport run_solver(const PlanGraph& g, SolverTag solver, std::optional<SolverTag> initial,
                        double distance_budget_m, const SweepOptions& options);

}  // namespace uavsense
