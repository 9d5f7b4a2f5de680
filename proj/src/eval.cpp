#include "uavsense/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "uavsense/errors.hpp"
#include "uavsense/radio.hpp"
#include "uavsense/seed.hpp"

namespace uavsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ99 = 2.5758293035489004;

}  // namespace

PlanningInstance make_instance(const ScenarioConfig& config) {
  SnrMap snr = build_snr_map(config);
  CellMask blocked = obstacle_mask(config);
  TargetMap target = build_target_map(config, blocked);
  PlanGraph graph = build_graph(snr, target, config.snr_threshold_db, config.grid, config.start,
                                config.finish);
  return PlanningInstance{config, std::move(snr), std::move(blocked), std::move(target), std::move(graph)};
}

std::pair<double, double> wilson_interval_99(std::uint64_t hits, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = kZ99 * kZ99;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = kZ99 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // The bounds are exactly 0 and 1 at the extremes; avoid rounding past them.
  const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = hits == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

MonteCarloResult monte_carlo_validate(const Trajectory& t, const ScenarioConfig& config,
                                      const CellMask& blocked, const TargetMap& target,
                                      std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw ValidationError("samples", "must be >= 1");
  const GridSpec& grid = config.grid;
  std::vector<bool> visited(grid.cell_count(), false);
  for (const auto& w : t.waypoints) visited[grid.linear(w)] = true;

  TargetSampler sampler(config.mixture, grid, blocked, seed);
  MonteCarloResult r;
  r.samples = samples;
  for (std::uint64_t k = 0; k < samples; ++k) {
    if (visited[grid.linear(cell_of(sampler.next(), grid))]) ++r.hits;
  }
  r.rate = static_cast<double>(r.hits) / static_cast<double>(samples);
  std::tie(r.ci_low, r.ci_high) = wilson_interval_99(r.hits, samples);
  r.analytic = std::clamp(total_probability(t.waypoints, target), 0.0, 1.0);
  return r;
}

namespace {

// Depth-first enumeration of simple start-finish paths under the budget.
class SimplePathSearch {
 public:
  SimplePathSearch(const PlanGraph& g, double budget) : g_(g), budget_(budget) {
    to_finish_ = shortest_path_tree(g, g.finish_id(), EdgeCost::distance()).dist;
    on_path_.assign(static_cast<std::size_t>(g.cell_count()), false);
  }

  // `visit(path, distance)` is called for every complete path; `prune(path,
  // distance)` may cut a branch.
  template <typename Visit, typename Prune>
  void run(Visit&& visit, Prune&& prune) {
    path_.assign(1, g_.start_id());
    on_path_[g_.start_id()] = true;
    descend(0.0, visit, prune);
    on_path_[g_.start_id()] = false;
  }

 private:
  template <typename Visit, typename Prune>
  void descend(double dist, Visit& visit, Prune& prune) {
    const VertexId u = path_.back();
    if (u == g_.finish_id()) {
      visit(path_, dist);
      return;
    }
    for (VertexId v : g_.neighbors(u)) {
      if (on_path_[v]) continue;
      const double next = dist + g_.distance_weight(u, v);
      if (to_finish_[v] == kInf) continue;
      if (next + to_finish_[v] > budget_ * (1.0 + 1e-12) + 1e-9) continue;
      path_.push_back(v);
      on_path_[v] = true;
      if (!prune(path_, next)) descend(next, visit, prune);
      on_path_[v] = false;
      path_.pop_back();
    }
  }

  const PlanGraph& g_;
  double budget_;
  std::vector<double> to_finish_;
  std::vector<bool> on_path_;
  std::vector<VertexId> path_;
};

void guard(const PlanGraph& g, int limit, const char* what) {
  if (g.vertex_count() > limit) {
    throw ConfigurationError(fmt::format("{} refuses graphs with more than {} vertices (got {})", what,
                                         limit, g.vertex_count()));
  }
}

}  // namespace

std::optional<OracleResult> brute_force_csp(const PlanGraph& g, double distance_budget_m) {
  guard(g, 20, "brute_force_csp");
  std::optional<OracleResult> best;
  std::uint64_t count = 0;
  double best_fp = kInf;
  SimplePathSearch search(g, distance_budget_m);
  search.run(
      [&](const std::vector<VertexId>& path, double) {
        Trajectory t = g.make_trajectory(path);
        if (t.f_d > distance_budget_m) return;
        ++count;
        if (t.f_p < best_fp) {
          best_fp = t.f_p;
          best = OracleResult{t.f_p, std::move(t), 0};
        }
      },
      [&](const std::vector<VertexId>& path, double) {
        // Inverse weights are positive, so a prefix already at the incumbent cannot win.
        double fp = 0.0;
        for (VertexId v : path) fp += g.prob_weight(v);
        return fp > best_fp * (1.0 + 1e-12);
      });
  if (best) best->paths_enumerated = count;
  return best;
}

std::optional<OracleResult> brute_force_max_prob(const PlanGraph& g, double distance_budget_m) {
  guard(g, 16, "brute_force_max_prob");
  double all_mass = 0.0;
  for (VertexId v = 0; v < g.cell_count(); ++v) {
    if (g.is_vertex(v)) all_mass += g.target().at(g.index(v));
  }
  std::optional<OracleResult> best;
  std::uint64_t count = 0;
  double best_prob = -1.0;
  SimplePathSearch search(g, distance_budget_m);
  search.run(
      [&](const std::vector<VertexId>& path, double) {
        Trajectory t = g.make_trajectory(path);
        if (t.f_d > distance_budget_m) return;
        ++count;
        if (t.total_prob > best_prob) {
          best_prob = t.total_prob;
          best = OracleResult{t.total_prob, std::move(t), 0};
        }
      },
      [&](const std::vector<VertexId>&, double) {
        // Nothing can beat a path that already collects every vertex's mass.
        return best_prob >= all_mass * (1.0 - 1e-12);
      });
  if (best) best->paths_enumerated = count;
  return best;
}

SweepOptions sweep_options_from(const ScenarioConfig& c) {
  SweepOptions o;
  o.detour_candidates = c.solver.detour_candidates;
  o.tour_candidates = c.solver.tour_candidates;
  o.lagrangian = c.solver.lagrangian;
  o.aco = c.solver.aco;
  o.aco.rng_seed = derive_seed(c.solver.rng_seed, SeedStream::kAco);
  return o;
}

SolverReport run_solver(const PlanGraph& g, SolverTag solver, std::optional<SolverTag> initial,
                        double distance_budget_m, const SweepOptions& options) {
  const auto base = [&](SolverTag tag) {
    if (tag == SolverTag::kBenchmark) return benchmark_shortest(g, distance_budget_m);
    if (tag == SolverTag::kSol1) return solve_lagrangian(g, distance_budget_m, options.lagrangian);
    throw ValidationError("initial", "initial trajectory must come from sol1 or benchmark");
  };
  if (solver == SolverTag::kBenchmark || solver == SolverTag::kSol1) return base(solver);
  const SolverReport start = base(initial.value_or(SolverTag::kSol1));
  SolverReport r = solver == SolverTag::kSol2
                       ? improve_single_detour(g, start.trajectory, options.detour_candidates,
                                               distance_budget_m)
                       : improve_multi_waypoint(g, start.trajectory, options.tour_candidates,
                                                distance_budget_m, options.aco);
  r.wallclock_s += start.wallclock_s;
  return r;
}

SweepResult sweep(const PlanningInstance& instance, const std::vector<double>& dbar_list,
                  const SweepOptions& options) {
  SweepResult result;
  const PlanGraph& g = instance.graph;
  for (double dbar : dbar_list) {
    const bool feasible = check_feasibility(g, dbar).feasible;
    for (SolverTag solver : options.solvers) {
      std::vector<std::optional<SolverTag>> initials;
      if (solver == SolverTag::kSol2 || solver == SolverTag::kSol3) {
        for (SolverTag i : options.initials) initials.emplace_back(i);
      } else {
        initials.emplace_back(std::nullopt);
      }
      for (const auto& initial : initials) {
        SweepRow row;
        row.dbar_m = dbar;
        row.solver = solver;
        row.initial = initial;
        row.feasible = feasible;
        if (feasible) {
          SolverReport r = run_solver(g, solver, initial, dbar, options);
          row.total_prob = r.trajectory.total_prob;
          row.f_d_m = r.trajectory.f_d;
          row.wallclock_s = r.wallclock_s;
          row.trajectory = std::move(r.trajectory);
        }
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result, bool include_timing) {
  std::string out = "dbar_m,solver,initial,total_prob,f_d_m,wallclock_s\n";
  for (const auto& row : result.rows) {
    const std::string initial = row.initial ? to_string(*row.initial) : "";
    const std::string prob = row.feasible ? fmt::format("{:.17g}", row.total_prob) : "nan";
    const std::string fd = row.feasible ? fmt::format("{:.17g}", row.f_d_m) : "nan";
    const std::string wall = include_timing && row.feasible ? fmt::format("{:.6f}", row.wallclock_s) : "";
    out += fmt::format("{:.17g},{},{},{},{},{}\n", row.dbar_m, to_string(row.solver), initial, prob, fd, wall);
  }
  return out;
}

}  // namespace uavsense
