#include "uavsense/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "uavsense/aco.hpp"
#include "uavsense/errors.hpp"
#include "uavsense/seed.hpp"

namespace uavsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

[[noreturn]] void throw_infeasible(const FeasibilityReport& f, double budget) {
  if (!f.shortest) throw InfeasibleError("start and finish are not connected through SNR-feasible cells");
  throw InfeasibleError(fmt::format("shortest feasible distance {:.3f} m exceeds the budget {:.3f} m",
                                    f.min_distance_m, budget));
}

// Any start-to-finish walk through every closure node is at least as long as
// the closure's minimum spanning tree and as start -> w -> finish for each w.
double tour_lower_bound(const DistanceMatrix& dist) {
  const int n = dist.size();
  double bound = 0.0;
  for (int w = 0; w < n; ++w) bound = std::max(bound, dist(0, w) + dist(w, n - 1));
  std::vector<double> best(static_cast<std::size_t>(n), kInf);
  std::vector<bool> in_tree(static_cast<std::size_t>(n), false);
  best[0] = 0.0;
  double mst = 0.0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v] && (u < 0 || best[v] < best[u])) u = v;
    }
    in_tree[u] = true;
    mst += best[u];
    for (int v = 0; v < n; ++v) {
      if (!in_tree[v]) best[v] = std::min(best[v], std::min(dist(u, v), dist(v, u)));
    }
  }
  return std::max(bound, mst);
}

std::vector<GridIndex> concat_legs(std::vector<GridIndex> prefix, const std::vector<VertexId>& leg,
                                   const PlanGraph& g) {
  for (std::size_t k = 1; k < leg.size(); ++k) prefix.push_back(g.index(leg[k]));
  return prefix;
}

}  // namespace

std::string to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::kBenchmark: return "benchmark";
    case SolverTag::kSol1: return "sol1";
    case SolverTag::kSol2: return "sol2";
    case SolverTag::kSol3: return "sol3";
  }
  return "unknown";
}

SolverTag parse_solver_tag(const std::string& name) {
  if (name == "benchmark") return SolverTag::kBenchmark;
  if (name == "sol1") return SolverTag::kSol1;
  if (name == "sol2") return SolverTag::kSol2;
  if (name == "sol3") return SolverTag::kSol3;
  throw ValidationError("solver", "unknown solver '" + name + "'");
}

SolverReport benchmark_shortest(const PlanGraph& g, double distance_budget_m) {
  Stopwatch clock;
  auto f = check_feasibility(g, distance_budget_m);
  if (!f.feasible) throw_infeasible(f, distance_budget_m);
  SolverReport r;
  r.tag = SolverTag::kBenchmark;
  r.trajectory = std::move(*f.shortest);
  r.wallclock_s = clock.seconds();
  return r;
}

SolverReport solve_lagrangian(const PlanGraph& g, double distance_budget_m,
                              const LagrangianParams& params) {
  validate(params);
  Stopwatch clock;
  const VertexId s = g.start_id();
  const VertexId t = g.finish_id();

  SolverReport report;
  report.tag = SolverTag::kSol1;

  auto by_prob = shortest_path(g, s, t, EdgeCost::inverse_prob());
  if (!by_prob) throw_infeasible(check_feasibility(g, distance_budget_m), distance_budget_m);
  Trajectory over = g.make_trajectory(by_prob->vertices);
  if (over.f_d <= distance_budget_m) {
    // Budget inactive: the unconstrained minimiser is optimal and g(0) is its cost.
    report.dual_bound = over.f_p;
    report.lambda = 0.0;
    report.trajectory = std::move(over);
    report.wallclock_s = clock.seconds();
    return report;
  }

  auto feasibility = check_feasibility(g, distance_budget_m);
  if (!feasibility.feasible) throw_infeasible(feasibility, distance_budget_m);
  Trajectory under = std::move(*feasibility.shortest);
  Trajectory best = under;
  const auto consider = [&](const Trajectory& c) {
    if (c.f_d <= distance_budget_m && c.f_p < best.f_p) best = c;
  };

  // Bracket invariant: `over` violates the budget, `under` satisfies it.
  double lambda = 0.0;
  double dual = over.f_p;  // g(0)
  for (int iter = 0; iter < params.max_bisection_iters; ++iter) {
    lambda = (under.f_p - over.f_p) / (over.f_d - under.f_d);
    const double bracket_cost = over.f_p + lambda * over.f_d;
    auto p = shortest_path(g, s, t, EdgeCost::aggregated(lambda));
    Trajectory cand = g.make_trajectory(p->vertices);
    const double cand_cost = cand.f_p + lambda * cand.f_d;
    dual = std::max(dual, std::min(cand_cost, bracket_cost) - lambda * distance_budget_m);
    if (cand_cost >= bracket_cost - params.lambda_tolerance * std::max(1.0, std::abs(bracket_cost))) {
      break;
    }
    if (cand.f_d <= distance_budget_m) {
      consider(cand);
      under = std::move(cand);
    } else {
      over = std::move(cand);
    }
  }
  report.lambda = lambda;
  report.dual_bound = dual;

  // Primal recovery over loopless paths in aggregated-cost order. A feasible
  // path has f^P >= L - lambda * budget, so once that lower bound reaches the
  // incumbent no later path can improve on it.
  YenEnumerator yen(g, s, t, EdgeCost::aggregated(lambda));
  for (int k = 0; k < params.k_paths; ++k) {
    auto p = yen.next();
    if (!p) break;
    ++report.paths_examined;
    Trajectory cand = g.make_trajectory(p->vertices);
    consider(cand);
    const double floor_fp = cand.f_p + lambda * cand.f_d - lambda * distance_budget_m;
    if (floor_fp > best.f_p * (1.0 + 1e-12)) break;
  }

  report.trajectory = std::move(best);
  report.wallclock_s = clock.seconds();
  return report;
}

std::vector<GridIndex> unvisited_by_probability(const PlanGraph& g, const Trajectory& initial) {
  std::set<GridIndex> on_path(initial.waypoints.begin(), initial.waypoints.end());
  std::vector<GridIndex> out;
  for (VertexId v = 0; v < g.cell_count(); ++v) {
    if (!g.is_vertex(v)) continue;
    const GridIndex idx = g.index(v);
    if (!on_path.count(idx)) out.push_back(idx);
  }
  const TargetMap& p = g.target();
  std::stable_sort(out.begin(), out.end(),
                   [&](const GridIndex& a, const GridIndex& b) { return p.at(a) > p.at(b); });
  return out;
}

SolverReport improve_single_detour(const PlanGraph& g, const Trajectory& initial, int candidates,
                                   double distance_budget_m) {
  Stopwatch clock;
  SolverReport report;
  report.tag = SolverTag::kSol2;
  report.trajectory = initial;

  auto pool = unvisited_by_probability(g, initial);
  if (candidates < static_cast<int>(pool.size())) pool.resize(static_cast<std::size_t>(std::max(candidates, 0)));
  const auto& w = initial.waypoints;

  for (const GridIndex& target_cell : pool) {
    const Point2 c = grid_center(target_cell, g.grid());
    std::size_t nearest = 0;
    double nearest_d = kInf;
    for (std::size_t n = 0; n < w.size(); ++n) {
      const double d = distance(grid_center(w[n], g.grid()), c);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = n;
      }
    }
    const auto to_cell = shortest_path(g, g.id(w[nearest]), g.id(target_cell), EdgeCost::distance());
    const auto to_finish = shortest_path(g, g.id(target_cell), g.finish_id(), EdgeCost::distance());
    if (!to_cell || !to_finish) continue;  // f^D = inf
    std::vector<GridIndex> path(w.begin(), w.begin() + static_cast<long>(nearest) + 1);
    path = concat_legs(std::move(path), to_cell->vertices, g);
    path = concat_legs(std::move(path), to_finish->vertices, g);
    Trajectory cand = g.make_trajectory(std::move(path));
    if (cand.f_d <= distance_budget_m && cand.total_prob > report.trajectory.total_prob) {
      report.trajectory = std::move(cand);
      report.extra_waypoints = 1;
    }
  }
  report.wallclock_s = clock.seconds();
  return report;
}

std::vector<GridIndex> shortcut_loops(std::vector<GridIndex> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<GridIndex, int> total;
    for (const auto& c : w) ++total[c];
    for (std::size_t a = 0; a < w.size() && !changed; ++a) {
      if (total[w[a]] < 2) continue;
      // Longest loop first: the last later occurrence of the same cell.
      for (std::size_t b = w.size() - 1; b > a; --b) {
        if (w[b] != w[a]) continue;
        std::map<GridIndex, int> inside;
        for (std::size_t k = a + 1; k <= b; ++k) ++inside[w[k]];
        const bool keeps_cells = std::all_of(inside.begin(), inside.end(),
                                             [&](const auto& e) { return total[e.first] > e.second; });
        if (keeps_cells) {
          w.erase(w.begin() + static_cast<long>(a) + 1, w.begin() + static_cast<long>(b) + 1);
          changed = true;
          break;
        }
      }
    }
  }
  return w;
}

SolverReport improve_multi_waypoint(const PlanGraph& g, const Trajectory& initial, int candidates,
                                    double distance_budget_m, const AcoParams& aco) {
  validate(aco);
  Stopwatch clock;
  SolverReport report;
  report.tag = SolverTag::kSol3;
  report.trajectory = initial;
  if (initial.waypoints.empty()) {
    report.wallclock_s = clock.seconds();
    return report;
  }

  const GridIndex start = initial.waypoints.front();
  const GridIndex finish = initial.waypoints.back();

  // Closure nodes: start, distinct interior waypoints of the initial path,
  // the candidate pool, and finish (a separate copy when finish == start).
  std::vector<GridIndex> base;
  {
    std::set<GridIndex> seen{start, finish};
    for (const auto& c : initial.waypoints) {
      if (seen.insert(c).second) base.push_back(c);
    }
  }
  auto pool = unvisited_by_probability(g, initial);
  const int r_max = std::clamp(candidates, 0, static_cast<int>(pool.size()));
  pool.resize(static_cast<std::size_t>(r_max));

  std::vector<GridIndex> all_nodes{start};
  all_nodes.insert(all_nodes.end(), base.begin(), base.end());
  all_nodes.insert(all_nodes.end(), pool.begin(), pool.end());
  all_nodes.push_back(finish);
  std::vector<ShortestPathTree> trees;
  trees.reserve(all_nodes.size());
  for (const auto& node : all_nodes) trees.push_back(shortest_path_tree(g, g.id(node), EdgeCost::distance()));

  const std::size_t base_count = 1 + base.size();
  for (int r = r_max; r >= 0; --r) {
    // Active closure: [start, base..., pool[0..r), finish].
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < base_count + static_cast<std::size_t>(r); ++k) active.push_back(k);
    active.push_back(all_nodes.size() - 1);
    const int size = static_cast<int>(active.size());

    DistanceMatrix dist(size);
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) {
        dist(a, b) = a == b ? 0.0 : trees[active[a]].dist[g.id(all_nodes[active[b]])];
      }
    }

    if (tour_lower_bound(dist) > distance_budget_m * (1.0 + 1e-9)) continue;

    std::optional<std::vector<int>> order;
    if (size == 2) {
      order = dist(0, 1) < kInf ? std::optional<std::vector<int>>({0, 1}) : std::nullopt;
    } else {
      AcoParams seeded = aco;
      seeded.rng_seed = derive_seed(aco.rng_seed, SeedStream::kAco, static_cast<std::uint64_t>(r));
      order = aco_path_tsp(dist, 0, size - 1, seeded);
    }
    if (!order) continue;

    std::vector<GridIndex> path{start};
    for (std::size_t k = 1; k < order->size(); ++k) {
      const auto from = active[(*order)[k - 1]];
      const auto to = active[(*order)[k]];
      path = concat_legs(std::move(path), trees[from].path_to(g.id(all_nodes[to])), g);
    }
    Trajectory cand = g.make_trajectory(shortcut_loops(std::move(path)));
    if (cand.f_d <= distance_budget_m && cand.total_prob >= initial.total_prob) {
      report.trajectory = std::move(cand);
      report.extra_waypoints = r;
      break;
    }
  }
  report.wallclock_s = clock.seconds();
  return report;
}

}  // namespace uavsense
