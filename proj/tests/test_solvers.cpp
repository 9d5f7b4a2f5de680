#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "uavsense/aco.hpp"
#include "uavsense/errors.hpp"
#include "uavsense/eval.hpp"
#include "uavsense/report_io.hpp"
#include "uavsense/seed.hpp"
#include "uavsense/solvers.hpp"

using namespace uavsense;

namespace {

constexpr double kDelta = 30.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

PlanGraph full_graph(int d, GridIndex start, GridIndex finish, std::vector<double> probs) {
  std::vector<bool> feasible(probs.size(), true);
  return PlanGraph(GridSpec::make(d * kDelta, kDelta), std::move(feasible), TargetMap(d, std::move(probs)), start,
                   finish);
}

std::vector<double> uniform_with(int d, double base, std::initializer_list<std::pair<GridIndex, double>> peaks) {
  std::vector<double> p(static_cast<std::size_t>(d * d), base);
  for (const auto& [idx, v] : peaks) p[static_cast<std::size_t>(idx.i * d + idx.j)] = v;
  return p;
}

double chebyshev_distance(const GridIndex& a, const GridIndex& b) {
  const int dx = std::abs(a.i - b.i);
  const int dy = std::abs(a.j - b.j);
  return std::min(dx, dy) * std::numbers::sqrt2 * kDelta + (std::max(dx, dy) - std::min(dx, dy)) * kDelta;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("benchmark follows the diagonal and then straight") {
  const auto g = full_graph(6, {0, 0}, {5, 2}, std::vector<double>(36, 1.0 / 36));
  const auto r = benchmark_shortest(g, 1000);
  CHECK(r.tag == SolverTag::kBenchmark);
  CHECK(r.trajectory.f_d == doctest::Approx(chebyshev_distance({0, 0}, {5, 2})));
  CHECK(testing::constraint_violation(r.trajectory, g, 1000).empty());
  CHECK(benchmark_shortest(g, 5000).trajectory == r.trajectory);
  try {
    benchmark_shortest(g, 100);
    FAIL("expected infeasibility");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("exceeds the budget") != std::string::npos);
  }
}

TEST_CASE("benchmark matches the exhaustive shortest path") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_instance(4, rng);
    const auto r = benchmark_shortest(inst.graph, inst.shortest_m);
    CHECK(r.trajectory.f_d == doctest::Approx(testing::oracle_min_distance(inst.graph)->value).epsilon(1e-12));
  }
}

TEST_CASE("lagrangian with an inactive budget returns the unconstrained optimum") {
  const auto g = full_graph(3, {0, 0}, {2, 2},
                            uniform_with(3, 0.14, {{{0, 0}, 0.05}, {{2, 2}, 0.05}, {{1, 1}, 0.01}}));
  const auto r = solve_lagrangian(g, 1000, LagrangianParams{});
  const auto best = dijkstra(g, {0, 0}, {2, 2}, EdgeWeight::kInverseProb);
  CHECK(r.trajectory.f_p == doctest::Approx(best->f_p));
  REQUIRE(r.dual_bound);
  CHECK(*r.dual_bound == doctest::Approx(best->f_p));
}

TEST_CASE("lagrangian trade-off on a 3x3 grid") {
  const auto g = full_graph(3, {0, 0}, {2, 2},
                            uniform_with(3, 0.14, {{{0, 0}, 0.05}, {{2, 2}, 0.05}, {{1, 1}, 0.01}}));
  LagrangianParams params;
  params.k_paths = 50;
  const double shortest = check_feasibility(g, kInf).min_distance_m;
  for (const double dbar : {shortest, 3 * kDelta, 3.5 * kDelta, 4 * kDelta, 5 * kDelta}) {
    const auto r = solve_lagrangian(g, dbar, params);
    const auto oracle = testing::oracle_min_inverse_prob(g, dbar);
    REQUIRE(oracle);
    CHECK(testing::constraint_violation(r.trajectory, g, dbar).empty());
    REQUIRE(r.dual_bound);
    CHECK(*r.dual_bound <= oracle->value + 1e-9);
    CHECK(oracle->value <= r.trajectory.f_p + 1e-9);
    CHECK(r.trajectory.f_p == doctest::Approx(oracle->value).epsilon(1e-12));
  }
}

TEST_CASE("lagrangian at the exact shortest distance returns the unique shortest path") {
  const auto g = full_graph(5, {0, 0}, {4, 4}, uniform_with(5, 0.02, {{{0, 4}, 0.2}, {{4, 0}, 0.2}}));
  const double dbar = check_feasibility(g, kInf).min_distance_m;
  CHECK(dbar == doctest::Approx(4 * std::numbers::sqrt2 * kDelta));
  const auto r = solve_lagrangian(g, dbar, LagrangianParams{});
  CHECK(r.trajectory == benchmark_shortest(g, dbar).trajectory);
  CHECK_THROWS_AS(solve_lagrangian(g, dbar - 1, LagrangianParams{}), InfeasibleError);
}

TEST_CASE("single detour") {
  const auto g = full_graph(5, {0, 0}, {4, 4}, uniform_with(5, 0.02, {{{1, 2}, 0.3}}));
  const Trajectory initial = benchmark_shortest(g, 1000).trajectory;
  CHECK(initial.total_prob == doctest::Approx(0.1));

  CHECK(improve_single_detour(g, initial, 0, 1000).trajectory == initial);
  CHECK(improve_single_detour(g, initial, 10, initial.f_d).trajectory == initial);

  const double dbar = initial.f_d + kDelta;
  const auto r = improve_single_detour(g, initial, 10, dbar);
  CHECK(testing::constraint_violation(r.trajectory, g, dbar).empty());
  const auto& w = r.trajectory.waypoints;
  CHECK(std::find(w.begin(), w.end(), GridIndex{1, 2}) != w.end());
  CHECK(r.trajectory.total_prob == doctest::Approx(0.4));
  CHECK(r.trajectory.total_prob == doctest::Approx(testing::oracle_total_prob(w, g)));
  CHECK(r.extra_waypoints == 1);
}

TEST_CASE("unvisited cells are ranked by probability then index") {
  const auto g = full_graph(3, {0, 0}, {2, 2}, uniform_with(3, 0.1, {{{2, 0}, 0.15}, {{0, 2}, 0.15}}));
  const auto initial = benchmark_shortest(g, 1000).trajectory;
  const auto ranked = unvisited_by_probability(g, initial);
  REQUIRE(ranked.size() == 6);
  CHECK(ranked[0] == GridIndex{0, 2});
  CHECK(ranked[1] == GridIndex{2, 0});
  CHECK(ranked[2] == GridIndex{0, 1});
  CHECK(ranked[5] == GridIndex{2, 1});
}

TEST_CASE("loop shortcutting keeps the visited cells") {
  const std::vector<GridIndex> loop{{0, 0}, {1, 0}, {1, 1}, {1, 0}, {2, 0}};
  CHECK(shortcut_loops(loop) == loop);
  const std::vector<GridIndex> redundant{{0, 0}, {1, 0}, {1, 1}, {1, 0}, {1, 1}, {2, 1}};
  CHECK(shortcut_loops(redundant) == std::vector<GridIndex>{{0, 0}, {1, 0}, {1, 1}, {2, 1}});
}

TEST_CASE("multi-waypoint tour never loses probability") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_instance(6, rng);
    const auto& g = inst.graph;
    const double dbar = inst.shortest_m * 1.6;
    const auto initial = solve_lagrangian(g, dbar, LagrangianParams{}).trajectory;
    AcoParams aco;
    aco.iterations = 40;
    for (const int r : {0, 3, 10}) {
      const auto report = improve_multi_waypoint(g, initial, r, dbar, aco);
      CHECK(testing::constraint_violation(report.trajectory, g, dbar).empty());
      CHECK(report.trajectory.total_prob >= initial.total_prob);
    }
  }
}

TEST_CASE("multi-waypoint tour covers the whole grid with a generous budget") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(25);
  double sum = 0.0;
  for (auto& v : p) sum += (v = u(rng));
  for (auto& v : p) v /= sum;
  const auto g = full_graph(5, {0, 0}, {4, 4}, p);
  const double sweep = 24 * kDelta;
  const auto initial = benchmark_shortest(g, 10 * sweep).trajectory;
  const auto r = improve_multi_waypoint(g, initial, 20, 10 * sweep, AcoParams{});
  CHECK(std::abs(r.trajectory.total_prob - 1.0) <= 1e-9);
  CHECK(testing::constraint_violation(r.trajectory, g, 10 * sweep).empty());
}

TEST_CASE("multi-waypoint tour on the 5x5 golden instance") {
  const auto g = full_graph(5, {0, 0}, {4, 4}, uniform_with(5, 0.02, {{{0, 4}, 0.27}, {{4, 0}, 0.27}}));
  const auto initial = benchmark_shortest(g, 1000).trajectory;
  AcoParams aco;
  aco.rng_seed = derive_seed(7, SeedStream::kAco);
  const double dbar = 600;
  const auto r = improve_multi_waypoint(g, initial, 2, dbar, aco);
  CHECK(testing::constraint_violation(r.trajectory, g, dbar).empty());
  CHECK(r.extra_waypoints == 2);

  const std::string golden = read_file(UAVSENSE_SOURCE_DIR "/tests/golden/sol3_5x5.json");
  REQUIRE_FALSE(golden.empty());
  CHECK(trajectory_to_json(r.trajectory) == golden);

  // Closure in the same node order the planner uses.
  const std::vector<GridIndex> nodes{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {0, 4}, {4, 0}, {4, 4}};
  DistanceMatrix dist(static_cast<int>(nodes.size()));
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      dist(static_cast<int>(a), static_cast<int>(b)) = chebyshev_distance(nodes[a], nodes[b]);
    }
  }
  const auto greedy = nearest_neighbor_path(dist, 0, static_cast<int>(nodes.size()) - 1);
  REQUIRE(greedy);
  CHECK(r.trajectory.f_d <= tour_length(dist, *greedy) + 1e-9);
}

TEST_CASE("aco on tiny instances") {
  DistanceMatrix two(2);
  two(0, 1) = two(1, 0) = 5;
  CHECK(*aco_path_tsp(two, 0, 1, AcoParams{}) == std::vector<int>{0, 1});

  const std::vector<double> xs{0, 7, 3, 11};
  DistanceMatrix line(4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) line(a, b) = std::abs(xs[a] - xs[b]);
  }
  CHECK(*aco_path_tsp(line, 0, 3, AcoParams{}) == std::vector<int>{0, 2, 1, 3});

  DistanceMatrix cut(3);
  cut(0, 1) = cut(1, 0) = 1;
  cut(0, 2) = cut(2, 0) = kInf;
  cut(1, 2) = cut(2, 1) = kInf;
  CHECK_FALSE(aco_path_tsp(cut, 0, 1, AcoParams{}));
  CHECK_THROWS_AS(aco_path_tsp(two, 0, 0, AcoParams{}), ValidationError);
}

TEST_CASE("local search keeps endpoints and never lengthens a path") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 3 + trial % 12;
    std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(w));
    for (auto& p : pts) p = {u(rng), u(rng)};
    DistanceMatrix dist(w);
    for (int a = 0; a < w; ++a) {
      for (int b = 0; b < w; ++b) dist(a, b) = std::hypot(pts[a].first - pts[b].first, pts[a].second - pts[b].second);
    }
    std::vector<int> order(static_cast<std::size_t>(w));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin() + 1, order.end() - 1, rng);
    const auto before = order;
    improve_path_locally(dist, order);
    CHECK(order.front() == before.front());
    CHECK(order.back() == before.back());
    CHECK(tour_length(dist, order) <= tour_length(dist, before) + 1e-9);
    auto a = order;
    auto b = before;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("aco stays within five percent of the exhaustive optimum") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<std::pair<double, double>> pts(7);
  for (auto& p : pts) p = {u(rng), u(rng)};
  DistanceMatrix dist(7);
  for (int a = 0; a < 7; ++a) {
    for (int b = 0; b < 7; ++b) {
      dist(a, b) = std::hypot(pts[a].first - pts[b].first, pts[a].second - pts[b].second);
    }
  }
  std::vector<int> interior{1, 2, 3, 4, 5};
  double optimum = kInf;
  do {
    std::vector<int> order{0};
    order.insert(order.end(), interior.begin(), interior.end());
    order.push_back(6);
    optimum = std::min(optimum, tour_length(dist, order));
  } while (std::next_permutation(interior.begin(), interior.end()));

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    AcoParams params;
    params.rng_seed = seed;
    const auto order = aco_path_tsp(dist, 0, 6, params);
    REQUIRE(order);
    CHECK(order->front() == 0);
    CHECK(order->back() == 6);
    std::vector<int> sorted = *order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    CHECK(tour_length(dist, *order) <= 1.05 * optimum);
    CHECK(aco_path_tsp(dist, 0, 6, params) == order);
  }
}

TEST_CASE("single detour is non-decreasing in the budget for a fixed initial") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_instance(7, rng);
    const auto& g = inst.graph;
    const auto initial = benchmark_shortest(g, inst.shortest_m).trajectory;
    double previous = 0.0;
    for (double factor = 1.0; factor <= 2.5; factor += 0.25) {
      const double dbar = inst.shortest_m * factor;
      const auto r = improve_single_detour(g, initial, 8, dbar);
      CHECK(testing::constraint_violation(r.trajectory, g, dbar).empty());
      CHECK(r.trajectory.total_prob >= previous);
      previous = r.trajectory.total_prob;
    }
  }
}

TEST_CASE("solver reports are reproducible") {
  std::mt19937_64 rng(53);
  auto inst = testing::random_instance(8, rng);
  const auto& g = inst.graph;
  const double dbar = inst.shortest_m * 1.8;
  SweepOptions options;
  options.aco.iterations = 50;
  for (const auto tag : {SolverTag::kBenchmark, SolverTag::kSol1, SolverTag::kSol2, SolverTag::kSol3}) {
    const std::optional<SolverTag> initial =
        (tag == SolverTag::kSol2 || tag == SolverTag::kSol3) ? std::optional(SolverTag::kSol1) : std::nullopt;
    auto a = run_solver(g, tag, initial, dbar, options);
    auto b = run_solver(g, tag, initial, dbar, options);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.dual_bound == b.dual_bound);
    CHECK(a.paths_examined == b.paths_examined);
    CHECK(a.extra_waypoints == b.extra_waypoints);
  }
}

TEST_CASE("solver tags") {
  for (const auto tag : {SolverTag::kBenchmark, SolverTag::kSol1, SolverTag::kSol2, SolverTag::kSol3}) {
    CHECK(parse_solver_tag(to_string(tag)) == tag);
  }
  CHECK_THROWS_AS(parse_solver_tag("sol4"), ValidationError);
}
