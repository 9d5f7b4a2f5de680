#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "uavsense/radio.hpp"
#include "uavsense/target_map.hpp"

namespace uavsense::testing {

namespace {

std::vector<GridIndex> oracle_neighbors(const PlanGraph& g, const GridIndex& c) {
  std::vector<GridIndex> out;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      if (di == 0 && dj == 0) continue;
      const GridIndex n{c.i + di, c.j + dj};
      if (g.is_vertex(n)) out.push_back(n);
    }
  }
  return out;
}

double oracle_step(const GridIndex& a, const GridIndex& b, double delta) {
  const bool diagonal = a.i != b.i && a.j != b.j;
  return diagonal ? std::sqrt(2.0) * delta : delta;
}

}  // namespace

RandomInstance random_instance(int dimension, std::mt19937_64& rng, double granularity_m) {
  const GridSpec grid = GridSpec::make(dimension * granularity_m, granularity_m);
  const auto n = grid.cell_count();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> cell(0, n - 1);
  for (;;) {
    std::vector<double> probs(n);
    double sum = 0.0;
    for (auto& p : probs) {
      p = unit(rng) < 0.1 ? 0.0 : -std::log(1.0 - unit(rng));
      sum += p;
    }
    if (sum <= 0.0) continue;
    for (auto& p : probs) p /= sum;

    const double threshold_db = 3.0 + 5.0 * unit(rng);
    std::vector<double> snr(n);
    for (auto& s : snr) s = db_to_linear(20.0 * unit(rng));
    const std::size_t s_cell = cell(rng);
    std::size_t f_cell = cell(rng);
    if (f_cell == s_cell) continue;
    snr[s_cell] = std::max(snr[s_cell], db_to_linear(threshold_db + 1.0));
    snr[f_cell] = std::max(snr[f_cell], db_to_linear(threshold_db + 1.0));

    PlanGraph g = build_graph(SnrMap(dimension, snr), TargetMap(dimension, probs), threshold_db, grid,
                              grid.unlinear(s_cell), grid.unlinear(f_cell));
    const auto f = check_feasibility(g, std::numeric_limits<double>::infinity());
    if (!f.shortest) continue;
    return RandomInstance{std::move(g), f.min_distance_m};
  }
}

void for_each_simple_path(const PlanGraph& g, double budget_m,
                          const std::function<void(const std::vector<GridIndex>&)>& visit) {
  const double delta = g.grid().granularity_m();
  std::set<GridIndex> on_path{g.start()};
  std::vector<GridIndex> path{g.start()};
  const std::function<void(double)> dfs = [&](double dist) {
    const GridIndex here = path.back();
    if (here == g.finish()) {
      visit(path);
      return;
    }
    for (const auto& n : oracle_neighbors(g, here)) {
      if (on_path.count(n) != 0) continue;
      const double next = dist + oracle_step(here, n, delta);
      if (next > budget_m) continue;
      on_path.insert(n);
      path.push_back(n);
      dfs(next);
      path.pop_back();
      on_path.erase(n);
    }
  };
  dfs(0.0);
}

double oracle_distance(const std::vector<GridIndex>& w, double delta) {
  double d = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) d += oracle_step(w[k - 1], w[k], delta);
  return d;
}

double oracle_inverse_prob(const std::vector<GridIndex>& w, const PlanGraph& g) {
  const auto& t = g.target();
  double f = 0.0;
  for (const auto& c : w) f += 1.0 / std::max(t.at(c), t.floor_epsilon());
  return f;
}

double oracle_total_prob(const std::vector<GridIndex>& w, const PlanGraph& g) {
  const std::set<GridIndex> cells(w.begin(), w.end());
  double p = 0.0;
  for (const auto& c : cells) p += g.target().at(c);
  return p;
}

std::optional<PathOptimum> oracle_min_inverse_prob(const PlanGraph& g, double budget_m) {
  std::optional<PathOptimum> best;
  std::uint64_t count = 0;
  for_each_simple_path(g, budget_m, [&](const std::vector<GridIndex>& w) {
    ++count;
    const double v = oracle_inverse_prob(w, g);
    if (!best || v < best->value) best = PathOptimum{v, w, 0};
  });
  if (best) best->paths = count;
  return best;
}

std::optional<PathOptimum> oracle_max_prob(const PlanGraph& g, double budget_m) {
  std::optional<PathOptimum> best;
  std::uint64_t count = 0;
  for_each_simple_path(g, budget_m, [&](const std::vector<GridIndex>& w) {
    ++count;
    const double v = oracle_total_prob(w, g);
    if (!best || v > best->value) best = PathOptimum{v, w, 0};
  });
  if (best) best->paths = count;
  return best;
}

std::optional<PathOptimum> oracle_min_distance(const PlanGraph& g) {
  std::optional<PathOptimum> best;
  const double delta = g.grid().granularity_m();
  for_each_simple_path(g, std::numeric_limits<double>::infinity(), [&](const std::vector<GridIndex>& w) {
    const double v = oracle_distance(w, delta);
    if (!best || v < best->value) best = PathOptimum{v, w, 0};
  });
  return best;
}

std::string constraint_violation(const Trajectory& t, const PlanGraph& g, double budget_m) {
  const auto& w = t.waypoints;
  if (w.empty()) return "empty trajectory";
  if (w.front() != g.start()) return "does not start at the start cell";
  if (w.back() != g.finish()) return "does not end at the finish cell";
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!g.is_vertex(w[k])) return fmt::format("waypoint {} violates the SNR threshold", k);
    if (k > 0) {
      const int di = std::abs(w[k].i - w[k - 1].i);
      const int dj = std::abs(w[k].j - w[k - 1].j);
      if (std::max(di, dj) != 1) return fmt::format("segment {} is not an 8-neighbour step", k);
    }
  }
  const double d = oracle_distance(w, g.grid().granularity_m());
  if (d > budget_m) return fmt::format("distance {} exceeds budget {}", d, budget_m);
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  if (!close(t.f_d, d)) return "cached f_d differs from recomputation";
  if (!close(t.f_p, oracle_inverse_prob(w, g))) return "cached f_p differs from recomputation";
  if (!close(t.total_prob, oracle_total_prob(w, g))) return "cached total_prob differs from recomputation";
  return {};
}

std::vector<GridIndex> random_walk_path(const PlanGraph& g, std::mt19937_64& rng, int max_steps) {
  std::vector<GridIndex> w{g.start()};
  std::uniform_int_distribution<int> steps(0, max_steps);
  const int n = steps(rng);
  for (int k = 0; k < n; ++k) {
    const auto nb = oracle_neighbors(g, w.back());
    if (nb.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
    w.push_back(nb[pick(rng)]);
  }
  const auto tail = shortest_path(g, g.id(w.back()), g.finish_id(), EdgeCost::distance());
  for (std::size_t k = 1; k < tail->vertices.size(); ++k) w.push_back(g.index(tail->vertices[k]));
  return w;
}

double quadrature_cell_mass(const std::vector<GmmComponent>& mixture, double x0, double x1, double y0,
                            double y1) {
  using boost::math::quadrature::gauss_kronrod;
  const auto pdf = [&](double x, double y) {
    double v = 0.0;
    for (const auto& c : mixture) {
      const double s2 = c.sigma_m * c.sigma_m;
      const double r2 = (x - c.mean.x) * (x - c.mean.x) + (y - c.mean.y) * (y - c.mean.y);
      v += c.weight / (2.0 * std::numbers::pi * s2) * std::exp(-r2 / (2.0 * s2));
    }
    return v;
  };
  const auto inner = [&](double x) {
    return gauss_kronrod<double, 61>::integrate([&](double y) { return pdf(x, y); }, y0, y1, 15, 1e-14);
  };
  return gauss_kronrod<double, 61>::integrate(inner, x0, x1, 15, 1e-14);
}

ScenarioConfig open_scenario(int dimension, double granularity_m) {
  ScenarioConfig c;
  const double side = dimension * granularity_m;
  c.grid = GridSpec::make(side, granularity_m);
  c.gbs_list = {Gbs{{side / 2.0, side / 2.0, 10.0}, 25.0}};
  c.mixture = {GmmComponent{{side / 2.0, side / 2.0}, 2.0 * granularity_m, 1.0}};
  c.uav_altitude_m = 80.0;
  c.noise_power_dbm = -90.0;
  c.snr_threshold_db = 7.0;
  c.start = {0, 0};
  c.finish = {dimension - 1, dimension - 1};
  c.budget.distance_m = 1e6;
  return c;
}

}  // namespace uavsense::testing
