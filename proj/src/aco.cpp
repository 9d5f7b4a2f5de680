#include "uavsense/aco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "uavsense/errors.hpp"

namespace uavsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kCandidateListSize = 16;

}  // namespace

DistanceMatrix::DistanceMatrix(int size)
    : size_(size), values_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}

double tour_length(const DistanceMatrix& dist, const std::vector<int>& order) {
  double total = 0.0;
  for (std::size_t n = 1; n < order.size(); ++n) total += dist(order[n - 1], order[n]);
  return total;
}

std::optional<std::vector<int>> nearest_neighbor_path(const DistanceMatrix& dist, int first, int last) {
  const int w = dist.size();
  if (w < 2 || first == last || first < 0 || last < 0 || first >= w || last >= w) return std::nullopt;
  std::vector<bool> used(static_cast<std::size_t>(w), false);
  std::vector<int> order{first};
  used[first] = true;
  used[last] = true;
  int current = first;
  for (int step = 0; step < w - 2; ++step) {
    int best = -1;
    for (int j = 0; j < w; ++j) {
      if (used[j]) continue;
      if (best < 0 || dist(current, j) < dist(current, best)) best = j;
    }
    if (best < 0) break;
    if (dist(current, best) == kInf) return std::nullopt;
    used[best] = true;
    order.push_back(best);
    current = best;
  }
  if (dist(current, last) == kInf) return std::nullopt;
  order.push_back(last);
  return order;
}

void improve_path_locally(const DistanceMatrix& dist, std::vector<int>& order) {
  const std::size_t m = order.size();
  if (m < 4) return;
  const double eps = 1e-12 * std::max(1.0, tour_length(dist, order));
  bool improved = true;
  while (improved) {
    improved = false;
    // Reverse order[i..j].
    for (std::size_t i = 1; i + 2 < m; ++i) {
      for (std::size_t j = i + 1; j + 1 < m; ++j) {
        const double delta = dist(order[i - 1], order[j]) + dist(order[i], order[j + 1]) -
                             dist(order[i - 1], order[i]) - dist(order[j], order[j + 1]);
        if (delta < -eps) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
    // Move order[i] between order[k] and order[k + 1].
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const int node = order[i];
      const double removed = dist(order[i - 1], node) + dist(node, order[i + 1]) - dist(order[i - 1], order[i + 1]);
      for (std::size_t k = 0; k + 1 < m; ++k) {
        if (k == i || k + 1 == i) continue;
        const double added = dist(order[k], node) + dist(node, order[k + 1]) - dist(order[k], order[k + 1]);
        if (added - removed < -eps) {
          order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
          const std::size_t at = k < i ? k + 1 : k;
          order.insert(order.begin() + static_cast<std::ptrdiff_t>(at), node);
          improved = true;
          break;
        }
      }
    }
  }
}

std::optional<std::vector<int>> aco_path_tsp(const DistanceMatrix& dist, int first, int last,
                                             const AcoParams& params) {
  validate(params);
  const int w = dist.size();
  if (w < 2 || first == last || first < 0 || last < 0 || first >= w || last >= w) {
    throw ValidationError("aco", "need at least two nodes and distinct endpoints");
  }
  // Symmetric distances: one connected component or bust.
  for (int j = 0; j < w; ++j) {
    if (dist(first, j) == kInf) return std::nullopt;
  }
  auto greedy = nearest_neighbor_path(dist, first, last);
  if (!greedy) return std::nullopt;
  if (w <= 3) return greedy;

  std::vector<int> best = *greedy;
  improve_path_locally(dist, best);
  double best_len = tour_length(dist, best);

  const auto n = static_cast<std::size_t>(w);
  const auto at = [n](int a, int b) { return static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b); };

  // Heuristic visibility eta^beta; coincident nodes get a large finite value.
  const double min_positive = [&] {
    double m = kInf;
    for (int a = 0; a < w; ++a) {
      for (int b = 0; b < w; ++b) {
        if (a != b && dist(a, b) > 0.0) m = std::min(m, dist(a, b));
      }
    }
    return m == kInf ? 1.0 : m;
  }();
  std::vector<double> visibility(n * n, 0.0);
  for (int a = 0; a < w; ++a) {
    for (int b = 0; b < w; ++b) {
      if (a == b) continue;
      const double d = std::max(dist(a, b), 1e-3 * min_positive);
      visibility[at(a, b)] = std::pow(1.0 / d, params.heuristic_influence);
    }
  }

  // Interior nodes only; `last` is appended once the interior is exhausted.
  std::vector<std::vector<int>> candidates(n);
  for (int a = 0; a < w; ++a) {
    std::vector<int> others;
    for (int b = 0; b < w; ++b) {
      if (b != a && b != first && b != last) others.push_back(b);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&](int x, int y) { return dist(a, x) < dist(a, y); });
    if (others.size() > kCandidateListSize) others.resize(kCandidateListSize);
    candidates[static_cast<std::size_t>(a)] = std::move(others);
  }

  const double tau0 = 1.0 / (static_cast<double>(w) * std::max(best_len, 1e-9));
  std::vector<double> pheromone(n * n, tau0);

  std::mt19937_64 rng(params.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int interior = w - 2;
  std::vector<std::vector<int>> tours(static_cast<std::size_t>(params.ants));
  std::vector<double> lengths(static_cast<std::size_t>(params.ants));
  std::vector<char> visited(n);
  std::vector<int> pool;
  std::vector<double> weights;

  const auto attractiveness = [&](int a, int b) {
    const double tau = pheromone[at(a, b)];
    const double t = params.pheromone_influence == 1.0 ? tau : std::pow(tau, params.pheromone_influence);
    return t * visibility[at(a, b)];
  };

  const auto choose = [&](int current, const std::vector<int>& options) {
    weights.resize(options.size());
    double total = 0.0;
    for (std::size_t k = 0; k < options.size(); ++k) {
      weights[k] = attractiveness(current, options[k]);
      total += weights[k];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
      return *std::min_element(options.begin(), options.end(),
                               [&](int x, int y) { return dist(current, x) < dist(current, y); });
    }
    double r = unit(rng) * total;
    for (std::size_t k = 0; k < options.size(); ++k) {
      r -= weights[k];
      if (r <= 0.0) return options[k];
    }
    return options.back();
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    for (int ant = 0; ant < params.ants; ++ant) {
      auto& tour = tours[static_cast<std::size_t>(ant)];
      tour.clear();
      tour.push_back(first);
      std::fill(visited.begin(), visited.end(), 0);
      visited[first] = 1;
      visited[last] = 1;
      int current = first;
      for (int step = 0; step < interior; ++step) {
        pool.clear();
        for (int c : candidates[static_cast<std::size_t>(current)]) {
          if (!visited[c]) pool.push_back(c);
        }
        if (pool.empty()) {
          for (int c = 0; c < w; ++c) {
            if (!visited[c]) pool.push_back(c);
          }
        }
        const int next = choose(current, pool);
        visited[next] = 1;
        tour.push_back(next);
        current = next;
      }
      tour.push_back(last);
      lengths[static_cast<std::size_t>(ant)] = tour_length(dist, tour);
    }

    const auto leader = static_cast<std::size_t>(std::min_element(lengths.begin(), lengths.end()) - lengths.begin());
    improve_path_locally(dist, tours[leader]);
    lengths[leader] = tour_length(dist, tours[leader]);
    for (int ant = 0; ant < params.ants; ++ant) {
      if (lengths[static_cast<std::size_t>(ant)] < best_len) {
        best_len = lengths[static_cast<std::size_t>(ant)];
        best = tours[static_cast<std::size_t>(ant)];
      }
    }

    for (double& t : pheromone) t *= 1.0 - params.evaporation;
    const auto deposit = [&](const std::vector<int>& tour, double amount) {
      for (std::size_t k = 1; k < tour.size(); ++k) {
        pheromone[at(tour[k - 1], tour[k])] += amount;
        pheromone[at(tour[k], tour[k - 1])] += amount;
      }
    };
    for (int ant = 0; ant < params.ants; ++ant) {
      deposit(tours[static_cast<std::size_t>(ant)], 1.0 / std::max(lengths[static_cast<std::size_t>(ant)], 1e-9));
    }
    // Elitist reinforcement of the incumbent.
    deposit(best, 1.0 / std::max(best_len, 1e-9));
  }
  return best;
}

}  // namespace uavsense
