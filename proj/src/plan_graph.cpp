#include "uavsense/plan_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "uavsense/errors.hpp"

namespace uavsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string one_based(const GridIndex& idx) { return fmt::format("({},{})", idx.i + 1, idx.j + 1); }

}  // namespace

PlanGraph::PlanGraph(const GridSpec& grid, std::vector<bool> feasible, TargetMap target,
                     GridIndex start, GridIndex finish)
    : grid_(grid), feasible_(std::move(feasible)), target_(std::move(target)), start_(start), finish_(finish) {
  if (feasible_.size() != grid_.cell_count() || target_.dimension() != grid_.dimension()) {
    throw ValidationError("plan_graph", "map dimensions do not match the grid");
  }
  for (const auto& [name, idx] : {std::pair{"start", start_}, std::pair{"finish", finish_}}) {
    if (!grid_.contains(idx)) throw ValidationError(std::string("uav.") + name, "index outside 1..D");
    if (!feasible_[grid_.linear(idx)]) {
      throw InfeasibleError(fmt::format("{} vertex {} violates the expected SNR threshold", name,
                                        one_based(idx)));
    }
  }
  const int d = grid_.dimension();
  adjacency_.resize(feasible_.size());
  for (std::size_t k = 0; k < feasible_.size(); ++k) {
    if (!feasible_[k]) continue;
    ++vertex_count_;
    const GridIndex u = grid_.unlinear(k);
    // di-major then dj ascending yields ascending neighbour ids.
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const GridIndex v{u.i + di, u.j + dj};
        if (v.i < 0 || v.j < 0 || v.i >= d || v.j >= d) continue;
        if (feasible_[grid_.linear(v)]) adjacency_[k].push_back(id(v));
      }
    }
  }
}

std::size_t PlanGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency_) twice += adj.size();
  return twice / 2;
}

Trajectory PlanGraph::make_trajectory(const std::vector<VertexId>& vertices) const {
  std::vector<GridIndex> waypoints;
  waypoints.reserve(vertices.size());
  for (VertexId v : vertices) waypoints.push_back(index(v));
  return make_trajectory(std::move(waypoints));
}

PlanGraph build_graph(const SnrMap& snr, TargetMap target, double snr_threshold_db,
                      const GridSpec& grid, GridIndex start, GridIndex finish) {
  if (snr.dimension() != grid.dimension() || target.dimension() != grid.dimension()) {
    throw ValidationError("plan_graph", "SNR and target maps must share the grid dimension");
  }
  const double threshold = db_to_linear(snr_threshold_db);
  std::vector<bool> feasible(grid.cell_count());
  for (std::size_t k = 0; k < feasible.size(); ++k) feasible[k] = snr.values()[k] >= threshold;
  return PlanGraph(grid, std::move(feasible), std::move(target), start, finish);
}

double path_cost(const PlanGraph& g, const std::vector<VertexId>& vertices, const EdgeCost& cost) {
  double total = 0.0;
  for (std::size_t n = 1; n < vertices.size(); ++n) total += cost(g, vertices[n - 1], vertices[n]);
  return total;
}

namespace {

using QueueEntry = std::pair<double, VertexId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

bool edge_removed(const SearchExclusions* ex, VertexId u, VertexId v) {
  if (ex == nullptr) return false;
  for (const auto& [a, b] : ex->removed_edges) {
    if (a == u && b == v) return true;
  }
  return false;
}

bool vertex_removed(const SearchExclusions* ex, VertexId v) {
  return ex != nullptr && !ex->removed_vertices.empty() && ex->removed_vertices[v];
}

// Runs Dijkstra from src; stops early once `stop_at` is settled (if >= 0).
void run_dijkstra(const PlanGraph& g, VertexId src, const EdgeCost& cost,
                  const SearchExclusions* ex, VertexId stop_at, std::vector<double>& dist,
                  std::vector<VertexId>& pred) {
  dist.assign(static_cast<std::size_t>(g.cell_count()), kInf);
  pred.assign(static_cast<std::size_t>(g.cell_count()), -1);
  std::vector<bool> done(static_cast<std::size_t>(g.cell_count()), false);
  MinQueue queue;
  dist[src] = 0.0;
  queue.emplace(0.0, src);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == stop_at) return;
    for (VertexId v : g.neighbors(u)) {
      if (done[v] || vertex_removed(ex, v) || edge_removed(ex, u, v)) continue;
      const double alt = du + cost(g, u, v);
      if (alt < dist[v]) {
        dist[v] = alt;
        pred[v] = u;
        queue.emplace(alt, v);
      }
    }
  }
}

std::vector<VertexId> unwind(const std::vector<VertexId>& pred, VertexId src, VertexId dst) {
  std::vector<VertexId> path;
  for (VertexId v = dst; v != -1; v = pred[v]) {
    path.push_back(v);
    if (v == src) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::optional<SearchPath> shortest_path(const PlanGraph& g, VertexId src, VertexId dst,
                                        const EdgeCost& cost, const SearchExclusions* exclusions) {
  if (!g.is_vertex(src) || !g.is_vertex(dst)) return std::nullopt;
  if (vertex_removed(exclusions, src) || vertex_removed(exclusions, dst)) return std::nullopt;
  std::vector<double> dist;
  std::vector<VertexId> pred;
  run_dijkstra(g, src, cost, exclusions, dst, dist, pred);
  if (dist[dst] == kInf) return std::nullopt;
  SearchPath p;
  p.vertices = unwind(pred, src, dst);
  p.cost = dist[dst];
  return p;
}

bool ShortestPathTree::reachable(VertexId v) const {
  return v >= 0 && static_cast<std::size_t>(v) < dist.size() && dist[v] != kInf;
}

std::vector<VertexId> ShortestPathTree::path_to(VertexId v) const {
  if (!reachable(v)) return {};
  return unwind(pred, source, v);
}

ShortestPathTree shortest_path_tree(const PlanGraph& g, VertexId src, const EdgeCost& cost) {
  ShortestPathTree t;
  t.source = src;
  if (!g.is_vertex(src)) {
    t.dist.assign(static_cast<std::size_t>(g.cell_count()), kInf);
    t.pred.assign(static_cast<std::size_t>(g.cell_count()), -1);
    return t;
  }
  run_dijkstra(g, src, cost, nullptr, -1, t.dist, t.pred);
  return t;
}

std::optional<Trajectory> dijkstra(const PlanGraph& g, const GridIndex& src, const GridIndex& dst,
                                   EdgeWeight weight) {
  if (!g.is_vertex(src) || !g.is_vertex(dst)) return std::nullopt;
  const EdgeCost cost = weight == EdgeWeight::kDistance ? EdgeCost::distance() : EdgeCost::inverse_prob();
  auto p = shortest_path(g, g.id(src), g.id(dst), cost);
  if (!p) return std::nullopt;
  return g.make_trajectory(p->vertices);
}

YenEnumerator::YenEnumerator(const PlanGraph& g, VertexId src, VertexId dst, EdgeCost cost)
    : graph_(g), src_(src), dst_(dst), cost_(cost) {}

void YenEnumerator::expand_last() {
  const std::vector<VertexId>& last = accepted_.back().vertices;
  SearchExclusions ex;
  ex.removed_vertices.assign(static_cast<std::size_t>(graph_.cell_count()), false);
  for (std::size_t spur = 0; spur + 1 < last.size(); ++spur) {
    const VertexId spur_node = last[spur];
    ex.removed_edges.clear();
    for (const auto& p : accepted_) {
      const auto& pv = p.vertices;
      if (pv.size() > spur + 1 && std::equal(pv.begin(), pv.begin() + static_cast<long>(spur) + 1,
                                             last.begin())) {
        ex.removed_edges.emplace_back(pv[spur], pv[spur + 1]);
      }
    }
    auto spur_path = shortest_path(graph_, spur_node, dst_, cost_, &ex);
    // The root prefix stays excluded for the following spur positions.
    ex.removed_vertices[spur_node] = true;
    if (!spur_path) continue;
    std::vector<VertexId> full(last.begin(), last.begin() + static_cast<long>(spur));
    full.insert(full.end(), spur_path->vertices.begin(), spur_path->vertices.end());
    if (!seen_.insert(full).second) continue;
    const double c = path_cost(graph_, full, cost_);
    candidates_.insert(SearchPath{std::move(full), c});
  }
}

std::optional<SearchPath> YenEnumerator::next() {
  if (!started_) {
    started_ = true;
    auto first = shortest_path(graph_, src_, dst_, cost_);
    if (!first) return std::nullopt;
    first->cost = path_cost(graph_, first->vertices, cost_);
    seen_.insert(first->vertices);
    accepted_.push_back(*first);
    return first;
  }
  if (accepted_.empty()) return std::nullopt;
  expand_last();
  if (candidates_.empty()) return std::nullopt;
  auto node = candidates_.extract(candidates_.begin());
  accepted_.push_back(std::move(node.value()));
  return accepted_.back();
}

std::vector<Trajectory> yen_k_shortest(const PlanGraph& g, const GridIndex& src,
                                       const GridIndex& dst, const EdgeCost& cost, int k) {
  std::vector<Trajectory> out;
  if (k < 1 || !g.is_vertex(src) || !g.is_vertex(dst)) return out;
  YenEnumerator yen(g, g.id(src), g.id(dst), cost);
  while (static_cast<int>(out.size()) < k) {
    auto p = yen.next();
    if (!p) break;
    out.push_back(g.make_trajectory(p->vertices));
  }
  return out;
}

FeasibilityReport check_feasibility(const PlanGraph& g, double distance_budget_m) {
  FeasibilityReport r;
  r.shortest = dijkstra(g, g.start(), g.finish(), EdgeWeight::kDistance);
  r.min_distance_m = r.shortest ? r.shortest->f_d : kInf;
  r.feasible = r.shortest && r.shortest->f_d <= distance_budget_m;
  return r;
}

std::optional<std::string> find_violation(const Trajectory& t, const PlanGraph& g,
                                          double distance_budget_m) {
  const auto& w = t.waypoints;
  if (w.empty()) return "trajectory has no waypoints";
  if (w.front() != g.start()) {
    return fmt::format("first waypoint {} is not the start {}", one_based(w.front()), one_based(g.start()));
  }
  if (w.back() != g.finish()) {
    return fmt::format("last waypoint {} is not the finish {}", one_based(w.back()), one_based(g.finish()));
  }
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (!g.grid().contains(w[n])) {
      return fmt::format("waypoint {} {} lies outside the grid", n + 1, one_based(w[n]));
    }
    if (!g.is_vertex(w[n])) {
      return fmt::format("waypoint {} {} violates the expected SNR threshold", n + 1, one_based(w[n]));
    }
  }
  for (std::size_t n = 1; n < w.size(); ++n) {
    const int di = std::abs(w[n].i - w[n - 1].i);
    const int dj = std::abs(w[n].j - w[n - 1].j);
    if (di > 1 || dj > 1 || (di == 0 && dj == 0)) {
      return fmt::format("segment {} from {} to {} is not a step between adjacent grid points", n,
                         one_based(w[n - 1]), one_based(w[n]));
    }
  }
  const double fd = path_distance(w, g.grid());
  if (fd > distance_budget_m) {
    return fmt::format("flying distance {:.6f} m exceeds the budget {:.6f} m", fd, distance_budget_m);
  }
  const auto mismatch = [](double a, double b) { return std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)); };
  if (mismatch(t.f_d, fd)) return fmt::format("cached f_d {} does not match {}", t.f_d, fd);
  const double fp = path_inverse_prob(w, g.target());
  if (mismatch(t.f_p, fp)) return fmt::format("cached f_p {} does not match {}", t.f_p, fp);
  const double tp = total_probability(w, g.target());
  if (mismatch(t.total_prob, tp)) return fmt::format("cached total_prob {} does not match {}", t.total_prob, tp);
  return std::nullopt;
}

}  // namespace uavsense
