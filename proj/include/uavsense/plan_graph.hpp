#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uavsense/grid.hpp"
#include "uavsense/radio.hpp"
#include "uavsense/target_map.hpp"
#include "uavsense/trajectory.hpp"

namespace uavsense {

/// Vertex ids are the i-major linear cell indices; only SNR-feasible cells
/// are vertices. Ascending id order equals lexicographic (i, j) order, which
/// is the tie-break order used by every search.
using VertexId = int;

/// Undirected 8-neighbour graph over the SNR-feasible cells. Each edge
/// carries a distance weight (delta or sqrt(2) delta) and, per direction of
/// travel, a probability weight equal to the floored inverse probability of
/// the cell being entered.
class PlanGraph {
 public:
  /// Throws InfeasibleError when start or finish is not feasible.
  PlanGraph(const GridSpec& grid, std::vector<bool> feasible, TargetMap target, GridIndex start,
            GridIndex finish);

  const GridSpec& grid() const noexcept { return grid_; }
  const TargetMap& target() const noexcept { return target_; }
  int cell_count() const noexcept { return static_cast<int>(feasible_.size()); }
  int vertex_count() const noexcept { return vertex_count_; }

  bool is_vertex(VertexId v) const { return v >= 0 && v < cell_count() && feasible_[v]; }
  bool is_vertex(const GridIndex& idx) const {
    return grid_.contains(idx) && feasible_[grid_.linear(idx)];
  }
  VertexId id(const GridIndex& idx) const { return static_cast<VertexId>(grid_.linear(idx)); }
  GridIndex index(VertexId v) const { return grid_.unlinear(static_cast<std::size_t>(v)); }

  GridIndex start() const noexcept { return start_; }
  GridIndex finish() const noexcept { return finish_; }
  VertexId start_id() const { return id(start_); }
  VertexId finish_id() const { return id(finish_); }

  /// Neighbours in ascending id order (degree <= 8).
  const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency_[v]; }
  std::size_t edge_count() const;

  double distance_weight(VertexId u, VertexId v) const {
    return step_distance(index(u), index(v), grid_);
  }
  double prob_weight(VertexId entered) const { return target_.inverse_weight(index(entered)); }

  Trajectory make_trajectory(const std::vector<VertexId>& vertices) const;
  Trajectory make_trajectory(std::vector<GridIndex> waypoints) const {
    return uavsense::make_trajectory(std::move(waypoints), grid_, target_);
  }

 private:
  GridSpec grid_;
  std::vector<bool> feasible_;
  TargetMap target_;
  GridIndex start_;
  GridIndex finish_;
  int vertex_count_ = 0;
  std::vector<std::vector<VertexId>> adjacency_;
};

/// Builds the graph from the SNR map: (i, j) is a vertex iff [S]_{i,j} >= threshold.
PlanGraph build_graph(const SnrMap& snr, TargetMap target, double snr_threshold_db,
                      const GridSpec& grid, GridIndex start, GridIndex finish);

/// Edge weight used by a search: prob_coef * W^P(entered) + dist_coef * W^D.
struct EdgeCost {
  double prob_coef = 0.0;
  double dist_coef = 1.0;

  static constexpr EdgeCost distance() { return {0.0, 1.0}; }
  static constexpr EdgeCost inverse_prob() { return {1.0, 0.0}; }
  static constexpr EdgeCost aggregated(double lambda) { return {1.0, lambda}; }

  double operator()(const PlanGraph& g, VertexId u, VertexId v) const {
    double w = 0.0;
    if (prob_coef != 0.0) w += prob_coef * g.prob_weight(v);
    if (dist_coef != 0.0) w += dist_coef * g.distance_weight(u, v);
    return w;
  }
};

enum class EdgeWeight { kDistance, kInverseProb };

/// Vertex path and its cost under the search's EdgeCost (edges only; the
/// constant start term of f^P is not included).
struct SearchPath {
  std::vector<VertexId> vertices;
  double cost = 0.0;
  friend bool operator==(const SearchPath&, const SearchPath&) = default;
};

/// Sequential left-to-right sum of the edge costs along `vertices`.
double path_cost(const PlanGraph& g, const std::vector<VertexId>& vertices, const EdgeCost& cost);

/// Vertices and directed edges hidden from a search.
struct SearchExclusions {
  std::vector<bool> removed_vertices;                 // empty = none
  std::vector<std::pair<VertexId, VertexId>> removed_edges;  // directed u -> v
};

/// Single-pair Dijkstra. Returns nullopt when dst is unreachable. Ties are
/// resolved by (distance, vertex id) pop order and first-found predecessor.
std::optional<SearchPath> shortest_path(const PlanGraph& g, VertexId src, VertexId dst,
                                        const EdgeCost& cost,
                                        const SearchExclusions* exclusions = nullptr);

/// Full single-source tree.
struct ShortestPathTree {
  VertexId source = -1;
  std::vector<double> dist;  // +inf when unreachable or not a vertex
  std::vector<VertexId> pred;

  bool reachable(VertexId v) const;
  std::vector<VertexId> path_to(VertexId v) const;  // empty when unreachable
};

ShortestPathTree shortest_path_tree(const PlanGraph& g, VertexId src, const EdgeCost& cost);

/// Minimum-weight trajectory between two vertices under one of the two
/// native weights, or nullopt when disconnected.
std::optional<Trajectory> dijkstra(const PlanGraph& g, const GridIndex& src, const GridIndex& dst,
                                   EdgeWeight weight);

/// Yen's loopless K-shortest paths, produced lazily in non-decreasing cost
/// order. Candidates with equal cost are ordered by their vertex sequence.
class YenEnumerator {
 public:
  YenEnumerator(const PlanGraph& g, VertexId src, VertexId dst, EdgeCost cost);

  /// Next path, or nullopt once every loopless path has been produced.
  std::optional<SearchPath> next();
  std::size_t produced() const noexcept { return accepted_.size(); }

 private:
  void expand_last();

  const PlanGraph& graph_;
  VertexId src_;
  VertexId dst_;
  EdgeCost cost_;
  bool started_ = false;
  std::vector<SearchPath> accepted_;

  struct CandidateOrder {
    bool operator()(const SearchPath& a, const SearchPath& b) const {
      if (a.cost != b.cost) return a.cost < b.cost;
      return a.vertices < b.vertices;
    }
  };
  std::set<SearchPath, CandidateOrder> candidates_;
  std::set<std::vector<VertexId>> seen_;  // every path ever queued
};

std::vector<Trajectory> yen_k_shortest(const PlanGraph& g, const GridIndex& src,
                                       const GridIndex& dst, const EdgeCost& cost, int k);

struct FeasibilityReport {
  bool feasible = false;
  double min_distance_m = 0.0;  // +inf when finish is unreachable
  std::optional<Trajectory> shortest;
};

/// Feasible iff the distance-shortest start-finish path has length <= budget.
FeasibilityReport check_feasibility(const PlanGraph& g, double distance_budget_m);

/// First violated constraint of a trajectory against the graph and budget,
/// or nullopt. Checks endpoints, SNR membership, 8-neighbour steps, budget,
/// and that the cached functionals match a recomputation.
std::optional<std::string> find_violation(const Trajectory& t, const PlanGraph& g,
                                          double distance_budget_m);

}  // namespace uavsense
