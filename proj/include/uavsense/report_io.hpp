#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "uavsense/solvers.hpp"
#include "uavsense/trajectory.hpp"

namespace uavsense {

struct ReportContext {
  double dbar_m = 0.0;
  std::optional<SolverTag> initial;
  bool include_timing = true;
};

/// Solver report document:
///   { "solver", "initial", "dbar_m", "trajectory": { "waypoints": [[i, j], ...],
///     "f_d_m", "f_p", "total_prob" }, "dual_bound", "lambda", "paths_examined",
///     "extra_waypoints", "wallclock_s" }
/// Waypoints are one-based. Optional fields are omitted when absent.
std::string report_to_json(const SolverReport& report, const ReportContext& context);

/// Bare trajectory document (the "trajectory" object above).
std::string trajectory_to_json(const Trajectory& t);

/// Reads either a solver report or a bare trajectory document. Cached
/// metrics are taken from the file when present so that a validator can
/// compare them against a recomputation; absent ones are NaN. Throws ParseError.
Trajectory read_trajectory_document(std::istream& in);

}  // namespace uavsense
