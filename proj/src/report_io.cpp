#include "uavsense/report_io.hpp"

#include <istream>
#include <limits>

#include <nlohmann/json.hpp>

#include "uavsense/errors.hpp"

namespace uavsense {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json trajectory_json(const Trajectory& t) {
  ordered_json waypoints = ordered_json::array();
  for (const auto& w : t.waypoints) waypoints.push_back({w.i + 1, w.j + 1});
  ordered_json j;
  j["waypoints"] = waypoints;
  j["f_d_m"] = t.f_d;
  j["f_p"] = t.f_p;
  j["total_prob"] = t.total_prob;
  return j;
}

}  // namespace

std::string trajectory_to_json(const Trajectory& t) { return trajectory_json(t).dump(2) + "\n"; }

std::string report_to_json(const SolverReport& r, const ReportContext& ctx) {
  ordered_json j;
  j["solver"] = to_string(r.tag);
  if (ctx.initial) j["initial"] = to_string(*ctx.initial);
  j["dbar_m"] = ctx.dbar_m;
  j["trajectory"] = trajectory_json(r.trajectory);
  if (r.dual_bound) j["dual_bound"] = *r.dual_bound;
  if (r.lambda) j["lambda"] = *r.lambda;
  if (r.tag == SolverTag::kSol1) j["paths_examined"] = r.paths_examined;
  if (r.tag == SolverTag::kSol2 || r.tag == SolverTag::kSol3) j["extra_waypoints"] = r.extra_waypoints;
  if (ctx.include_timing) j["wallclock_s"] = r.wallclock_s;
  return j.dump(2) + "\n";
}

Trajectory read_trajectory_document(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("trajectory: ") + e.what());
  }
  const nlohmann::json* node = &doc;
  if (doc.is_object() && doc.contains("trajectory")) node = &doc.at("trajectory");
  if (!node->is_object() || !node->contains("waypoints") || !node->at("waypoints").is_array()) {
    throw ParseError("trajectory: expected an object with a 'waypoints' array");
  }
  Trajectory t;
  t.f_d = t.f_p = t.total_prob = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  for (const auto& w : node->at("waypoints")) {
    ++n;
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer()) {
      throw ParseError("trajectory.waypoints[" + std::to_string(n - 1) + "]: expected [i, j]");
    }
    t.waypoints.push_back({w[0].get<int>() - 1, w[1].get<int>() - 1});
  }
  const auto number = [&](const char* key, double& out) {
    if (!node->contains(key)) return false;
    if (!node->at(key).is_number()) throw ParseError(std::string("trajectory.") + key + ": expected a number");
    out = node->at(key).get<double>();
    return true;
  };
  number("f_d_m", t.f_d);
  number("f_p", t.f_p);
  number("total_prob", t.total_prob);
  return t;
}

}  // namespace uavsense
