#include "uavsense/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uavsense/errors.hpp"

namespace uavsense {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void validate(const LagrangianParams& p) {
  if (!(p.lambda_tolerance > 0.0)) {
    throw ValidationError("solver.lagrangian.lambda_tolerance", "must be positive");
  }
  if (p.max_bisection_iters < 1) {
    throw ValidationError("solver.lagrangian.max_bisection_iters", "must be >= 1");
  }
  if (p.k_paths < 1) throw ValidationError("solver.lagrangian.k_paths", "must be >= 1");
}

void validate(const AcoParams& p) {
  if (p.ants < 1) throw ValidationError("solver.aco.ants", "must be >= 1");
  if (p.iterations < 1) throw ValidationError("solver.aco.iterations", "must be >= 1");
  if (!(p.evaporation > 0.0 && p.evaporation < 1.0)) {
    throw ValidationError("solver.aco.evaporation", "must lie in (0, 1)");
  }
  if (!(p.pheromone_influence >= 0.0)) {
    throw ValidationError("solver.aco.pheromone_influence", "must be >= 0");
  }
  if (!(p.heuristic_influence >= 0.0)) {
    throw ValidationError("solver.aco.heuristic_influence", "must be >= 0");
  }
}

void validate(const ChannelParams& params, double max_distance_m) {
  if (!(params.exponent_los >= 1.0)) throw ValidationError("radio.channel.exponent_los", "must be >= 1");
  if (!(params.exponent_nlos >= 1.0)) {
    throw ValidationError("radio.channel.exponent_nlos", "must be >= 1");
  }
  // Both losses are affine in log10(d), so checking the interval ends suffices.
  const auto gap = [&](double d) {
    const double l = std::log10(d);
    return (params.intercept_nlos_db + 10.0 * params.exponent_nlos * l) -
           (params.intercept_los_db + 10.0 * params.exponent_los * l);
  };
  const double far = std::max(1.0, max_distance_m);
  if (gap(1.0) < 0.0 || gap(far) < 0.0) {
    throw ValidationError("radio.channel", "NLoS path loss must not be below LoS path loss");
  }
}

void validate(const ScenarioConfig& c) {
  const auto& g = c.grid;
  if (g.dimension() < 2) throw ValidationError("grid", "grid is not initialised");
  const double side = g.side_length_m();

  if (c.gbs_list.empty()) throw ValidationError("gbs", "at least one GBS is required");
  double max_height = c.uav_altitude_m;
  for (std::size_t m = 0; m < c.gbs_list.size(); ++m) {
    const auto& b = c.gbs_list[m];
    const std::string path = "gbs[" + std::to_string(m) + "]";
    if (!(b.position.z > 0.0)) throw ValidationError(path + ".height_m", "must be positive");
    if (!g.contains(Point2{b.position.x, b.position.y})) {
      throw ValidationError(path, "position must lie inside the region");
    }
    if (!std::isfinite(b.transmit_power_dbm)) {
      throw ValidationError(path + ".transmit_power_dbm", "must be finite");
    }
    max_height = std::max(max_height, b.position.z);
  }

  for (std::size_t k = 0; k < c.obstacles.size(); ++k) {
    const auto& o = c.obstacles[k];
    const std::string path = "obstacles[" + std::to_string(k) + "]";
    if (!(o.x_min < o.x_max) || !(o.y_min < o.y_max)) {
      throw ValidationError(path, "footprint must have positive extent");
    }
    if (o.x_min < 0.0 || o.y_min < 0.0 || o.x_max > side || o.y_max > side) {
      throw ValidationError(path, "footprint must lie inside the region");
    }
    if (!(o.height_m > 0.0)) throw ValidationError(path + ".height_m", "must be positive");
  }

  if (c.mixture.empty()) throw ValidationError("mixture", "at least one component is required");
  double total = 0.0;
  for (std::size_t s = 0; s < c.mixture.size(); ++s) {
    const auto& comp = c.mixture[s];
    const std::string path = "mixture[" + std::to_string(s) + "]";
    if (!(comp.sigma_m > 0.0) || !std::isfinite(comp.sigma_m)) {
      throw ValidationError(path + ".sigma_m", "must be positive");
    }
    if (!(comp.weight >= 0.0 && comp.weight <= 1.0)) {
      throw ValidationError(path + ".weight", "must lie in [0, 1]");
    }
    if (!std::isfinite(comp.mean.x) || !std::isfinite(comp.mean.y)) {
      throw ValidationError(path + ".mean", "must be finite");
    }
    total += comp.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("mixture", "weights sum to " + std::to_string(total) + ", expected 1");
  }

  if (!(c.uav_altitude_m > 0.0)) throw ValidationError("uav.altitude_m", "must be positive");
  if (!std::isfinite(c.noise_power_dbm)) throw ValidationError("radio.noise_power_dbm", "must be finite");
  if (!std::isfinite(c.snr_threshold_db)) {
    throw ValidationError("radio.snr_threshold_db", "must be finite");
  }
  if (!g.contains(c.start)) throw ValidationError("uav.start", "index outside 1..D");
  if (!g.contains(c.finish)) throw ValidationError("uav.finish", "index outside 1..D");

  const auto& b = c.budget;
  if (!(b.distance_m >= 0.0) || !std::isfinite(b.distance_m)) {
    throw ValidationError("uav.distance_budget_m", "must be finite and non-negative");
  }
  if (b.speed_mps.has_value() != b.max_time_s.has_value()) {
    throw ValidationError("uav", "speed_mps and max_time_s must be given together");
  }
  if (b.speed_mps) {
    if (!(*b.speed_mps > 0.0)) throw ValidationError("uav.speed_mps", "must be positive");
    if (!(*b.max_time_s > 0.0)) throw ValidationError("uav.max_time_s", "must be positive");
    const double product = *b.speed_mps * *b.max_time_s;
    if (std::abs(product - b.distance_m) > 1e-9 * std::max(1.0, product)) {
      throw ValidationError("uav.distance_budget_m", "must equal speed_mps * max_time_s");
    }
  }

  validate(c.channel, std::hypot(side * std::sqrt(2.0), max_height));

  if (!(c.solver.floor_epsilon > 0.0 && c.solver.floor_epsilon < 1.0)) {
    throw ValidationError("solver.floor_epsilon", "must lie in (0, 1)");
  }
  validate(c.solver.lagrangian);
  validate(c.solver.aco);
  if (c.solver.detour_candidates < 0) {
    throw ValidationError("solver.detour_candidates", "must be >= 0");
  }
  if (c.solver.tour_candidates < 0) throw ValidationError("solver.tour_candidates", "must be >= 0");
}

namespace {

// Walks a JSON object, tracks the dotted path for error messages and rejects
// keys that were never consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ParseError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  const json& raw(const char* key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw ParseError(child(key) + ": missing");
    return node_.at(key);
  }

  double number(const char* key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ParseError(child(key) + ": expected a number");
    return v.get<double>();
  }

  double number_or(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

  std::optional<double> optional_number(const char* key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::int64_t integer(const char* key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ParseError(child(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }

  std::int64_t integer_or(const char* key, std::int64_t fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::uint64_t unsigned_or(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ParseError(child(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ValidationError(child(key), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

const json& array_at(Section& parent, const char* key) {
  const json& v = parent.raw(key);
  if (!v.is_array()) throw ParseError(parent.child(key) + ": expected an array");
  return v;
}

GridIndex read_index_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw ParseError(path + ": expected [i, j] with integer entries");
  }
  // One-based in files.
  return {v[0].get<int>() - 1, v[1].get<int>() - 1};
}

Point2 read_point_pair(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(path + ": expected [x, y] in meters");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

GridIndex read_endpoint(Section& uav, const char* index_key, const char* meters_key,
                        const GridSpec& grid) {
  const bool by_index = uav.has(index_key);
  const bool by_meters = uav.has(meters_key);
  if (by_index == by_meters) {
    throw ParseError(uav.child(index_key) + ": give exactly one of " + index_key + " or " +
                     meters_key);
  }
  if (by_index) return read_index_pair(uav.raw(index_key), uav.child(index_key));
  return snap_to_grid(read_point_pair(uav.raw(meters_key), uav.child(meters_key)), grid);
}

ScenarioConfig parse(const json& doc) {
  ScenarioConfig c;
  Section root(doc, "");

  {
    Section grid(root.raw("grid"), "grid");
    const double side = grid.number("side_length_m");
    const double gran = grid.number("granularity_m");
    grid.finish();
    c.grid = GridSpec::make(side, gran);
  }

  const json& gbs = array_at(root, "gbs");
  for (std::size_t m = 0; m < gbs.size(); ++m) {
    Section s(gbs[m], "gbs[" + std::to_string(m) + "]");
    Gbs b;
    b.position = {s.number("x_m"), s.number("y_m"), s.number("height_m")};
    b.transmit_power_dbm = s.number("transmit_power_dbm");
    s.finish();
    c.gbs_list.push_back(b);
  }

  if (root.has("obstacles")) {
    const json& obs = array_at(root, "obstacles");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      Section s(obs[k], "obstacles[" + std::to_string(k) + "]");
      Obstacle o;
      o.x_min = s.number("x_min_m");
      o.x_max = s.number("x_max_m");
      o.y_min = s.number("y_min_m");
      o.y_max = s.number("y_max_m");
      o.height_m = s.number("height_m");
      s.finish();
      c.obstacles.push_back(o);
    }
  }

  const json& mix = array_at(root, "mixture");
  for (std::size_t k = 0; k < mix.size(); ++k) {
    Section s(mix[k], "mixture[" + std::to_string(k) + "]");
    GmmComponent comp;
    comp.mean = {s.number("mean_x_m"), s.number("mean_y_m")};
    comp.sigma_m = s.number("sigma_m");
    comp.weight = s.number("weight");
    s.finish();
    c.mixture.push_back(comp);
  }

  {
    Section uav(root.raw("uav"), "uav");
    c.uav_altitude_m = uav.number("altitude_m");
    c.start = read_endpoint(uav, "start", "start_m", c.grid);
    c.finish = read_endpoint(uav, "finish", "finish_m", c.grid);
    c.budget.speed_mps = uav.optional_number("speed_mps");
    c.budget.max_time_s = uav.optional_number("max_time_s");
    if (uav.has("distance_budget_m")) {
      c.budget.distance_m = uav.number("distance_budget_m");
    } else if (c.budget.speed_mps && c.budget.max_time_s) {
      c.budget.distance_m = *c.budget.speed_mps * *c.budget.max_time_s;
    } else {
      throw ParseError("uav: give distance_budget_m or speed_mps with max_time_s");
    }
    uav.finish();
  }

  {
    Section radio(root.raw("radio"), "radio");
    c.noise_power_dbm = radio.number("noise_power_dbm");
    c.snr_threshold_db = radio.number("snr_threshold_db");
    if (radio.has("channel")) {
      Section ch(radio.raw("channel"), "radio.channel");
      c.channel.intercept_los_db = ch.number("intercept_los_db");
      c.channel.exponent_los = ch.number("exponent_los");
      c.channel.intercept_nlos_db = ch.number("intercept_nlos_db");
      c.channel.exponent_nlos = ch.number("exponent_nlos");
      ch.finish();
    }
    radio.finish();
  }

  if (root.has("solver")) {
    Section s(root.raw("solver"), "solver");
    auto& sv = c.solver;
    sv.rng_seed = s.unsigned_or("rng_seed", sv.rng_seed);
    sv.floor_epsilon = s.number_or("floor_epsilon", sv.floor_epsilon);
    sv.detour_candidates = static_cast<int>(s.integer_or("detour_candidates", sv.detour_candidates));
    sv.tour_candidates = static_cast<int>(s.integer_or("tour_candidates", sv.tour_candidates));
    if (s.has("lagrangian")) {
      Section l(s.raw("lagrangian"), "solver.lagrangian");
      sv.lagrangian.lambda_tolerance = l.number_or("lambda_tolerance", sv.lagrangian.lambda_tolerance);
      sv.lagrangian.max_bisection_iters =
          static_cast<int>(l.integer_or("max_bisection_iters", sv.lagrangian.max_bisection_iters));
      sv.lagrangian.k_paths = static_cast<int>(l.integer_or("k_paths", sv.lagrangian.k_paths));
      l.finish();
    }
    if (s.has("aco")) {
      Section a(s.raw("aco"), "solver.aco");
      sv.aco.ants = static_cast<int>(a.integer_or("ants", sv.aco.ants));
      sv.aco.iterations = static_cast<int>(a.integer_or("iterations", sv.aco.iterations));
      sv.aco.pheromone_influence = a.number_or("pheromone_influence", sv.aco.pheromone_influence);
      sv.aco.heuristic_influence = a.number_or("heuristic_influence", sv.aco.heuristic_influence);
      sv.aco.evaporation = a.number_or("evaporation", sv.aco.evaporation);
      a.finish();
    }
    s.finish();
  }

  root.finish();
  validate(c);
  return c;
}

ordered_json index_pair(const GridIndex& idx) { return ordered_json::array({idx.i + 1, idx.j + 1}); }

}  // namespace

ScenarioConfig load_scenario(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  try {
    return parse(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path);
  return load_scenario(in);
}

std::string save_scenario(const ScenarioConfig& c) {
  ordered_json doc;
  doc["grid"] = {{"side_length_m", c.grid.side_length_m()},
                 {"granularity_m", c.grid.granularity_m()}};

  ordered_json gbs = ordered_json::array();
  for (const auto& b : c.gbs_list) {
    gbs.push_back({{"x_m", b.position.x},
                   {"y_m", b.position.y},
                   {"height_m", b.position.z},
                   {"transmit_power_dbm", b.transmit_power_dbm}});
  }
  doc["gbs"] = gbs;

  if (!c.obstacles.empty()) {
    ordered_json obs = ordered_json::array();
    for (const auto& o : c.obstacles) {
      obs.push_back({{"x_min_m", o.x_min},
                     {"x_max_m", o.x_max},
                     {"y_min_m", o.y_min},
                     {"y_max_m", o.y_max},
                     {"height_m", o.height_m}});
    }
    doc["obstacles"] = obs;
  }

  ordered_json mix = ordered_json::array();
  for (const auto& comp : c.mixture) {
    mix.push_back({{"mean_x_m", comp.mean.x},
                   {"mean_y_m", comp.mean.y},
                   {"sigma_m", comp.sigma_m},
                   {"weight", comp.weight}});
  }
  doc["mixture"] = mix;

  ordered_json uav;
  uav["altitude_m"] = c.uav_altitude_m;
  uav["start"] = index_pair(c.start);
  uav["finish"] = index_pair(c.finish);
  if (c.budget.speed_mps) {
    uav["speed_mps"] = *c.budget.speed_mps;
    uav["max_time_s"] = *c.budget.max_time_s;
  }
  uav["distance_budget_m"] = c.budget.distance_m;
  doc["uav"] = uav;

  doc["radio"] = {{"noise_power_dbm", c.noise_power_dbm},
                  {"snr_threshold_db", c.snr_threshold_db},
                  {"channel",
                   {{"intercept_los_db", c.channel.intercept_los_db},
                    {"exponent_los", c.channel.exponent_los},
                    {"intercept_nlos_db", c.channel.intercept_nlos_db},
                    {"exponent_nlos", c.channel.exponent_nlos}}}};

  const auto& sv = c.solver;
  doc["solver"] = {
      {"rng_seed", sv.rng_seed},
      {"floor_epsilon", sv.floor_epsilon},
      {"detour_candidates", sv.detour_candidates},
      {"tour_candidates", sv.tour_candidates},
      {"lagrangian",
       {{"lambda_tolerance", sv.lagrangian.lambda_tolerance},
        {"max_bisection_iters", sv.lagrangian.max_bisection_iters},
        {"k_paths", sv.lagrangian.k_paths}}},
      {"aco",
       {{"ants", sv.aco.ants},
        {"iterations", sv.aco.iterations},
        {"pheromone_influence", sv.aco.pheromone_influence},
        {"heuristic_influence", sv.aco.heuristic_influence},
        {"evaporation", sv.aco.evaporation}}}};

  return doc.dump(2) + "\n";
}

}  // namespace uavsense
