#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavsense/grid.hpp"
#include "uavsense/solver_params.hpp"

namespace uavsense {

struct Gbs {
  Point3 position;  // z is the antenna height
  double transmit_power_dbm = 0.0;
  friend bool operator==(const Gbs&, const Gbs&) = default;
};

/// Axis-aligned box standing on the ground.
struct Obstacle {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double height_m = 0.0;
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

/// Isotropic 2D Gaussian component of the target location mixture.
struct GmmComponent {
  Point2 mean;
  double sigma_m = 1.0;
  double weight = 1.0;
  friend bool operator==(const GmmComponent&, const GmmComponent&) = default;
};

/// Two-state log-distance path loss: loss_dB = intercept + 10 * exponent * log10(d).
/// Antenna gains are folded into the intercepts.
struct ChannelParams {
  double intercept_los_db = 38.4;
  double exponent_los = 2.1;
  double intercept_nlos_db = 38.4;
  double exponent_nlos = 3.0;
  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Throws ValidationError unless both exponents are >= 1 and the NLoS loss is
/// at least the LoS loss for every distance in [1, max_distance_m].
void validate(const ChannelParams& params, double max_distance_m);

/// Flying distance budget. Either given directly or as speed x mission time;
/// `distance_m` always holds the effective value.
struct DistanceBudget {
  double distance_m = 0.0;
  std::optional<double> speed_mps;
  std::optional<double> max_time_s;
  friend bool operator==(const DistanceBudget&, const DistanceBudget&) = default;
};

struct SolverSettings {
  std::uint64_t rng_seed = 1;
  double floor_epsilon = 1e-12;
  LagrangianParams lagrangian;
  int detour_candidates = 10;  // R_I
  int tour_candidates = 30;    // R_II
  AcoParams aco;
  friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct ScenarioConfig {
  GridSpec grid;
  std::vector<Gbs> gbs_list;
  std::vector<Obstacle> obstacles;
  std::vector<GmmComponent> mixture;
  double uav_altitude_m = 0.0;
  double noise_power_dbm = 0.0;
  double snr_threshold_db = 0.0;
  GridIndex start;
  GridIndex finish;
  DistanceBudget budget;
  ChannelParams channel;
  SolverSettings solver;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Checks every invariant of a config assembled in code. Throws ValidationError.
void validate(const ScenarioConfig& config);

/// Parses and validates a scenario document. Throws ParseError for malformed
/// JSON or wrong value types and ValidationError for invariant violations.
ScenarioConfig load_scenario(std::istream& in);
ScenarioConfig load_scenario_file(const std::string& path);

/// Canonical document: fixed key order, two-space indent, trailing newline.
/// The obstacles section is omitted when there are no obstacles.
std::string save_scenario(const ScenarioConfig& config);

}  // namespace uavsense
