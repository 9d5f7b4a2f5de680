#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavsense/grid.hpp"
#include "uavsense/scenario.hpp"

namespace uavsense {

/// D x D expected-SNR map (linear scale), i-major.
class SnrMap {
 public:
  SnrMap() = default;
  /// Throws ValidationError unless `linear_values` has D*D positive finite entries.
  SnrMap(int dimension, std::vector<double> linear_values);

  int dimension() const noexcept { return dimension_; }
  double at(const GridIndex& idx) const { return values_.at(linear(idx)); }
  double at_db(const GridIndex& idx) const;
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SnrMap&, const SnrMap&) = default;

 private:
  std::size_t linear(const GridIndex& idx) const {
    return static_cast<std::size_t>(idx.i) * static_cast<std::size_t>(dimension_) +
           static_cast<std::size_t>(idx.j);
  }

  int dimension_ = 0;
  std::vector<double> values_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// True iff the segment a-b misses every obstacle box (footprint extruded
/// from the ground to its height). Touching a face counts as blocked.
bool line_of_sight(const Point3& a, const Point3& b, std::span<const Obstacle> obstacles);

/// Path loss in dB for the given 3D distance and propagation state.
double path_loss_db(double distance_m, bool los, const ChannelParams& params);

/// Large-scale amplitude gain from `gbs` to a UAV hovering at `altitude_m`
/// above `ground_point`. Throws std::domain_error when the 3D distance is
/// below 1 m.
double large_scale_gain(const Gbs& gbs, const Point2& ground_point, double altitude_m,
                        std::span<const Obstacle> obstacles, const ChannelParams& params);

/// Expected SNR (linear) at the grid center of `idx` when served by GBS `m`.
double received_snr(const ScenarioConfig& config, std::size_t m, const GridIndex& idx);

/// Best-server expected SNR at every grid center.
SnrMap build_snr_map(const ScenarioConfig& config);

/// Index of the serving (argmax) GBS at every grid center, i-major.
std::vector<std::size_t> serving_gbs(const ScenarioConfig& config);

/// Reads a D x D CSV of dB values (row = i, column = j, optional header row).
/// Throws ParseError for malformed or non-finite entries and ValidationError
/// for a dimension mismatch.
SnrMap import_snr_map(std::istream& in, const GridSpec& grid);

/// Canonical CSV: no header, dB values with 6 decimals, '\n' line endings.
std::string export_snr_map(const SnrMap& map);

}  // namespace uavsense
