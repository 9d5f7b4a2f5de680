#include "uavsense/radio.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "csv_matrix.hpp"
#include "uavsense/errors.hpp"

namespace uavsense {

SnrMap::SnrMap(int dimension, std::vector<double> linear_values)
    : dimension_(dimension), values_(std::move(linear_values)) {
  if (dimension_ < 1 ||
      values_.size() != static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(dimension_)) {
    throw ValidationError("snr_map", "expected " + std::to_string(dimension_) + "x" +
                                         std::to_string(dimension_) + " entries");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("snr_map", "entries must be positive and finite");
    }
  }
}

double SnrMap::at_db(const GridIndex& idx) const { return linear_to_db(at(idx)); }

namespace {

// Clips the parameter interval [t0, t1] of a + t*d against lo <= x <= hi.
bool clip_axis(double a, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return a >= lo && a <= hi;
  double ta = (lo - a) / d;
  double tb = (hi - a) / d;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

bool segment_hits_box(const Point3& a, const Point3& b, const Obstacle& o) {
  double t0 = 0.0;
  double t1 = 1.0;
  return clip_axis(a.x, b.x - a.x, o.x_min, o.x_max, t0, t1) &&
         clip_axis(a.y, b.y - a.y, o.y_min, o.y_max, t0, t1) &&
         clip_axis(a.z, b.z - a.z, 0.0, o.height_m, t0, t1);
}

}  // namespace

bool line_of_sight(const Point3& a, const Point3& b, std::span<const Obstacle> obstacles) {
  return std::none_of(obstacles.begin(), obstacles.end(),
                      [&](const Obstacle& o) { return segment_hits_box(a, b, o); });
}

double path_loss_db(double distance_m, bool los, const ChannelParams& p) {
  if (!(distance_m >= 1.0)) {
    throw std::domain_error("path loss model requires distance >= 1 m, got " +
                            std::to_string(distance_m));
  }
  const double intercept = los ? p.intercept_los_db : p.intercept_nlos_db;
  const double exponent = los ? p.exponent_los : p.exponent_nlos;
  return intercept + 10.0 * exponent * std::log10(distance_m);
}

double large_scale_gain(const Gbs& gbs, const Point2& ground_point, double altitude_m,
                        std::span<const Obstacle> obstacles, const ChannelParams& params) {
  const Point3 uav{ground_point.x, ground_point.y, altitude_m};
  const double d = distance(gbs.position, uav);
  const bool los = line_of_sight(gbs.position, uav, obstacles);
  const double gain_sq_db = -path_loss_db(d, los, params);
  return std::pow(10.0, gain_sq_db / 20.0);
}

double received_snr(const ScenarioConfig& c, std::size_t m, const GridIndex& idx) {
  const Gbs& gbs = c.gbs_list.at(m);
  const double g = large_scale_gain(gbs, grid_center(idx, c.grid), c.uav_altitude_m, c.obstacles,
                                    c.channel);
  // Powers in mW; the ratio is unit-free.
  return db_to_linear(gbs.transmit_power_dbm) * g * g / db_to_linear(c.noise_power_dbm);
}

SnrMap build_snr_map(const ScenarioConfig& c) {
  const int d = c.grid.dimension();
  std::vector<double> values(c.grid.cell_count());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const GridIndex idx = c.grid.unlinear(k);
    double best = 0.0;
    for (std::size_t m = 0; m < c.gbs_list.size(); ++m) best = std::max(best, received_snr(c, m, idx));
    values[k] = best;
  }
  return SnrMap(d, std::move(values));
}

std::vector<std::size_t> serving_gbs(const ScenarioConfig& c) {
  std::vector<std::size_t> out(c.grid.cell_count(), 0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const GridIndex idx = c.grid.unlinear(k);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < c.gbs_list.size(); ++m) {
      const double v = received_snr(c, m, idx);
      if (v > best) {
        best = v;
        out[k] = m;
      }
    }
  }
  return out;
}

SnrMap import_snr_map(std::istream& in, const GridSpec& grid) {
  const auto rows = detail::read_numeric_csv(in, "snr map");
  const auto d = static_cast<std::size_t>(grid.dimension());
  if (rows.size() != d || rows.front().size() != d) {
    throw ValidationError("snr_map", fmt::format("expected {}x{} values, got {}x{}", d, d,
                                                 rows.size(), rows.empty() ? 0 : rows.front().size()));
  }
  std::vector<double> values;
  values.reserve(d * d);
  for (const auto& row : rows) {
    for (double db : row) values.push_back(db_to_linear(db));
  }
  return SnrMap(grid.dimension(), std::move(values));
}

std::string export_snr_map(const SnrMap& map) {
  std::string out;
  const int d = map.dimension();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (j > 0) out += ',';
      out += fmt::format("{:.6f}", map.at_db({i, j}));
    }
    out += '\n';
  }
  return out;
}

}  // namespace uavsense
