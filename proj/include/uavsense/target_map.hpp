#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uavsense/grid.hpp"
#include "uavsense/scenario.hpp"

namespace uavsense {

/// Cells excluded from the target support, i-major; true = blocked.
using CellMask = std::vector<bool>;

/// D x D per-cell target appearance probabilities, i-major.
///
/// Stored probabilities may be exactly zero. Anything that needs 1/p goes
/// through `inverse_weight`, which substitutes `floor_epsilon` for entries
/// below it so the inverse stays finite.
class TargetMap {
 public:
  TargetMap() = default;
  /// Throws ValidationError unless entries lie in [0, 1] and sum to <= 1 + 1e-9.
  TargetMap(int dimension, std::vector<double> probs, double floor_epsilon = 1e-12);

  int dimension() const noexcept { return dimension_; }
  double floor_epsilon() const noexcept { return floor_epsilon_; }
  double at(const GridIndex& idx) const { return probs_.at(linear(idx)); }
  double inverse_weight(const GridIndex& idx) const { return 1.0 / std::max(at(idx), floor_epsilon_); }
  std::span<const double> probs() const noexcept { return probs_; }
  double sum() const;

 private:
  std::size_t linear(const GridIndex& idx) const {
    return static_cast<std::size_t>(idx.i) * static_cast<std::size_t>(dimension_) +
           static_cast<std::size_t>(idx.j);
  }

  int dimension_ = 0;
  std::vector<double> probs_;
  double floor_epsilon_ = 1e-12;
};

/// Standard normal CDF, erfc-based.
double normal_cdf(double z);

/// P(lo <= X <= hi) for X ~ N(mu, sigma^2), computed from whichever tail
/// avoids cancellation.
double normal_interval_mass(double lo, double hi, double mu, double sigma);

/// Mixture density at `p` in 1/m^2.
double gmm_pdf(const Point2& p, std::span<const GmmComponent> mixture);

/// Exact mass of the mixture inside cell `idx` (separable closed form).
/// Throws std::out_of_range for an index outside the grid.
double grid_probability(const GridIndex& idx, std::span<const GmmComponent> mixture,
                        const GridSpec& grid);

/// Untruncated per-cell masses; sums to the in-region mass (<= 1).
std::vector<double> raw_grid_probabilities(std::span<const GmmComponent> mixture,
                                           const GridSpec& grid);

/// A cell is blocked iff its footprint overlaps some obstacle footprint with
/// positive area.
CellMask obstacle_mask(const ScenarioConfig& config);

/// Raw map with blocked cells zeroed and the kept cells renormalised to sum
/// to one. Throws ConfigurationError when nothing is left to normalise.
TargetMap build_target_map(const ScenarioConfig& config, const CellMask& blocked);

/// Canonical CSV of probabilities (row = i, column = j, %.17g).
std::string export_target_map(const TargetMap& map);
/// Canonical CSV of 0/1 flags (1 = blocked).
std::string export_mask(const CellMask& mask, int dimension);

/// Cell containing `p`; the upper region border belongs to the last cell.
GridIndex cell_of(const Point2& p, const GridSpec& grid);

/// Draws target locations from the mixture. When constructed with a grid,
/// draws outside the region or inside blocked cells are rejected and
/// redrawn, which samples the truncated, renormalised distribution.
class TargetSampler {
 public:
  TargetSampler(std::vector<GmmComponent> mixture, std::uint64_t seed);
  TargetSampler(std::vector<GmmComponent> mixture, const GridSpec& grid, CellMask blocked,
                std::uint64_t seed);

  /// Throws ConfigurationError when the acceptance rate stays below 0.001.
  Point2 next();

  std::uint64_t attempts() const noexcept { return attempts_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  bool accept(const Point2& p) const;

  std::vector<GmmComponent> mixture_;
  bool truncate_ = false;
  GridSpec grid_;
  CellMask blocked_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> pick_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t attempts_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Single draw with a fresh generator seeded by `rng_seed`.
Point2 sample_target(std::span<const GmmComponent> mixture, std::uint64_t rng_seed);

}  // namespace uavsense
