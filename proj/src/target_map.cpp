#include "uavsense/target_map.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "uavsense/errors.hpp"

namespace uavsense {

TargetMap::TargetMap(int dimension, std::vector<double> probs, double floor_epsilon)
    : dimension_(dimension), probs_(std::move(probs)), floor_epsilon_(floor_epsilon) {
  if (dimension_ < 1 ||
      probs_.size() != static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(dimension_)) {
    throw ValidationError("target_map", "expected " + std::to_string(dimension_) + "x" +
                                            std::to_string(dimension_) + " entries");
  }
  if (!(floor_epsilon_ > 0.0)) throw ValidationError("target_map.floor_epsilon", "must be positive");
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("target_map", "entries must lie in [0, 1]");
  }
  if (sum() > 1.0 + 1e-9) throw ValidationError("target_map", "entries sum above 1");
}

double TargetMap::sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

namespace {

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_interval_mass(double lo, double hi, double mu, double sigma) {
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  if (a >= 0.0) return std::max(0.0, upper_tail(a) - upper_tail(b));
  if (b <= 0.0) return std::max(0.0, upper_tail(-b) - upper_tail(-a));
  return std::max(0.0, 1.0 - upper_tail(b) - upper_tail(-a));
}

double gmm_pdf(const Point2& p, std::span<const GmmComponent> mixture) {
  double density = 0.0;
  for (const auto& c : mixture) {
    const double dx = p.x - c.mean.x;
    const double dy = p.y - c.mean.y;
    const double var = c.sigma_m * c.sigma_m;
    density += c.weight / (2.0 * std::numbers::pi * var) * std::exp(-(dx * dx + dy * dy) / (2.0 * var));
  }
  return density;
}

double grid_probability(const GridIndex& idx, std::span<const GmmComponent> mixture,
                        const GridSpec& grid) {
  if (!grid.contains(idx)) {
    throw std::out_of_range("grid index (" + std::to_string(idx.i + 1) + "," +
                            std::to_string(idx.j + 1) + ") outside the grid");
  }
  const double d = grid.granularity_m();
  const double x0 = idx.i * d;
  const double y0 = idx.j * d;
  double mass = 0.0;
  for (const auto& c : mixture) {
    mass += c.weight * normal_interval_mass(x0, x0 + d, c.mean.x, c.sigma_m) *
            normal_interval_mass(y0, y0 + d, c.mean.y, c.sigma_m);
  }
  return mass;
}

std::vector<double> raw_grid_probabilities(std::span<const GmmComponent> mixture,
                                           const GridSpec& grid) {
  std::vector<double> out(grid.cell_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = grid_probability(grid.unlinear(k), mixture, grid);
  return out;
}

CellMask obstacle_mask(const ScenarioConfig& c) {
  const GridSpec& g = c.grid;
  const double d = g.granularity_m();
  CellMask mask(g.cell_count(), false);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const GridIndex idx = g.unlinear(k);
    const double x0 = idx.i * d;
    const double y0 = idx.j * d;
    for (const auto& o : c.obstacles) {
      const double ox = std::min(x0 + d, o.x_max) - std::max(x0, o.x_min);
      const double oy = std::min(y0 + d, o.y_max) - std::max(y0, o.y_min);
      if (ox > 0.0 && oy > 0.0) {
        mask[k] = true;
        break;
      }
    }
  }
  return mask;
}

TargetMap build_target_map(const ScenarioConfig& c, const CellMask& blocked) {
  if (blocked.size() != c.grid.cell_count()) {
    throw ValidationError("blocked_mask", "mask size does not match the grid");
  }
  std::vector<double> probs = raw_grid_probabilities(c.mixture, c.grid);
  double kept = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (blocked[k]) {
      probs[k] = 0.0;
    } else {
      kept += probs[k];
    }
  }
  if (!(kept > 0.0)) {
    throw ConfigurationError("target map has empty support: every cell is blocked or carries no mass");
  }
  for (double& p : probs) p /= kept;
  return TargetMap(c.grid.dimension(), std::move(probs), c.solver.floor_epsilon);
}

std::string export_target_map(const TargetMap& map) {
  std::string out;
  const int d = map.dimension();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (j > 0) out += ',';
      out += fmt::format("{:.17g}", map.at({i, j}));
    }
    out += '\n';
  }
  return out;
}

std::string export_mask(const CellMask& mask, int dimension) {
  std::string out;
  for (int i = 0; i < dimension; ++i) {
    for (int j = 0; j < dimension; ++j) {
      if (j > 0) out += ',';
      out += mask.at(static_cast<std::size_t>(i * dimension + j)) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

GridIndex cell_of(const Point2& p, const GridSpec& grid) {
  const double d = grid.granularity_m();
  const int last = grid.dimension() - 1;
  return {std::clamp(static_cast<int>(std::floor(p.x / d)), 0, last),
          std::clamp(static_cast<int>(std::floor(p.y / d)), 0, last)};
}

namespace {

std::discrete_distribution<std::size_t> component_picker(const std::vector<GmmComponent>& mixture) {
  std::vector<double> w;
  w.reserve(mixture.size());
  for (const auto& c : mixture) w.push_back(c.weight);
  return {w.begin(), w.end()};
}

}  // namespace

TargetSampler::TargetSampler(std::vector<GmmComponent> mixture, std::uint64_t seed)
    : mixture_(std::move(mixture)), rng_(seed), pick_(component_picker(mixture_)) {}

TargetSampler::TargetSampler(std::vector<GmmComponent> mixture, const GridSpec& grid,
                             CellMask blocked, std::uint64_t seed)
    : mixture_(std::move(mixture)),
      truncate_(true),
      grid_(grid),
      blocked_(std::move(blocked)),
      rng_(seed),
      pick_(component_picker(mixture_)) {
  if (blocked_.empty()) blocked_.assign(grid_.cell_count(), false);
  if (blocked_.size() != grid_.cell_count()) {
    throw ValidationError("blocked_mask", "mask size does not match the grid");
  }
}

bool TargetSampler::accept(const Point2& p) const {
  if (!truncate_) return true;
  if (!grid_.contains(p)) return false;
  return !blocked_[grid_.linear(cell_of(p, grid_))];
}

Point2 TargetSampler::next() {
  constexpr std::uint64_t kMinAttemptsForVerdict = 100000;
  for (;;) {
    const auto& c = mixture_[pick_(rng_)];
    // Order of evaluation matters for reproducibility; draw x before y.
    const double x = c.mean.x + c.sigma_m * normal_(rng_);
    const double y = c.mean.y + c.sigma_m * normal_(rng_);
    ++attempts_;
    if (accept({x, y})) {
      ++accepted_;
      return {x, y};
    }
    if (attempts_ >= kMinAttemptsForVerdict &&
        static_cast<double>(accepted_) < 0.001 * static_cast<double>(attempts_)) {
      throw ConfigurationError("target sampler rejection rate above 0.999");
    }
  }
}

Point2 sample_target(std::span<const GmmComponent> mixture, std::uint64_t rng_seed) {
  TargetSampler s(std::vector<GmmComponent>(mixture.begin(), mixture.end()), rng_seed);
  return s.next();
}

}  // namespace uavsense
