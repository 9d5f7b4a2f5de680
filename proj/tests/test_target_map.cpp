#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "support/oracles.hpp"
#include "uavsense/errors.hpp"
#include "uavsense/target_map.hpp"

using namespace uavsense;

namespace {

const std::vector<GmmComponent> kRemark{{{390, 150}, 54, 0.5}, {{180, 450}, 60, 0.5}};

double riemann_cell_mass(const std::vector<GmmComponent>& mixture, double x0, double y0, double side,
                         int n) {
  const double h = side / n;
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) sum += gmm_pdf({x0 + (a + 0.5) * h, y0 + (b + 0.5) * h}, mixture);
  }
  return sum * h * h;
}

}  // namespace

TEST_CASE("mixture density") {
  const std::vector<GmmComponent> unit{{{3, 4}, 1, 1}};
  CHECK(gmm_pdf({3, 4}, unit) == doctest::Approx(1 / (2 * std::numbers::pi)).epsilon(1e-15));
  const double r = std::sqrt(2 * std::log(2.0));
  CHECK(gmm_pdf({3 + r, 4}, unit) == doctest::Approx(0.5 / (2 * std::numbers::pi)).epsilon(1e-14));

  const double s1 = 54 * 54;
  const double s2 = 60 * 60;
  const double expected = 0.5 / (2 * std::numbers::pi * s1) * std::exp(-(15.0 * 15 + 15 * 15) / (2 * s1)) +
                          0.5 / (2 * std::numbers::pi * s2) *
                              std::exp(-((375.0 - 180) * (375 - 180) + (135.0 - 450) * (135 - 450)) / (2 * s2));
  CHECK(gmm_pdf({375, 135}, kRemark) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(gmm_pdf({-1e4, 1e4}, kRemark) >= 0.0);
}

TEST_CASE("narrow component inside one cell") {
  const GridSpec g = GridSpec::make(300, 30);
  const std::vector<GmmComponent> narrow{{{75, 135}, 30.0 / 1000, 1}};
  CHECK(std::abs(grid_probability({2, 4}, narrow, g) - 1.0) <= 1e-12);
  CHECK(grid_probability({3, 4}, narrow, g) <= 1e-12);
}

TEST_CASE("component on a cell corner splits evenly") {
  const GridSpec g = GridSpec::make(600, 30);
  const std::vector<GmmComponent> corner{{{390, 150}, 54, 1}};
  const double a = grid_probability({12, 4}, corner, g);
  CHECK(grid_probability({13, 4}, corner, g) == doctest::Approx(a).epsilon(1e-14));
  CHECK(grid_probability({12, 5}, corner, g) == doctest::Approx(a).epsilon(1e-14));
  CHECK(grid_probability({13, 5}, corner, g) == doctest::Approx(a).epsilon(1e-14));
  // Mass inside the 2x2 block around the corner, per axis.
  const double axis = std::erf(30 / (54 * std::numbers::sqrt2));
  CHECK(4 * a == doctest::Approx(axis * axis).epsilon(1e-13));
  CHECK_THROWS_AS(grid_probability({20, 0}, corner, g), std::out_of_range);
}

TEST_CASE("closed form matches adaptive quadrature on the remark mixture") {
  const GridSpec g = GridSpec::make(600, 30);
  const double q = testing::quadrature_cell_mass(kRemark, 360, 390, 120, 150);
  CHECK(std::abs(grid_probability({12, 4}, kRemark, g) - q) <= 1e-9);
  for (const GridIndex idx : {GridIndex{0, 0}, GridIndex{5, 14}, GridIndex{19, 19}, GridIndex{8, 8}}) {
    const double x0 = idx.i * 30.0;
    const double y0 = idx.j * 30.0;
    CHECK(std::abs(grid_probability(idx, kRemark, g) - testing::quadrature_cell_mass(kRemark, x0, x0 + 30, y0, y0 + 30)) <= 1e-9);
  }
}

TEST_CASE("closed form matches a fine Riemann sum") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridSpec g = GridSpec::make(300, 30);
  for (int trial = 0; trial < 4; ++trial) {
    const double w = u(rng);
    const std::vector<GmmComponent> mix{{{300 * u(rng), 300 * u(rng)}, 10 + 60 * u(rng), w},
                                        {{300 * u(rng), 300 * u(rng)}, 10 + 60 * u(rng), 1 - w}};
    const GridIndex idx{static_cast<int>(u(rng) * 10), static_cast<int>(u(rng) * 10)};
    const double riemann = riemann_cell_mass(mix, idx.i * 30.0, idx.j * 30.0, 30, 1000);
    CHECK(std::abs(grid_probability(idx, mix, g) - riemann) <= 1e-6);
  }
}

TEST_CASE("untruncated map is non-negative and holds at most unit mass") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const GridSpec g = GridSpec::make(600, 30);
    const double w = u(rng);
    const std::vector<GmmComponent> mix{{{900 * u(rng) - 150, 900 * u(rng) - 150}, 5 + 200 * u(rng), w},
                                        {{600 * u(rng), 600 * u(rng)}, 5 + 200 * u(rng), 1 - w}};
    const auto raw = raw_grid_probabilities(mix, g);
    double sum = 0.0;
    for (double p : raw) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum <= 1.0 + 1e-12);
  }
}

TEST_CASE("truncation renormalises over kept cells") {
  ScenarioConfig c = testing::open_scenario(10);
  c.mixture = {GmmComponent{{75, 75}, 0.01, 0.3}, GmmComponent{{160, 140}, 60, 0.7}};
  const auto raw = raw_grid_probabilities(c.mixture, c.grid);
  const std::size_t held = c.grid.linear({2, 2});
  CHECK(raw[held] == doctest::Approx(0.3).epsilon(0.05));

  const TargetMap open = build_target_map(c, obstacle_mask(c));
  CHECK(std::abs(open.sum() - 1.0) <= 1e-9);

  c.obstacles = {Obstacle{61, 89, 61, 89, 20}};
  const CellMask mask = obstacle_mask(c);
  CHECK(mask[held]);
  CHECK(std::count(mask.begin(), mask.end(), true) == 1);
  const TargetMap t = build_target_map(c, mask);
  double raw_kept = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (k != held) raw_kept += raw[k];
  }
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (k == held) {
      CHECK(t.probs()[k] == 0.0);
    } else {
      CHECK(t.probs()[k] == doctest::Approx(raw[k] / raw_kept).epsilon(1e-12));
    }
  }
  CHECK(std::abs(t.sum() - 1.0) <= 1e-9);
  CHECK(std::isfinite(t.inverse_weight({2, 2})));
  CHECK(t.inverse_weight({2, 2}) == doctest::Approx(1e12));
}

TEST_CASE("very wide component gives a near-uniform map") {
  ScenarioConfig c = testing::open_scenario(6);
  c.mixture = {GmmComponent{{90, 90}, 1e6, 1}};
  c.obstacles = {Obstacle{0, 20, 0, 20, 10}};
  const TargetMap t = build_target_map(c, obstacle_mask(c));
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == 0 && j == 0) {
        CHECK(t.at({i, j}) == 0.0);
      } else {
        CHECK(t.at({i, j}) == doctest::Approx(1.0 / 35).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("obstacle mask needs positive overlap area") {
  ScenarioConfig c = testing::open_scenario(4);
  c.obstacles = {Obstacle{30, 60, 30, 60, 10}};
  const CellMask exact = obstacle_mask(c);
  CHECK(std::count(exact.begin(), exact.end(), true) == 1);
  CHECK(exact[c.grid.linear({1, 1})]);
  c.obstacles = {Obstacle{0, 120, 0, 120, 10}};
  CHECK_THROWS_AS(build_target_map(c, obstacle_mask(c)), ConfigurationError);
}

TEST_CASE("target maps reject invalid entries") {
  CHECK_THROWS_AS(TargetMap(2, {0.5, 0.5, 0.5, 0.0}), ValidationError);
  CHECK_THROWS_AS(TargetMap(2, {-0.1, 0.5, 0.1, 0.0}), ValidationError);
  CHECK_NOTHROW(TargetMap(2, {0.25, 0.25, 0.25, 0.25}));
}

TEST_CASE("sampler mean and determinism") {
  const std::vector<GmmComponent> one{{{200, 300}, 40, 1}};
  TargetSampler s(one, 77);
  const int n = 100000;
  double mx = 0.0;
  double my = 0.0;
  for (int k = 0; k < n; ++k) {
    const Point2 p = s.next();
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  CHECK(std::abs(mx - 200) <= 4 * 40 / std::sqrt(n));
  CHECK(std::abs(my - 300) <= 4 * 40 / std::sqrt(n));

  TargetSampler a(kRemark, 5);
  TargetSampler b(kRemark, 5);
  for (int k = 0; k < 1000; ++k) {
    const Point2 pa = a.next();
    const Point2 pb = b.next();
    CHECK(pa == pb);
  }
  CHECK(sample_target(kRemark, 9) == sample_target(kRemark, 9));
}

TEST_CASE("sampled cell frequencies pass a chi-square test") {
  const GridSpec g = GridSpec::make(600, 30);
  const CellMask open(g.cell_count(), false);
  TargetSampler s(kRemark, g, open, 2024);
  const int n = 100000;
  std::vector<double> counts(g.cell_count(), 0.0);
  for (int k = 0; k < n; ++k) counts[g.linear(cell_of(s.next(), g))] += 1;

  const auto raw = raw_grid_probabilities(kRemark, g);
  double mass = 0.0;
  for (double p : raw) mass += p;
  double stat = 0.0;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  int bins = 0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double e = n * raw[k] / mass;
    if (e < 5) {
      pooled_expected += e;
      pooled_observed += counts[k];
      continue;
    }
    stat += (counts[k] - e) * (counts[k] - e) / e;
    ++bins;
  }
  if (pooled_expected > 0) {
    stat += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++bins;
  }
  const boost::math::chi_squared dist(bins - 1);
  const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
  CHECK(p_value > 0.001);
}

TEST_CASE("sampler gives up when nearly every draw is rejected") {
  const GridSpec g = GridSpec::make(600, 30);
  const std::vector<GmmComponent> far{{{1e5, 1e5}, 10, 1}};
  TargetSampler s(far, g, CellMask(g.cell_count(), false), 1);
  CHECK_THROWS_AS(s.next(), ConfigurationError);
}

TEST_CASE("cell lookup") {
  const GridSpec g = GridSpec::make(90, 30);
  CHECK(cell_of({0, 0}, g) == GridIndex{0, 0});
  CHECK(cell_of({30, 59.9}, g) == GridIndex{1, 1});
  CHECK(cell_of({90, 90}, g) == GridIndex{2, 2});
}
