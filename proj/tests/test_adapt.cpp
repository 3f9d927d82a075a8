#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lrnorm/adapt.hpp"
#include "lrnorm/error.hpp"
#include "lrnorm/estimators.hpp"
#include "lrnorm/gwn.hpp"

using namespace lrnorm;

namespace {

EstimatorConfig adaptive_config(double n, double sigma) {
  EstimatorConfig cfg = EstimatorConfig::defaults(1.0);
  cfg.n = n;
  cfg.sigma = sigma;
  cfg.L = 1.0;
  cfg.M = 3;
  cfg.eps = 0.045;
  cfg.relax_degree_constraints = true;
  cfg.derive();
  return cfg;
}

// Largest h whose gap to every smaller h' is within C* lambda_{h'}^2 / ln n.
std::size_t brute_force_lepski(const std::vector<CandidateValue>& c, double cstar, double log_n) {
  std::size_t best = c.size() - 1;
  double best_h = -1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j].h >= c[i].h) continue;
      if (std::pow(c[i].T - c[j].T, 2) > cstar * c[j].lambda * c[j].lambda / log_n) ok = false;
    }
    if (ok && c[i].h > best_h) {
      best_h = c[i].h;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("bandwidth grids") {
  const double n = 4096.0;
  const BandwidthGrid d = make_bandwidth_grid(n, 2.0, GridKind::kDyadic);
  CHECK(d.h_min == doctest::Approx(1.0 / (n * std::log(n))));
  CHECK(d.h_max == doctest::Approx(std::pow(n * std::log(n), -0.2)));
  CHECK(d.candidates.front() == doctest::Approx(d.h_max));
  for (std::size_t i = 1; i < d.candidates.size(); ++i) {
    CHECK(d.candidates[i] == doctest::Approx(0.5 * d.candidates[i - 1]));
    CHECK(d.candidates[i] >= d.h_min * (1 - 1e-12));
  }
  const BandwidthGrid h = make_bandwidth_grid(n, 2.0, GridKind::kHarmonic);
  for (std::size_t i = 0; i < h.candidates.size(); ++i) {
    const double j = 1.0 / h.candidates[i];
    CHECK(j == doctest::Approx(std::round(j)));
    CHECK(h.candidates[i] <= h.h_max);
    CHECK(h.candidates[i] >= h.h_min);
  }
  CHECK(grid_kind_from_string("harmonic") == GridKind::kHarmonic);
  CHECK_THROWS_AS(grid_kind_from_string("geometric"), ParameterError);
}

TEST_CASE("Lepski rule agrees with a brute-force search") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CandidateValue> c(7);
    for (int i = 0; i < 7; ++i) {
      c[i].h = std::ldexp(1.0, -i - 1);
      c[i].lambda = 0.05 / std::sqrt(c[i].h);
      c[i].T = 0.3 + 0.2 * U(gen) * (i + 1) / 7.0;
    }
    std::shuffle(c.begin(), c.end(), gen);
    const double cstar = std::pow(10.0, -1.0 + 3.0 * U(gen));
    const LepskiResult res = lepski_select(c, cstar, 7.0);
    CHECK(res.hhat == c[brute_force_lepski(c, cstar, 7.0)].h);
  }
}

TEST_CASE("degenerate Lepski inputs") {
  std::vector<CandidateValue> one(1);
  one[0].h = 0.2;
  one[0].T = 0.7;
  one[0].lambda = 0.1;
  CHECK(lepski_select(one, 1.0, 5.0).hhat == 0.2);
  std::vector<CandidateValue> same(4);
  for (int i = 0; i < 4; ++i) {
    same[i].h = 0.1 * (i + 1);
    same[i].T = 0.5;
    same[i].lambda = 0.0;
  }
  CHECK(lepski_select(same, 1e-6, 5.0).hhat == doctest::Approx(0.4));
  CHECK_THROWS_AS(lepski_select({}, 1.0, 5.0), ParameterError);
}

TEST_CASE("single-candidate adaptation equals the fixed bandwidth estimator") {
  EstimatorConfig cfg = adaptive_config(1024.0, 1.0);
  cfg.h = 0.1;
  const BandwidthGrid g = single_bandwidth_grid(0.1, 2.0, 5.0);
  const auto obs = simulate([](double t) { return std::sin(6 * t); }, 2048.0, 1.0, 1024, 2, 17);
  const LepskiResult res = adaptive_estimate(obs, cfg, g);
  const auto poly = shared_poly(1.0, cfg.K);
  const double fixed = run_estimator(obs, make_context(cfg, shared_kernel(cfg.M)), cfg, poly.get()).value;
  CHECK(res.That == fixed);
  CHECK(res.hhat == 0.1);
}

TEST_CASE("noiseless constant selects the largest bandwidth") {
  EstimatorConfig cfg = adaptive_config(256.0, 0.0);
  cfg.L = 5.0;
  BandwidthGrid g = make_bandwidth_grid(256.0, 2.0, GridKind::kDyadic, 1.0);
  const auto obs = simulate([](double) { return 2.0; }, 512.0, 0.0, adaptive_grid_size(g), 2, 1);
  const LepskiResult res = adaptive_estimate(obs, cfg, g);
  CHECK(res.hhat == doctest::Approx(g.h_max));
  CHECK(res.That == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("zero signal estimate stays in range") {
  const EstimatorConfig cfg = adaptive_config(256.0, 1.0);
  const BandwidthGrid g = make_bandwidth_grid(256.0, 2.0, GridKind::kDyadic, 10.0);
  const auto obs = simulate([](double) { return 0.0; }, 512.0, 1.0, adaptive_grid_size(g), 2, 4);
  const LepskiResult res = adaptive_estimate(obs, cfg, g);
  CHECK(res.That >= 0.0);
  CHECK(res.That <= cfg.L);
}

TEST_CASE("adaptive configuration checks") {
  EstimatorConfig cfg = adaptive_config(1024.0, 1.0);
  const BandwidthGrid g = make_bandwidth_grid(1024.0, 2.0, GridKind::kDyadic);
  CHECK_NOTHROW(check_adaptive_config(cfg, g));
  cfg.eps = 0.06;
  CHECK_THROWS_WITH_AS(check_adaptive_config(cfg, g), doctest::Contains("4 r eps (2 s_max + 1) < 1"),
                       ParameterError);
  EstimatorConfig even = EstimatorConfig::defaults(2.0);
  CHECK_THROWS_AS(check_adaptive_config(even, g), ModeError);
}

TEST_CASE("calibration without noise returns the bottom of the search grid") {
  const EstimatorConfig cfg = adaptive_config(128.0, 0.0);
  const BandwidthGrid g = make_bandwidth_grid(128.0, 2.0, GridKind::kDyadic);
  CalibrationOptions opt;
  opt.reps = 100;
  const CalibrationResult res = calibrate_cstar(cfg, g, opt);
  CHECK(res.cstar == doctest::Approx(opt.cstar_lo));
  CHECK(res.selection_rate == 1.0);
  opt.reps = 50;
  CHECK_THROWS_AS(calibrate_cstar(cfg, g, opt), ParameterError);
}
