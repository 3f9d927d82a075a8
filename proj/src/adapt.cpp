#include "lrnorm/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrnorm/error.hpp"
#include "lrnorm/rng.hpp"
#include "lrnorm/stats.hpp"

namespace lrnorm {

std::string to_string(GridKind kind) { return kind == GridKind::kDyadic ? "dyadic" : "harmonic"; }

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "dyadic") return GridKind::kDyadic;
  if (s == "harmonic") return GridKind::kHarmonic;
  throw ParameterError("grid kind must be dyadic or harmonic, got '" + s + "'");
}

BandwidthGrid make_bandwidth_grid(double n, double s_max, GridKind kind, double cstar) {
  require(n > 1.0, "bandwidth grid: n must exceed 1");
  require(s_max > 0.0, "bandwidth grid: s_max must be positive");
  BandwidthGrid g;
  g.kind = kind;
  g.s_max = s_max;
  g.cstar = cstar;
  const double nl = n * std::log(n);
  g.h_min = 1.0 / nl;
  g.h_max = std::min(1.0, std::pow(nl, -1.0 / (2.0 * s_max + 1.0)));
  if (kind == GridKind::kDyadic) {
    for (double h = g.h_max; h >= g.h_min * (1.0 - 1e-12); h *= 0.5) g.candidates.push_back(h);
  } else {
    const long j0 = static_cast<long>(std::ceil(1.0 / g.h_max - 1e-9));
    const long j1 = static_cast<long>(std::floor(1.0 / g.h_min + 1e-9));
    for (long j = std::max(1L, j0); j <= j1; ++j) g.candidates.push_back(1.0 / j);
  }
  require(!g.candidates.empty(), "bandwidth grid: no candidate in [h_min, h_max]");
  return g;
}

BandwidthGrid single_bandwidth_grid(double h, double s_max, double cstar) {
  BandwidthGrid g;
  g.candidates = {h};
  g.h_min = g.h_max = h;
  g.s_max = s_max;
  g.cstar = cstar;
  return g;
}

std::vector<CandidateValue> compute_candidates(const std::vector<Observation>& splits,
                                               const EstimatorConfig& cfg,
                                               const BandwidthGrid& grid) {
  require(!grid.candidates.empty(), "lepski: empty bandwidth grid");
  std::vector<CandidateValue> out;
  out.reserve(grid.candidates.size());
  auto kernel = shared_kernel(cfg.M);
  for (double h : grid.candidates) {
    EstimatorConfig c = cfg;
    c.h = h;
    c.derive();
    const ProjectionContext ctx = make_context(c, kernel);
    const auto poly = c.mode == EstimatorMode::kEven ? nullptr : shared_poly(c.r, c.K);
    CandidateValue v;
    v.h = h;
    v.lambda = ctx.lambda_h;
    v.diagnostics = run_estimator(splits, ctx, c, poly.get());
    v.T = v.diagnostics.value;
    out.push_back(v);
  }
  return out;
}

LepskiResult lepski_select(std::vector<CandidateValue> candidates, double cstar, double log_n,
                           LepskiScale scale) {
  require(!candidates.empty(), "lepski: empty bandwidth grid");
  require(cstar > 0.0, "lepski: C* must be positive");
  require(log_n > 0.0, "lepski: ln n must be positive");
  std::sort(candidates.begin(), candidates.end(),
            [](const CandidateValue& a, const CandidateValue& b) { return a.h > b.h; });
  LepskiResult res;
  res.fallback = true;
  res.index = candidates.size() - 1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool ok = true;
    for (std::size_t j = i + 1; j < candidates.size() && ok; ++j) {
      const double lambda = scale == LepskiScale::kSmaller ? candidates[j].lambda
                                                           : candidates[i].lambda;
      const double gap = candidates[i].T - candidates[j].T;
      ok = gap * gap <= cstar * lambda * lambda / log_n;
    }
    if (ok) {
      res.index = i;
      res.fallback = false;
      break;
    }
  }
  res.hhat = candidates[res.index].h;
  res.That = candidates[res.index].T;
  res.per_candidate = std::move(candidates);
  return res;
}

void check_adaptive_config(const EstimatorConfig& cfg, const BandwidthGrid& grid) {
  if (cfg.mode == EstimatorMode::kEven)
    throw ModeError("adaptive estimation is defined for r = 1 and non-even r only");
  if (!(4.0 * cfg.r * cfg.eps * (2.0 * grid.s_max + 1.0) < 1.0)) {
    std::ostringstream os;
    os << "adaptive config: 4 r eps (2 s_max + 1) < 1 violated (value "
       << 4.0 * cfg.r * cfg.eps * (2.0 * grid.s_max + 1.0) << ")";
    throw ParameterError(os.str());
  }
}

LepskiResult adaptive_estimate(const std::vector<Observation>& splits, const EstimatorConfig& cfg,
                               const BandwidthGrid& grid, LepskiScale scale) {
  check_adaptive_config(cfg, grid);
  return lepski_select(compute_candidates(splits, cfg, grid), grid.cstar, cfg.log_n(), scale);
}

int adaptive_grid_size(const BandwidthGrid& grid) {
  const int base = default_grid_size(grid.candidates.back());
  return (base + 63) / 64 * 64;
}

CalibrationResult calibrate_cstar(const EstimatorConfig& cfg, const BandwidthGrid& grid,
                                  const CalibrationOptions& options) {
  require(options.reps >= 100, "calibrate_cstar: reps must be >= 100");
  require(options.cstar_lo > 0.0 && options.cstar_hi > options.cstar_lo,
          "calibrate_cstar: bad search range");
  check_adaptive_config(cfg, grid);
  const int m = options.grid_size > 0 ? options.grid_size : adaptive_grid_size(grid);
  const int splits = split_count(cfg.mode);
  const double total_n = cfg.n * splits;

  std::vector<std::vector<CandidateValue>> cached(options.reps);
  parallel_for(options.reps, [&](std::size_t rep) {
    const auto obs = simulate([](double) { return 0.0; }, total_n, cfg.sigma, m, splits,
                              derive_seed(options.seed, 0xca1, rep));
    cached[rep] = compute_candidates(obs, cfg, grid);
  });

  CalibrationResult res;
  const double decades = std::log10(options.cstar_hi / options.cstar_lo);
  const int steps = static_cast<int>(std::ceil(decades * options.points_per_decade));
  for (int k = 0; k <= steps; ++k) {
    const double cstar =
        options.cstar_lo * std::pow(10.0, static_cast<double>(k) / options.points_per_decade);
    int hits = 0;
    for (const auto& c : cached)
      if (lepski_select(c, cstar, cfg.log_n(), options.scale).index == 0) ++hits;
    const double rate = static_cast<double>(hits) / options.reps;
    res.curve.emplace_back(cstar, rate);
    if (rate >= options.target_rate) {
      res.cstar = cstar;
      res.selection_rate = rate;
      return res;
    }
  }
  std::ostringstream os;
  os << "calibrate_cstar: no C* up to " << options.cstar_hi << " selects h_max in "
     << options.target_rate * 100 << "% of " << options.reps << " pure-noise replications (best "
     << (res.curve.empty() ? 0.0 : res.curve.back().second) << ")";
  throw CalibrationError(os.str(), res.curve.empty() ? 0.0 : res.curve.back().second);
}

}  // namespace lrnorm
