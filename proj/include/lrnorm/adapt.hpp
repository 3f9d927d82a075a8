#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrnorm/estimators.hpp"

namespace lrnorm {

enum class GridKind { kDyadic, kHarmonic };

/// Which bandwidth's noise scale sets the pairwise tolerance in the Lepski rule.
/// kSmaller uses lambda_{h'} for the smaller bandwidth h' of each pair; kLarger uses lambda_h.
enum class LepskiScale { kSmaller, kLarger };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& s);

struct BandwidthGrid {
  std::vector<double> candidates;  // strictly decreasing
  GridKind kind = GridKind::kDyadic;
  double h_min = 0.0;
  double h_max = 0.0;
  double s_max = 1.0;
  double cstar = 1.0;
};

/// h_min = (n ln n)^{-1}, h_max = (n ln n)^{-1/(2 s_max + 1)}. Dyadic candidates are
/// h_max 2^{-k}; harmonic candidates are every 1/j inside [h_min, h_max].
BandwidthGrid make_bandwidth_grid(double n, double s_max, GridKind kind, double cstar = 1.0);

/// Grid holding exactly one bandwidth.
BandwidthGrid single_bandwidth_grid(double h, double s_max, double cstar = 1.0);

struct CandidateValue {
  double h = 0.0;
  double T = 0.0;
  double lambda = 0.0;
  EstimateResult diagnostics;
};

/// T_h for every candidate, computed from the same splits.
std::vector<CandidateValue> compute_candidates(const std::vector<Observation>& splits,
                                               const EstimatorConfig& cfg,
                                               const BandwidthGrid& grid);

struct LepskiResult {
  double hhat = 0.0;
  std::size_t index = 0;
  double That = 0.0;
  bool fallback = false;
  std::vector<CandidateValue> per_candidate;
};

/// Largest candidate h with (T_h - T_{h'})^2 <= C* lambda^2 / ln n for all h' <= h;
/// the smallest candidate when none qualifies.
LepskiResult lepski_select(std::vector<CandidateValue> candidates, double cstar, double log_n,
                           LepskiScale scale = LepskiScale::kSmaller);

/// Throws ParameterError unless 4 r eps (2 s_max + 1) < 1 and the mode is r1 or noneven.
void check_adaptive_config(const EstimatorConfig& cfg, const BandwidthGrid& grid);

LepskiResult adaptive_estimate(const std::vector<Observation>& splits, const EstimatorConfig& cfg,
                               const BandwidthGrid& grid,
                               LepskiScale scale = LepskiScale::kSmaller);

struct CalibrationOptions {
  int reps = 200;
  std::uint64_t seed = 1;
  double target_rate = 0.95;
  double cstar_lo = 1e-2;
  double cstar_hi = 1e8;
  int points_per_decade = 8;
  int grid_size = 0;  // 0 = default_grid_size(h_min)
  LepskiScale scale = LepskiScale::kSmaller;
};

struct CalibrationResult {
  double cstar = 0.0;
  double selection_rate = 0.0;
  std::vector<std::pair<double, double>> curve;  // (C*, rate of selecting h_max)
};

/// Smallest C* on a geometric search grid for which f = 0 yields h_max in at least
/// target_rate of the replications.
CalibrationResult calibrate_cstar(const EstimatorConfig& cfg, const BandwidthGrid& grid,
                                  const CalibrationOptions& options = {});

/// Path resolution that keeps every candidate above 10 cells: a multiple of 64
/// no smaller than default_grid_size(h_min).
int adaptive_grid_size(const BandwidthGrid& grid);

}  // namespace lrnorm
