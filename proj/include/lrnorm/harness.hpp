#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrnorm/adapt.hpp"
#include "lrnorm/estimators.hpp"

namespace lrnorm {

enum class ExperimentMode { kRate, kAdapt, kLowerbound, kInvariants };

std::string to_string(ExperimentMode mode);
ExperimentMode experiment_mode_from_string(const std::string& s);

struct EstimatorOverrides {
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> eps;
  std::optional<double> cstar;
  std::optional<GridKind> grid;
  // Skips the degree conditions c2 ln n >= 1 and 7 c2 ln 2 < eps.
  bool relax = false;
};

/// One experiment. Keys of the flat key=value format are the CLI flag names:
/// mode, signal, r, s, p, sigma, L, n, reps, seed, out, c1, c2, eps, cstar,
/// grid, relax, smax, svalues, h, M, lnN, d.
struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kRate;
  std::string signal_spec = "bumps:auto:1";
  double r = 1.0;
  double s = 1.0;
  double p = 2.0;
  double sigma = 1.0;
  double L = 1.0;
  // Effective sample size of each split.
  std::vector<long> n_grid = {256, 512, 1024, 2048, 4096, 8192, 16384};
  int reps = 200;
  std::uint64_t seed_base = 1;
  std::string output_path;
  EstimatorOverrides overrides;
  // Fixed bandwidth; 0 selects the rate-optimal schedule for s.
  double h = 0.0;
  // Kernel order; 0 selects ceil(s) + 1 (ceil(s_max) + 1 under adaptation).
  int M = 0;
  double s_max = 2.0;
  std::vector<double> s_values = {1.0, 2.0};
  double lnN = 9.0;
  double d = 4.0;

  /// Throws ParameterError naming the violated condition.
  void validate() const;
  /// Sets one field from its key=value spelling.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_key_values() const;
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
/// Applies LRNORM_SEED, when set, to seed_base.
void apply_seed_environment(ExperimentConfig& cfg);

/// Rate-optimal bandwidth: (n ln n)^{-1/(2s+1)} for non-even r, n^{-1/(2s+1-1/r)} for even r.
double rate_bandwidth(double n, double s, double r);
/// Slope of log-risk against the rate abscissa (log(n ln n), or log n for even r).
double theoretical_slope(double s, double r);
double rate_abscissa(double n, double r);
/// Kernel order used for smoothness s.
int kernel_order_for(double s);
/// Estimator constants for a fixed-bandwidth run of `cfg` at sample size n.
EstimatorConfig estimator_config_for(const ExperimentConfig& cfg, double n, double h);
/// Path resolution for bandwidth h: default_grid_size(h) rounded up to a multiple of 64.
int rate_grid_size(double h);

struct RateRow {
  long n = 0;
  double h = 0.0;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double rmse = 0.0;
  // Standard error of rmse (delta method on the mean squared error).
  double se_error = 0.0;
  double clamp_fraction = 0.0;
  double poly_fraction = 0.0;
  int grid_size = 0;
};

struct RateReport {
  std::string mode;  // estimator mode
  std::string signal_spec;
  double r = 1.0;
  double s = 1.0;
  double sigma = 1.0;
  double L = 1.0;
  int reps = 0;
  std::uint64_t seed_base = 0;
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;
  std::pair<double, double> slope_ci{0.0, 0.0};
  double slope_se = 0.0;
  std::pair<double, double> residual_slope_ci{0.0, 0.0};
  double theoretical_slope = 0.0;
  std::string abscissa;
  bool degenerate = false;
};

RateReport run_rate_experiment(const ExperimentConfig& cfg);

struct AdaptRow {
  double s = 1.0;
  long n = 0;
  double h_oracle = 0.0;
  double cstar = 0.0;
  double truth = 0.0;
  double rmse_adaptive = 0.0;
  double rmse_oracle = 0.0;
  double ratio = 0.0;
  double mean_hhat = 0.0;
  double fallback_rate = 0.0;
  // Variance of the per-rep error difference and of two independent errors.
  double paired_variance = 0.0;
  double unpaired_variance = 0.0;
  double clamp_fraction_adaptive = 0.0;
  double clamp_fraction_oracle = 0.0;
  std::size_t candidates = 0;
};

struct AdaptReport {
  std::vector<RateReport> per_smoothness;  // adaptive arm
  std::vector<AdaptRow> rows;
  double max_ratio = 0.0;
  double eps = 0.0;
  double s_max = 0.0;
  std::string grid_kind;
};

AdaptReport run_adapt_experiment(const ExperimentConfig& cfg);

/// Desk-scale rate studies: r = 1 and r = 3 at the (n ln n) schedule, r = 2 at
/// the even schedule, all for s = 1 over n = 2^8..2^14 with 200 replications.
/// The non-even cases use c2 = 1 with the degree conditions relaxed; r = 3 runs
/// at sigma = 0.01.
std::vector<ExperimentConfig> reference_rate_scenarios();
/// Adaptation study over s in {1, 2} at n in {2^10, 2^12} with 200 paired replications,
/// c2 = 1.
ExperimentConfig reference_adapt_scenario();

/// Writes rate.csv and rate.json (adapt.csv and adapt.json) into cfg.output_path
/// when it is non-empty.
void write_rate_outputs(const RateReport& report, const std::string& dir);
void write_adapt_outputs(const AdaptReport& report, const std::string& dir);
std::string rate_csv(const RateReport& report);
std::string adapt_csv(const AdaptReport& report);

}  // namespace lrnorm
