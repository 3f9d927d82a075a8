#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lrnorm/gwn.hpp"
#include "lrnorm/kernels.hpp"
#include "lrnorm/polyapprox.hpp"

namespace lrnorm {

enum class EstimatorMode { kR1, kNonEven, kEven };

std::string to_string(EstimatorMode mode);
/// r = 1 -> kR1, even integer r >= 2 -> kEven, other r > 1 -> kNonEven; r < 1 throws ModeError.
EstimatorMode mode_for(double r);
/// Independent observation copies the mode consumes (2, 3 or 1).
int split_count(EstimatorMode mode);

struct EstimatorConfig {
  double r = 1.0;
  double sigma = 1.0;
  double L = 1.0;
  double c1 = 8.5;
  double c2 = 0.19;
  double eps = 0.96;
  double h = 0.1;
  // Effective sample size of each split.
  double n = 256.0;
  // Kernel order; must exceed ceil(s).
  int M = 2;
  // Derived by derive().
  int K = 0;
  int R = 0;
  EstimatorMode mode = EstimatorMode::kR1;
  // Skips c2 ln n >= 1 and 7 c2 ln 2 < eps (needed for small eps under adaptation).
  bool relax_degree_constraints = false;

  /// Default constants for exponent r.
  static EstimatorConfig defaults(double r);
  void derive();
  /// Throws ParameterError naming the first violated inequality.
  void validate() const;
  double log_n() const;
};

/// Shared, lazily built best approximation of |u|^r of degree K.
std::shared_ptr<const PolyCoeffs> shared_poly(double r, int K);

ProjectionContext make_context(const EstimatorConfig& cfg, std::shared_ptr<const Kernel> kernel);
std::shared_ptr<const Kernel> shared_kernel(int M);

enum class Regime { kSmooth, kPoly };

struct PointwiseRecord {
  Regime regime = Regime::kPoly;
  double value = 0.0;
  double threshold = 0.0;
  bool clamped = false;
};

/// Pointwise rule T_h(x) for a fixed (cfg, lambda_h). Inputs are the kernel
/// estimates of the splits at one x.
class PointwiseRule {
 public:
  PointwiseRule(const EstimatorConfig& cfg, double lambda, const PolyCoeffs* poly);

  PointwiseRecord operator()(std::span<const double> f) const;

  double threshold() const { return threshold_; }
  double clamp_bound() const { return bound_; }
  /// Poly-regime polynomial before clamping.
  double poly_value(double u) const;
  /// Taylor-Hermite smooth-regime value S_lambda(u, v), gated at u >= (c1/4) lambda sqrt(ln n).
  double s_lambda(double u, double v) const;
  /// Inner Hermite sum: unbiased for (mu - u)^k when v ~ Normal(mu, lambda^2).
  double centered_moment(int k, double u, double v) const;

 private:
  EstimatorMode mode_;
  double r_;
  int R_;
  double lambda_;
  double threshold_;
  double gate_;
  double bound_;
  std::vector<double> weights_;  // g_k A^{r-k}
};

struct EstimateResult {
  double value = 0.0;
  double integral = 0.0;
  long evaluations = 0;
  long clamped = 0;
  long poly_points = 0;
};

/// Kernel estimates of each split on x_j = j / J.
std::vector<std::vector<double>> kernel_grids(const std::vector<Observation>& splits,
                                              const ProjectionContext& ctx);

/// Integrates the pointwise rule over precomputed grids and applies the final clamp.
/// For even r, `lambdas` (one per grid point, e.g. from kernel_noise_grid) replaces
/// lambda so that each point is corrected by its own noise scale.
EstimateResult estimate_from_grids(const std::vector<std::vector<double>>& grids,
                                   const EstimatorConfig& cfg, double lambda,
                                   const PolyCoeffs* poly, std::span<const double> lambdas = {});

/// Dispatches on cfg.mode; `poly` is ignored for even r, which uses the
/// per-point noise scale of kernel_noise_grid.
EstimateResult run_estimator(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                             const EstimatorConfig& cfg, const PolyCoeffs* poly);

double estimate_l1(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                   const EstimatorConfig& cfg, const PolyCoeffs& poly);
double estimate_lr_noneven(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                           const EstimatorConfig& cfg, const PolyCoeffs& poly);
double estimate_lr_even(const Observation& obs, const ProjectionContext& ctx,
                        const EstimatorConfig& cfg);

PointwiseRecord pointwise_debug(double x, const std::vector<Observation>& splits,
                                const ProjectionContext& ctx, const EstimatorConfig& cfg,
                                const PolyCoeffs* poly);

}  // namespace lrnorm
