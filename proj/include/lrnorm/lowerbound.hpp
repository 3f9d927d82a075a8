#pragma once

#include <utility>
#include <vector>

namespace lrnorm {

struct DiscreteMeasure {
  std::vector<double> support;  // strictly increasing
  std::vector<double> weights;  // nonnegative, summing to 1

  double total_mass() const;
  /// Integral of t^l.
  double moment(int l) const;
  /// Integral of |t|^a.
  double abs_moment(double a) const;
  /// Throws ParameterError if the invariants fail.
  void validate(double mass_tolerance = 1e-12) const;
  /// Sorts atoms, merges duplicates and drops zero weights.
  static DiscreteMeasure from_atoms(std::vector<std::pair<double, double>> atoms);
};

/// Discretised dual of the best approximation of t^{objective_exponent} on
/// [interval_lo, interval_hi] by span{t^{-q+1}, ..., t^K}.
struct MomentLPProblem {
  int q = 1;
  int K = 1;
  double interval_lo = 0.01;
  double interval_hi = 1.0;
  int grid_size = 0;  // 0 = 50 (K + q)
  double objective_exponent = -0.5;

  /// q = ceil(p/2), K = ceil(d lnN), I = [1/lnN^2, 1], exponent -q + r/2.
  static MomentLPProblem for_priors(double r, double p, double lnN, double d);
  int effective_grid_size() const { return grid_size > 0 ? grid_size : 50 * (K + q); }
  void validate() const;
};

struct MomentLPSolution {
  DiscreteMeasure nu0;
  DiscreteMeasure nu1;
  // max Integral f d(nu1 - nu0) = 2 E_{q-1,K}(f; I) on the grid.
  double value = 0.0;
  long iterations = 0;
  // Largest violation of the matched constraints, in the equilibrated basis.
  double constraint_residual = 0.0;
};

/// Chebyshev-Lobatto points on [lo, hi].
std::vector<double> lp_grid(const MomentLPProblem& prob);

MomentLPSolution solve_moment_lp(const MomentLPProblem& prob);

/// nu~ = [1 - E(1 / (lnN^2 X)^q)] delta_0 + (lnN^2 x)^{-q} nu(dx).
DiscreteMeasure tilt_measures(const DiscreteMeasure& nu, int q, double lnN);

/// Law of eps sqrt(X lnN) with X ~ nu_tilde and eps uniform on {-1, +1}.
DiscreteMeasure symmetrize_scale(const DiscreteMeasure& nu_tilde, double lnN);

struct PriorPair {
  double r = 1.0;
  double p = 2.0;
  double lnN = 1.0;
  double d = 4.0;
  int q = 1;
  int K = 1;
  MomentLPSolution lp;
  DiscreteMeasure nu0_tilde, nu1_tilde;
  DiscreteMeasure mu0, mu1;
  double separation = 0.0;
  // |Integral t^l d(mu1 - mu0)| / lnN^{l/2}, l = 0..K (moments of the priors rescaled to [-1, 1]).
  std::vector<double> moment_residuals;
  std::pair<double, double> p_moment_bounds;
  double p_moment_limit = 0.0;  // lnN^{-p/2}

  bool moment_match_ok(double tol = 1e-8) const;
  bool separation_ok() const { return separation > 0.0; }
  /// Both p-th absolute moments within lnN^{-p/2}, up to relative rounding `rel`.
  bool moment_bound_ok(double rel = 1e-12) const;
  bool support_ok() const;
};

PriorPair build_prior_pair(double r, double p, double lnN, double d = 4.0, int grid_size = 0);

/// (1 + e^{3 a^2 lnN / 2} (a e lnN / (d lnN))^{d lnN})^N - 1, evaluated in log space.
long double chi2_bound(double alpha, double d, long N);

struct TvBound {
  long double chi2 = 0.0L;
  // ln(1 - TV) for TV <= 1 - exp(-chi2) / 2; finite whenever chi2 is.
  long double log_gap = 0.0L;
  double tv = 0.0;
};

TvBound tv_bound_from_chi2(long double chi2);

}  // namespace lrnorm
