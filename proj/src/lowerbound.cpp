#include "lrnorm/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "lrnorm/error.hpp"
#include "lrnorm/simplex.hpp"

namespace lrnorm {

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double DiscreteMeasure::moment(int l) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) s += weights[i] * std::pow(support[i], l);
  return s;
}

double DiscreteMeasure::abs_moment(double a) const {
  double s = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] != 0.0 || a == 0.0) s += weights[i] * std::pow(std::abs(support[i]), a);
  return s;
}

void DiscreteMeasure::validate(double mass_tolerance) const {
  require(support.size() == weights.size(), "measure: support/weight length mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, "measure: negative weight");
    if (i > 0) require(support[i] > support[i - 1], "measure: support not strictly increasing");
  }
  require(std::abs(total_mass() - 1.0) <= mass_tolerance, "measure: mass differs from 1");
}

DiscreteMeasure DiscreteMeasure::from_atoms(std::vector<std::pair<double, double>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  DiscreteMeasure m;
  for (const auto& [x, w] : atoms) {
    if (w <= 0.0) continue;
    if (!m.support.empty() && m.support.back() == x) {
      m.weights.back() += w;
    } else {
      m.support.push_back(x);
      m.weights.push_back(w);
    }
  }
  return m;
}

MomentLPProblem MomentLPProblem::for_priors(double r, double p, double lnN, double d) {
  require(lnN > 0.0, "moment LP: lnN must be positive");
  require(d > 0.0, "moment LP: d must be positive");
  MomentLPProblem prob;
  prob.q = static_cast<int>(std::ceil(p / 2.0));
  prob.K = static_cast<int>(std::ceil(d * lnN));
  prob.interval_lo = 1.0 / (lnN * lnN);
  prob.interval_hi = 1.0;
  prob.objective_exponent = -prob.q + r / 2.0;
  return prob;
}

void MomentLPProblem::validate() const {
  require(q >= 1, "moment LP: q must be >= 1");
  require(K >= 1, "moment LP: K must be >= 1");
  require(interval_lo > 0.0 && interval_hi > interval_lo, "moment LP: need 0 < lo < hi");
  require(effective_grid_size() >= 50 * (K + q), "moment LP: grid size must be >= 50 (K + q)");
}

std::vector<double> lp_grid(const MomentLPProblem& prob) {
  const int G = prob.effective_grid_size();
  std::vector<double> t(G);
  const double mid = 0.5 * (prob.interval_lo + prob.interval_hi);
  const double half = 0.5 * (prob.interval_hi - prob.interval_lo);
  for (int g = 0; g < G; ++g) t[g] = mid - half * std::cos(std::numbers::pi * g / (G - 1));
  t.front() = prob.interval_lo;
  t.back() = prob.interval_hi;
  return t;
}

namespace {

// Row l of the constraint block: t^{-q+1} T_l(y(t)), l = 0..K+q-1.
Eigen::MatrixXd span_rows(const MomentLPProblem& prob, const std::vector<double>& t) {
  const int rows = prob.K + prob.q;
  const int G = static_cast<int>(t.size());
  Eigen::MatrixXd B(rows, G);
  for (int g = 0; g < G; ++g) {
    const double y = (2.0 * t[g] - prob.interval_lo - prob.interval_hi) /
                     (prob.interval_hi - prob.interval_lo);
    const double w = std::pow(t[g], 1 - prob.q);
    double prev = 1.0, cur = y;
    for (int l = 0; l < rows; ++l) {
      if (l == 0) {
        B(l, g) = w;
      } else if (l == 1) {
        B(l, g) = w * y;
      } else {
        const double next = 2.0 * y * cur - prev;
        prev = cur;
        cur = next;
        B(l, g) = w * cur;
      }
    }
  }
  return B;
}

}  // namespace

MomentLPSolution solve_moment_lp(const MomentLPProblem& prob) {
  prob.validate();
  const auto t = lp_grid(prob);
  const int G = static_cast<int>(t.size());
  const Eigen::MatrixXd B = span_rows(prob, t);
  const int rows = static_cast<int>(B.rows());

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows + 1, 2 * G);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows + 1);
  Eigen::VectorXd c(2 * G);
  for (int l = 0; l < rows; ++l) {
    const double scale = 1.0 / B.row(l).cwiseAbs().maxCoeff();
    A.block(l, 0, 1, G) = -scale * B.row(l);
    A.block(l, G, 1, G) = scale * B.row(l);
  }
  A.block(rows, 0, 1, G).setOnes();
  b(rows) = 1.0;
  for (int g = 0; g < G; ++g) {
    const double f = std::pow(t[g], prob.objective_exponent);
    c(g) = -f;
    c(G + g) = f;
  }

  const LPSolution lp = simplex_maximize(A, b, c);
  switch (lp.status) {
    case LPStatus::kOptimal: break;
    case LPStatus::kInfeasible: throw InternalError("moment LP: infeasible");
    case LPStatus::kUnbounded: throw InternalError("moment LP: unbounded");
    case LPStatus::kIterationLimit: throw NumericalError("moment LP: iteration limit reached");
  }
  std::vector<std::pair<double, double>> a0, a1;
  for (int g = 0; g < G; ++g) {
    if (lp.x(g) > 0.0) a0.emplace_back(t[g], lp.x(g));
    if (lp.x(G + g) > 0.0) a1.emplace_back(t[g], lp.x(G + g));
  }
  MomentLPSolution sol;
  sol.nu0 = DiscreteMeasure::from_atoms(a0);
  sol.nu1 = DiscreteMeasure::from_atoms(a1);
  for (auto* nu : {&sol.nu0, &sol.nu1}) {
    const double mass = nu->total_mass();
    if (!(mass > 0.0)) throw InternalError("moment LP: empty measure in solution");
    for (double& w : nu->weights) w /= mass;
  }
  sol.iterations = lp.iterations;
  sol.value = 0.0;
  for (std::size_t i = 0; i < sol.nu1.support.size(); ++i)
    sol.value += sol.nu1.weights[i] * std::pow(sol.nu1.support[i], prob.objective_exponent);
  for (std::size_t i = 0; i < sol.nu0.support.size(); ++i)
    sol.value -= sol.nu0.weights[i] * std::pow(sol.nu0.support[i], prob.objective_exponent);
  // Residual of the matched constraints after normalisation.
  Eigen::VectorXd x(2 * G);
  x.head(G) = lp.x.head(G) / lp.x.head(G).sum();
  x.tail(G) = lp.x.tail(G) / lp.x.tail(G).sum();
  sol.constraint_residual = (A.topRows(rows) * x).lpNorm<Eigen::Infinity>();
  return sol;
}

DiscreteMeasure tilt_measures(const DiscreteMeasure& nu, int q, double lnN) {
  require(q >= 1, "tilt: q must be >= 1");
  require(lnN > 0.0, "tilt: lnN must be positive");
  const double lo = 1.0 / (lnN * lnN);
  std::vector<std::pair<double, double>> atoms;
  double tilted = 0.0;
  for (std::size_t i = 0; i < nu.support.size(); ++i) {
    const double x = nu.support[i];
    if (x < lo * (1.0 - 1e-12) || x > 1.0 + 1e-12)
      throw ParameterError("tilt: support point " + std::to_string(x) + " outside [1/lnN^2, 1]");
    const double w = nu.weights[i] * std::pow(lnN * lnN * x, -q);
    tilted += w;
    atoms.emplace_back(x, w);
  }
  const double zero_mass = 1.0 - tilted;
  if (zero_mass < -1e-12) throw ParameterError("tilt: negative mass at zero");
  if (zero_mass > 0.0) atoms.emplace_back(0.0, zero_mass);
  return DiscreteMeasure::from_atoms(std::move(atoms));
}

DiscreteMeasure symmetrize_scale(const DiscreteMeasure& nu_tilde, double lnN) {
  require(lnN > 0.0, "symmetrize: lnN must be positive");
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t i = 0; i < nu_tilde.support.size(); ++i) {
    const double x = nu_tilde.support[i];
    require(x >= 0.0 && x <= 1.0 + 1e-12, "symmetrize: support must lie in [0, 1]");
    const double w = nu_tilde.weights[i];
    if (x == 0.0) {
      atoms.emplace_back(0.0, w);
    } else {
      const double y = std::sqrt(x * lnN);
      atoms.emplace_back(-y, 0.5 * w);
      atoms.emplace_back(y, 0.5 * w);
    }
  }
  return DiscreteMeasure::from_atoms(std::move(atoms));
}

bool PriorPair::moment_match_ok(double tol) const {
  for (double v : moment_residuals)
    if (!(v <= tol)) return false;
  return true;
}

bool PriorPair::moment_bound_ok(double rel) const {
  const double limit = p_moment_limit * (1.0 + rel);
  return p_moment_bounds.first <= limit && p_moment_bounds.second <= limit;
}

bool PriorPair::support_ok() const {
  const double bound = std::sqrt(lnN) * (1.0 + 1e-12);
  for (const auto* mu : {&mu0, &mu1})
    if (!mu->support.empty() && (mu->support.front() < -bound || mu->support.back() > bound))
      return false;
  return true;
}

PriorPair build_prior_pair(double r, double p, double lnN, double d, int grid_size) {
  require(r >= 1.0, "prior pair: r must be >= 1");
  require(!(r == std::floor(r) && static_cast<long>(r) % 2 == 0), "prior pair: r must be non-even");
  require(std::isfinite(p) && p >= r, "prior pair: need finite p >= r");
  PriorPair pp;
  pp.r = r;
  pp.p = p;
  pp.lnN = lnN;
  pp.d = d;
  MomentLPProblem prob = MomentLPProblem::for_priors(r, p, lnN, d);
  prob.grid_size = grid_size;
  require(prob.q >= r / 2.0, "prior pair: q = ceil(p/2) must be >= r/2");
  pp.q = prob.q;
  pp.K = prob.K;
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const ParameterError& e) {
      throw ParameterError(std::string(name) + ": " + e.what());
    } catch (const InternalError& e) {
      throw InternalError(std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(name) + ": " + e.what(), e.residual());
    }
  };
  pp.lp = stage("solve_moment_lp", [&] { return solve_moment_lp(prob); });
  pp.nu0_tilde = stage("tilt_measures", [&] { return tilt_measures(pp.lp.nu0, pp.q, lnN); });
  pp.nu1_tilde = stage("tilt_measures", [&] { return tilt_measures(pp.lp.nu1, pp.q, lnN); });
  pp.mu0 = stage("symmetrize_scale", [&] { return symmetrize_scale(pp.nu0_tilde, lnN); });
  pp.mu1 = stage("symmetrize_scale", [&] { return symmetrize_scale(pp.nu1_tilde, lnN); });

  pp.separation = pp.mu1.abs_moment(r) - pp.mu0.abs_moment(r);
  const double root = std::sqrt(lnN);
  pp.moment_residuals.resize(pp.K + 1);
  for (int l = 0; l <= pp.K; ++l) {
    double diff = 0.0;
    for (std::size_t i = 0; i < pp.mu1.support.size(); ++i)
      diff += pp.mu1.weights[i] * std::pow(pp.mu1.support[i] / root, l);
    for (std::size_t i = 0; i < pp.mu0.support.size(); ++i)
      diff -= pp.mu0.weights[i] * std::pow(pp.mu0.support[i] / root, l);
    pp.moment_residuals[l] = std::abs(diff);
  }
  pp.p_moment_bounds = {pp.mu0.abs_moment(p), pp.mu1.abs_moment(p)};
  pp.p_moment_limit = std::pow(lnN, -p / 2.0);
  return pp;
}

long double chi2_bound(double alpha, double d, long N) {
  require(alpha > 0.0, "chi2_bound: alpha must be positive");
  require(d > 0.0, "chi2_bound: d must be positive");
  require(N >= 2, "chi2_bound: N must be >= 2");
  const long double lnN = std::log(static_cast<long double>(N));
  const long double a = alpha;
  // log of e^{3 a^2 lnN / 2} (a e lnN / (d lnN))^{d lnN}
  const long double log_inner =
      1.5L * a * a * lnN + d * lnN * std::log(a * std::numbers::e_v<long double> * lnN / (d * lnN));
  const long double log_one_plus =
      N * (log_inner > 60.0L ? log_inner + std::log1p(std::exp(-log_inner))
                             : std::log1p(std::exp(log_inner)));
  return std::expm1(log_one_plus);
}

TvBound tv_bound_from_chi2(long double chi2) {
  TvBound tv;
  tv.chi2 = chi2;
  tv.log_gap = -std::numbers::ln2_v<long double> - chi2;
  tv.tv = static_cast<double>(1.0L - 0.5L * std::exp(-chi2));
  return tv;
}

}  // namespace lrnorm
