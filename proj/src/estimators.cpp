#include "lrnorm/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>

#include "lrnorm/error.hpp"
#include "lrnorm/hermite.hpp"

namespace lrnorm {

namespace {

constexpr int kScratch = kMaxApproxDegree + 2;
using Scratch = std::array<double, kScratch>;

}  // namespace

std::string to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kR1: return "r1";
    case EstimatorMode::kNonEven: return "noneven";
    case EstimatorMode::kEven: return "even";
  }
  return "unknown";
}

EstimatorMode mode_for(double r) {
  if (!(r >= 1.0)) throw ModeError("estimator: r must be >= 1");
  if (r == 1.0) return EstimatorMode::kR1;
  if (r == std::floor(r) && static_cast<long>(r) % 2 == 0) return EstimatorMode::kEven;
  return EstimatorMode::kNonEven;
}

int split_count(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kR1: return 2;
    case EstimatorMode::kNonEven: return 3;
    case EstimatorMode::kEven: return 1;
  }
  return 1;
}

EstimatorConfig EstimatorConfig::defaults(double r) {
  EstimatorConfig cfg;
  cfg.r = r;
  cfg.mode = mode_for(r);
  cfg.c2 = 0.19;
  cfg.eps = 0.96;
  cfg.c1 = cfg.mode == EstimatorMode::kR1 ? 8.5 : 4.5;
  return cfg;
}

double EstimatorConfig::log_n() const { return std::log(n); }

void EstimatorConfig::derive() {
  mode = mode_for(r);
  K = n > 1.0 ? static_cast<int>(std::ceil(c2 * log_n())) : 0;
  R = mode == EstimatorMode::kNonEven ? static_cast<int>(std::floor(2.0 * r)) : 0;
}

void EstimatorConfig::validate() const {
  auto fail = [](const std::string& what) { throw ParameterError("estimator config: " + what); };
  if (mode != mode_for(r)) fail("mode does not match r");
  if (!(sigma >= 0.0)) fail("sigma >= 0 violated");
  if (!(L > 0.0)) fail("L > 0 violated");
  if (!(h > 0.0 && h <= 1.0)) fail("0 < h <= 1 violated");
  if (!(n > 1.0)) fail("n > 1 violated");
  if (M < 0 || M > kMaxKernelOrder) fail("kernel order M out of range");
  if (r > kMaxApproxDegree / 2) fail("r too large");
  if (mode == EstimatorMode::kEven) return;
  if (K != static_cast<int>(std::ceil(c2 * log_n()))) fail("K = ceil(c2 ln n) violated (call derive)");
  if (K > kMaxApproxDegree) fail("K exceeds the approximation degree cap");
  if (!(eps > 0.0 && eps < 1.0)) fail("0 < eps < 1 violated");
  if (!(4.0 * c1 * c1 >= c2)) fail("4 c1^2 >= c2 violated");
  if (mode == EstimatorMode::kR1 && !(c1 > 8.0)) fail("c1 > 8 violated");
  if (mode == EstimatorMode::kNonEven && !(c1 * c1 >= 16.0)) fail("c1^2 >= 16 violated");
  if (relax_degree_constraints) return;
  if (!(c2 * log_n() >= 1.0)) {
    std::ostringstream os;
    os << "c2 ln n >= 1 violated (c2 = " << c2 << ", ln n = " << log_n() << ")";
    fail(os.str());
  }
  if (!(7.0 * c2 * std::log(2.0) < eps)) fail("7 c2 ln 2 < eps violated");
}

std::shared_ptr<const PolyCoeffs> shared_poly(double r, int K) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, std::shared_ptr<const PolyCoeffs>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{r, K}];
  if (!slot) slot = std::make_shared<const PolyCoeffs>(best_poly_approx(r, K));
  return slot;
}

std::shared_ptr<const Kernel> shared_kernel(int M) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Kernel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[M];
  if (!slot) slot = std::make_shared<const Kernel>(make_kernel(M));
  return slot;
}

ProjectionContext make_context(const EstimatorConfig& cfg, std::shared_ptr<const Kernel> kernel) {
  return ProjectionContext::make(std::move(kernel), cfg.h, cfg.n, cfg.sigma);
}

PointwiseRule::PointwiseRule(const EstimatorConfig& cfg, double lambda, const PolyCoeffs* poly)
    : mode_(cfg.mode), r_(cfg.r), R_(cfg.R), lambda_(lambda) {
  const double root_log = std::sqrt(cfg.log_n());
  threshold_ = cfg.c1 * lambda * root_log;
  gate_ = 0.25 * cfg.c1 * lambda * root_log;
  const double inflation = std::pow(cfg.n, 2.0 * cfg.eps);
  bound_ = mode_ == EstimatorMode::kR1 ? inflation * lambda : inflation * std::pow(lambda, r_);
  if (mode_ == EstimatorMode::kEven) return;
  require(poly != nullptr, "estimator: polynomial approximation required");
  require(poly->K == cfg.K && poly->r == cfg.r,
          "estimator: polynomial degree/exponent does not match the config");
  const double A = 2.0 * threshold_;
  weights_.assign(poly->K + 1, 0.0);
  if (A > 0.0)
    for (int k = 0; k <= poly->K; ++k)
      if (poly->coeffs[k] != 0.0) weights_[k] = poly->coeffs[k] * std::pow(A, r_ - k);
}

double PointwiseRule::poly_value(double u) const {
  if (lambda_ == 0.0) return std::pow(std::abs(u), r_);
  Scratch buf;
  std::span<double> G(buf.data(), weights_.size());
  scaled_hermite_all(u, lambda_, G);
  double acc = 0.0;
  for (std::size_t k = 0; k < G.size(); ++k) acc += weights_[k] * G[k];
  return acc;
}

double PointwiseRule::centered_moment(int k, double u, double v) const {
  require(k >= 0 && k < kScratch, "centered_moment: degree out of range");
  Scratch buf;
  std::span<double> G(buf.data(), k + 1);
  scaled_hermite_all(v, lambda_, G);
  double acc = 0.0, neg_u_pow = 1.0;
  for (int j = k; j >= 0; --j) {
    acc += boost::math::binomial_coefficient<double>(k, j) * G[j] * neg_u_pow;
    neg_u_pow *= -u;
  }
  return acc;
}

double PointwiseRule::s_lambda(double u, double v) const {
  if (!(u >= gate_) || u <= 0.0) return 0.0;
  Scratch buf;
  std::span<double> G(buf.data(), R_ + 1);
  scaled_hermite_all(v, lambda_, G);
  double acc = 0.0, falling = 1.0, fact = 1.0;
  for (int k = 0; k <= R_; ++k) {
    if (k > 0) {
      falling *= r_ - (k - 1);
      fact *= k;
    }
    double inner = 0.0, neg_u_pow = 1.0;
    for (int j = k; j >= 0; --j) {
      inner += boost::math::binomial_coefficient<double>(k, j) * G[j] * neg_u_pow;
      neg_u_pow *= -u;
    }
    acc += falling / fact * std::pow(u, r_ - k) * inner;
  }
  return acc;
}

PointwiseRecord PointwiseRule::operator()(std::span<const double> f) const {
  PointwiseRecord rec;
  rec.threshold = threshold_;
  auto clamp = [&](double v) {
    if (v > bound_ || v < -bound_) rec.clamped = true;
    return std::clamp(v, -bound_, bound_);
  };
  switch (mode_) {
    case EstimatorMode::kR1:
      if (std::abs(f[1]) >= threshold_) {
        rec.regime = Regime::kSmooth;
        rec.value = std::abs(f[0]);
      } else {
        rec.regime = Regime::kPoly;
        rec.value = clamp(poly_value(f[0]));
      }
      break;
    case EstimatorMode::kNonEven:
      if (f[2] > threshold_) {
        rec.regime = Regime::kSmooth;
        rec.value = s_lambda(f[0], f[1]);
      } else if (f[2] < -threshold_) {
        rec.regime = Regime::kSmooth;
        rec.value = s_lambda(-f[0], -f[1]);
      } else {
        rec.regime = Regime::kPoly;
        rec.value = clamp(poly_value(f[0]));
      }
      break;
    case EstimatorMode::kEven: {
      const int r = static_cast<int>(r_);
      Scratch buf;
      std::span<double> G(buf.data(), r + 1);
      scaled_hermite_all(f[0], lambda_, G);
      rec.regime = Regime::kSmooth;
      rec.value = G[r];
      break;
    }
  }
  return rec;
}

std::vector<std::vector<double>> kernel_grids(const std::vector<Observation>& splits,
                                              const ProjectionContext& ctx) {
  require(!splits.empty(), "estimator: no observations");
  const int J = evaluation_grid_size(splits.front().m, ctx.h);
  std::vector<std::vector<double>> grids;
  grids.reserve(splits.size());
  for (const auto& obs : splits) grids.push_back(integrate_kernel_grid(obs, ctx, J));
  return grids;
}

EstimateResult estimate_from_grids(const std::vector<std::vector<double>>& grids,
                                   const EstimatorConfig& cfg, double lambda,
                                   const PolyCoeffs* poly, std::span<const double> lambdas) {
  require(static_cast<int>(grids.size()) == split_count(cfg.mode),
          "estimator: mode " + to_string(cfg.mode) + " needs " +
              std::to_string(split_count(cfg.mode)) + " splits, got " +
              std::to_string(grids.size()));
  const PointwiseRule rule(cfg, lambda, poly);
  const std::size_t points = grids.front().size();
  const bool local = cfg.mode == EstimatorMode::kEven && !lambdas.empty();
  require(!local || lambdas.size() == points, "estimator: one noise scale per grid point required");
  const double dx = 1.0 / static_cast<double>(points - 1);
  EstimateResult res;
  double acc = 0.0;
  std::vector<double> f(grids.size());
  for (std::size_t j = 0; j < points; ++j) {
    for (std::size_t s = 0; s < grids.size(); ++s) f[s] = grids[s][j];
    const PointwiseRecord rec = local ? PointwiseRule(cfg, lambdas[j], nullptr)(f) : rule(f);
    const double w = (j == 0 || j + 1 == points) ? 0.5 : 1.0;
    acc += w * rec.value;
    ++res.evaluations;
    if (rec.clamped) ++res.clamped;
    if (rec.regime == Regime::kPoly) ++res.poly_points;
  }
  res.integral = acc * dx;
  const double positive = std::max(0.0, res.integral);
  switch (cfg.mode) {
    case EstimatorMode::kR1: res.value = std::min(cfg.L, positive); break;
    case EstimatorMode::kNonEven: res.value = std::min(cfg.L, std::pow(positive, 1.0 / cfg.r)); break;
    case EstimatorMode::kEven: res.value = std::pow(positive, 1.0 / cfg.r); break;
  }
  return res;
}

EstimateResult run_estimator(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                             const EstimatorConfig& cfg, const PolyCoeffs* poly) {
  cfg.validate();
  require(static_cast<int>(splits.size()) == split_count(cfg.mode),
          "estimator: mode " + to_string(cfg.mode) + " needs " +
              std::to_string(split_count(cfg.mode)) + " splits, got " +
              std::to_string(splits.size()));
  const auto grids = kernel_grids(splits, ctx);
  if (cfg.mode != EstimatorMode::kEven) return estimate_from_grids(grids, cfg, ctx.lambda_h, poly);
  const int J = static_cast<int>(grids.front().size()) - 1;
  const auto lambdas = kernel_noise_grid(splits.front(), ctx, J);
  return estimate_from_grids(grids, cfg, ctx.lambda_h, poly, lambdas);
}

double estimate_l1(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                   const EstimatorConfig& cfg, const PolyCoeffs& poly) {
  if (cfg.mode != EstimatorMode::kR1) throw ModeError("estimate_l1: config mode is not r1");
  return run_estimator(splits, ctx, cfg, &poly).value;
}

double estimate_lr_noneven(const std::vector<Observation>& splits, const ProjectionContext& ctx,
                           const EstimatorConfig& cfg, const PolyCoeffs& poly) {
  if (cfg.mode != EstimatorMode::kNonEven || cfg.r == 1.0)
    throw ModeError("estimate_lr_noneven: r must be a non-even real > 1");
  return run_estimator(splits, ctx, cfg, &poly).value;
}

double estimate_lr_even(const Observation& obs, const ProjectionContext& ctx,
                        const EstimatorConfig& cfg) {
  if (cfg.mode != EstimatorMode::kEven) throw ModeError("estimate_lr_even: r must be an even integer");
  return run_estimator({obs}, ctx, cfg, nullptr).value;
}

PointwiseRecord pointwise_debug(double x, const std::vector<Observation>& splits,
                                const ProjectionContext& ctx, const EstimatorConfig& cfg,
                                const PolyCoeffs* poly) {
  cfg.validate();
  require(static_cast<int>(splits.size()) == split_count(cfg.mode),
          "pointwise_debug: wrong number of splits");
  std::vector<double> f;
  for (const auto& obs : splits) f.push_back(integrate_kernel(obs, ctx, x));
  return PointwiseRule(cfg, ctx.lambda_h, poly)(f);
}

}  // namespace lrnorm
