#include "lrnorm/besov.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/special_functions/binomial.hpp>

#include "lrnorm/error.hpp"
#include "lrnorm/rng.hpp"

namespace lrnorm {

std::optional<double> TestSignal::exact_norm(double r) const {
  if (auto it = exact_norms.find(r); it != exact_norms.end()) return it->second;
  if (exact_norm_fn) return exact_norm_fn(r);
  return std::nullopt;
}

double symmetric_difference(const std::function<double(double)>& f, double h, int r, double x) {
  require(r >= 1, "symmetric_difference: order must be >= 1");
  require(h > 0.0, "symmetric_difference: step must be positive");
  const double half = 0.5 * r * h;
  if (x - half < 0.0 || x + half > 1.0) return 0.0;
  double acc = 0.0;
  for (int k = 0; k <= r; ++k) {
    const double c = boost::math::binomial_coefficient<double>(r, k);
    acc += ((r - k) % 2 == 0 ? c : -c) * f(x + (k - 0.5 * r) * h);
  }
  return acc;
}

namespace {

std::vector<double> geometric_grid(double top, const SmoothnessGrid& grid) {
  std::vector<double> out(grid.h_points);
  for (int k = 0; k < grid.h_points; ++k) {
    const double frac = grid.h_points > 1 ? static_cast<double>(k) / (grid.h_points - 1) : 0.0;
    out[k] = top * std::pow(grid.min_ratio, 1.0 - frac);
  }
  out.back() = top;
  return out;
}

// Trapezoid L_p norm of a sampled function on a uniform grid over [0, 1].
double grid_lp(const std::vector<double>& v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
  }
  const double dx = 1.0 / (v.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    acc += w * std::pow(std::abs(v[i]), p);
  }
  return std::pow(acc * dx, 1.0 / p);
}

}  // namespace

double difference_norm(const TestSignal& f, double h, int r, double p, const SmoothnessGrid& grid) {
  std::vector<double> v(grid.x_points + 1);
  for (int i = 0; i <= grid.x_points; ++i)
    v[i] = symmetric_difference(f.evaluator, h, r, static_cast<double>(i) / grid.x_points);
  double norm = grid_lp(v, p);
  if (std::isinf(p)) {
    // Differences of a kinked signal peak where a stencil point sits on the kink.
    for (double b : f.breakpoints)
      for (int k = 0; k <= r; ++k) {
        const double x = b - (k - 0.5 * r) * h;
        if (x >= 0.0 && x <= 1.0)
          norm = std::max(norm, std::abs(symmetric_difference(f.evaluator, h, r, x)));
      }
  }
  return norm;
}

double modulus_of_smoothness(const TestSignal& f, double t, int r, double p,
                             const SmoothnessGrid& grid) {
  require(t > 0.0 && t <= 1.0, "modulus_of_smoothness: t must lie in (0, 1]");
  require(p >= 1.0, "modulus_of_smoothness: p must be >= 1");
  double best = 0.0;
  for (double h : geometric_grid(t, grid)) best = std::max(best, difference_norm(f, h, r, p, grid));
  return best;
}

double lp_norm(const TestSignal& f, double p, const SmoothnessGrid& grid) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  std::vector<double> cuts{0.0};
  for (double b : f.breakpoints)
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  if (std::isinf(p)) {
    double m = 0.0;
    for (int i = 0; i <= grid.x_points; ++i)
      m = std::max(m, std::abs(f(static_cast<double>(i) / grid.x_points)));
    for (double c : cuts) m = std::max(m, std::abs(f(c)));
    return m;
  }
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    const int pts = std::max(8, static_cast<int>(std::ceil(grid.x_points * (b - a))));
    const double dx = (b - a) / pts;
    for (int i = 0; i <= pts; ++i) {
      const double w = (i == 0 || i == pts) ? 0.5 : 1.0;
      acc += w * dx * std::pow(std::abs(f(a + i * dx)), p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

double besov_norm_estimate(const TestSignal& f, double s, double p, const SmoothnessGrid& grid) {
  require(s > 0.0, "besov_norm_estimate: s must be positive");
  require(p >= 1.0, "besov_norm_estimate: p must be >= 1");
  const int r = static_cast<int>(std::floor(s)) + 1;
  double omega = 0.0, sup = 0.0;
  for (double t : geometric_grid(1.0, grid)) {
    omega = std::max(omega, difference_norm(f, t, r, p, grid));
    sup = std::max(sup, omega / std::pow(t, s));
  }
  return lp_norm(f, p, grid) + sup;
}

namespace {

double raw_mollifier(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

TestSignal raw_mollifier_signal(double scale) {
  TestSignal g;
  g.evaluator = [scale](double x) { return scale * raw_mollifier(x); };
  g.kind = "bump-array";
  return g;
}

}  // namespace

double BumpProfile::operator()(double x) const { return scale * raw_mollifier(x); }

double BumpProfile::norm(double r) const {
  // The profile is flat to all orders at both ends, so the trapezoid rule converges fast.
  constexpr int kPoints = 1 << 14;
  double acc = 0.0;
  for (int i = 1; i < kPoints; ++i)
    acc += std::pow(raw_mollifier(static_cast<double>(i) / kPoints), r);
  return scale * std::pow(acc / kPoints, 1.0 / r);
}

BumpProfile make_mollifier(double s, double p) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, fresh] = cache.try_emplace({s, p}, 0.0);
  if (fresh) it->second = 1.0 / besov_norm_estimate(raw_mollifier_signal(1.0), s, p);
  BumpProfile g;
  g.scale = it->second;
  g.s = s;
  g.p = p;
  return g;
}

TestSignal make_bump_array(const std::vector<double>& theta, double h, double s, double Lprime,
                           const BumpProfile& g) {
  const int N = static_cast<int>(theta.size());
  require(N >= 2, "make_bump_array: N >= 2 required (ln N must be positive)");
  require(std::abs(N * h - 1.0) < 1e-9, "make_bump_array: N h must equal 1");
  require(s > 0.0, "make_bump_array: s must be positive");
  const double lnN = std::log(static_cast<double>(N));
  const double amp = Lprime * std::sqrt(lnN) * std::pow(h, s);
  auto shared_theta = std::make_shared<const std::vector<double>>(theta);
  TestSignal f;
  f.evaluator = [shared_theta, h, amp, g, N](double t) {
    if (t < 0.0 || t > 1.0) return 0.0;
    const int i = std::min(N - 1, static_cast<int>(std::floor(t / h)));
    return amp * (*shared_theta)[i] * g((t - i * h) / h);
  };
  f.claimed_s = s;
  f.claimed_p = g.p;
  f.claimed_L = 0.0;
  f.kind = "bump-array";
  f.exact_norm_fn = [shared_theta, Lprime, g, h, s, lnN](double r) {
    double mean = 0.0;
    for (double th : *shared_theta) mean += std::pow(std::abs(th), r);
    mean /= static_cast<double>(shared_theta->size());
    return Lprime * g.norm(r) * std::pow(h, s) * std::sqrt(lnN) * std::pow(mean, 1.0 / r);
  };
  for (double r : {1.0, 2.0, 3.0}) f.exact_norms[r] = f.exact_norm_fn(r);
  return f;
}

std::vector<double> random_theta(int N, std::uint64_t seed) {
  require(N >= 2, "random_theta: N >= 2 required");
  CounterRng rng(seed, 0x7e7a);
  const double lnN = std::log(static_cast<double>(N));
  const double cap = std::min(2.0 / std::sqrt(lnN), std::sqrt(lnN));
  std::vector<double> theta(N);
  for (double& th : theta) {
    const double sign = (rng() >> 63) ? 1.0 : -1.0;
    th = sign * rng.uniform() * cap;
  }
  return theta;
}

double calibrate_lprime(const std::vector<double>& theta, double h, double s, double p, double L,
                        const BumpProfile& g) {
  const TestSignal unit = make_bump_array(theta, h, s, 1.0, g);
  SmoothnessGrid grid;
  grid.x_points = std::max(grid.x_points, static_cast<int>(std::ceil(64.0 / h)));
  grid.min_ratio = std::min(grid.min_ratio, h / 64.0);
  const double norm = besov_norm_estimate(unit, s, p, grid);
  require(norm > 0.0, "calibrate_lprime: signal is identically zero");
  return L / norm;
}

TestSignal make_constant(double c) {
  TestSignal f;
  f.evaluator = [c](double) { return c; };
  f.claimed_s = kInfinity;
  f.kind = "constant";
  f.exact_norm_fn = [c](double) { return std::abs(c); };
  for (double r : {1.0, 2.0, 3.0}) f.exact_norms[r] = std::abs(c);
  return f;
}

TestSignal make_cusp(double s) {
  require(s > 0.0, "make_cusp: exponent must be positive");
  TestSignal f;
  f.evaluator = [s](double t) { return std::pow(std::abs(t - 0.5), s); };
  f.claimed_s = s;
  f.claimed_p = kInfinity;
  f.kind = "holder-cusp";
  f.breakpoints = {0.5};
  // Integral of |t - 1/2|^{sr} over [0, 1] is 2^{-sr} / (sr + 1).
  f.exact_norm_fn = [s](double r) {
    return std::pow(std::pow(2.0, -s * r) / (s * r + 1.0), 1.0 / r);
  };
  for (double r : {1.0, 2.0, 3.0}) f.exact_norms[r] = f.exact_norm_fn(r);
  return f;
}

TestSignal make_polynomial(const std::vector<double>& coeffs) {
  require(!coeffs.empty(), "make_polynomial: need at least one coefficient");
  TestSignal f;
  f.evaluator = [coeffs](double t) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  f.claimed_s = kInfinity;
  f.kind = "piecewise-polynomial";
  return f;
}

}  // namespace lrnorm
