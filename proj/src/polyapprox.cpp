#include "lrnorm/polyapprox.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lrnorm/error.hpp"

namespace lrnorm {

namespace {

bool is_even_integer(double r) {
  return r == std::floor(r) && std::fmod(r, 2.0) == 0.0;
}

// Sum_j a[j] T_{2j}(u) evaluated as Sum_j a[j] T_j(2u^2 - 1).
double even_cheb_sum(const std::vector<double>& a, double u) {
  const double y = 2.0 * u * u - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = a.size(); j-- > 1;) {
    const double b0 = 2.0 * y * b1 - b2 + a[j];
    b2 = b1;
    b1 = b0;
  }
  return y * b1 - b2 + a[0];
}

double cheb_t(int k, double u) {
  if (std::abs(u) <= 1.0) return std::cos(k * std::acos(u));
  double t0 = 1.0, t1 = u;
  if (k == 0) return t0;
  for (int i = 1; i < k; ++i) {
    const double t2 = 2.0 * u * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

struct Extremum {
  double u;
  double err;
};

// Golden-section maximisation of sign * err on [lo, hi].
template <class Err>
Extremum refine(const Err& err, double lo, double hi, double sign) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = sign * err(c), fd = sign * err(d);
  for (int it = 0; it < 80 && (b - a) > 1e-15; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = sign * err(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = sign * err(d);
    }
  }
  Extremum best{lo, err(lo)};
  for (double u : {hi, c, d}) {
    const double e = err(u);
    if (sign * e > sign * best.err) best = {u, e};
  }
  return best;
}

PolyCoeffs exact_even_power(double r, int K) {
  PolyCoeffs p;
  p.r = r;
  p.K = K;
  p.coeffs.assign(K + 1, 0.0);
  p.coeffs[static_cast<std::size_t>(r)] = 1.0;
  p.cheb_coeffs = monomial_to_chebyshev(p.coeffs);
  p.cheb_coeffs.resize(K + 1, 0.0);
  p.exact = true;
  return p;
}

}  // namespace

std::vector<double> chebyshev_to_monomial(const std::vector<double>& cheb) {
  const std::size_t n = cheb.size();
  std::vector<long double> out(n, 0.0L);
  std::vector<long double> t_prev(n, 0.0L), t_cur(n, 0.0L), t_next(n, 0.0L);
  if (n == 0) return {};
  t_prev[0] = 1.0L;
  out[0] += cheb[0];
  if (n > 1) {
    t_cur[1] = 1.0L;
    out[1] += cheb[1];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    std::fill(t_next.begin(), t_next.end(), 0.0L);
    for (std::size_t i = 0; i + 1 < n; ++i) t_next[i + 1] += 2.0L * t_cur[i];
    for (std::size_t i = 0; i < n; ++i) t_next[i] -= t_prev[i];
    for (std::size_t i = 0; i < n; ++i) out[i] += cheb[k + 1] * t_next[i];
    std::swap(t_prev, t_cur);
    std::swap(t_cur, t_next);
  }
  return {out.begin(), out.end()};
}

std::vector<double> monomial_to_chebyshev(const std::vector<double>& monomial) {
  // u^n = 2^{1-n} Sum_{k<=n/2} C(n,k) T_{n-2k}, with the T_0 term halved.
  const std::size_t n = monomial.size();
  std::vector<long double> out(n, 0.0L);
  for (std::size_t p = 0; p < n; ++p) {
    if (monomial[p] == 0.0) continue;
    long double binom = 1.0L;
    const long double scale = std::ldexp(1.0L, 1 - static_cast<int>(p));
    for (std::size_t k = 0; 2 * k <= p; ++k) {
      if (k > 0) binom = binom * static_cast<long double>(p - k + 1) / static_cast<long double>(k);
      long double term = scale * binom;
      if (2 * k == p) term *= 0.5L;
      out[p - 2 * k] += monomial[p] * term;
    }
  }
  return {out.begin(), out.end()};
}

PolyCoeffs best_poly_approx(double r, int K, const RemezOptions& options) {
  require(r > 0.0 && std::isfinite(r), "best_poly_approx: r must be a positive real");
  require(K >= 0 && K <= kMaxApproxDegree,
          "best_poly_approx: degree must lie in [0, " + std::to_string(kMaxApproxDegree) + "]");

  if (is_even_integer(r) && K >= static_cast<int>(r)) return exact_even_power(r, K);

  // |u|^r is even, so the best approximant is even: P(u) = Sum_j a_j T_{2j}(u).
  // Work on [0, 1] with m+2 reference points.
  const int m = K / 2;
  const int nref = m + 2;
  auto target = [r](double u) { return std::pow(std::abs(u), r); };

  std::vector<double> ref(nref);
  for (int i = 0; i < nref; ++i) ref[i] = std::cos(i * std::numbers::pi / (2.0 * (m + 1)));
  std::reverse(ref.begin(), ref.end());
  ref.front() = 0.0;
  ref.back() = 1.0;

  const int ngrid = 64 * nref + 1000;
  std::vector<double> grid(ngrid + 1);
  for (int k = 0; k <= ngrid; ++k) grid[k] = std::sin(std::numbers::pi * k / (2.0 * ngrid));
  grid.front() = 0.0;
  grid.back() = 1.0;

  std::vector<double> a(m + 1, 0.0);
  std::vector<Extremum> extrema;
  double levelled = 0.0, spread = 1.0, best_spread = 1.0;
  int stalls = 0;
  int iter = 0;
  bool converged = false;

  for (iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::MatrixXd sys(nref, nref);
    Eigen::VectorXd rhs(nref);
    for (int i = 0; i < nref; ++i) {
      for (int j = 0; j <= m; ++j) sys(i, j) = cheb_t(2 * j, ref[i]);
      sys(i, m + 1) = (i % 2 == 0) ? 1.0 : -1.0;
      rhs(i) = target(ref[i]);
    }
    const Eigen::VectorXd sol = sys.fullPivLu().solve(rhs);
    for (int j = 0; j <= m; ++j) a[j] = sol(j);
    levelled = std::abs(sol(m + 1));

    auto err = [&](double u) { return target(u) - even_cheb_sum(a, u); };

    // One extremum per maximal run of constant sign.
    std::vector<double> e(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) e[k] = err(grid[k]);
    extrema.clear();
    std::size_t k = 0;
    while (k < grid.size()) {
      const double sign = e[k] >= 0.0 ? 1.0 : -1.0;
      std::size_t best = k;
      std::size_t j = k;
      while (j < grid.size() && (e[j] >= 0.0 ? 1.0 : -1.0) == sign) {
        if (std::abs(e[j]) > std::abs(e[best])) best = j;
        ++j;
      }
      const double lo = grid[best == 0 ? 0 : best - 1];
      const double hi = grid[std::min(best + 1, grid.size() - 1)];
      Extremum ex = refine(err, lo, hi, sign);
      if (sign * ex.err < sign * e[best]) ex = {grid[best], e[best]};
      extrema.push_back(ex);
      k = j;
    }
    if (static_cast<int>(extrema.size()) < nref) {
      std::vector<double> last(a.begin(), a.end());
      throw NumericalError("best_poly_approx: exchange lost alternation (" +
                               std::to_string(extrema.size()) + " extrema, need " +
                               std::to_string(nref) + ")",
                           spread, std::move(last));
    }
    while (static_cast<int>(extrema.size()) > nref) {
      if (std::abs(extrema.front().err) < std::abs(extrema.back().err))
        extrema.erase(extrema.begin());
      else
        extrema.pop_back();
    }

    double emax = 0.0, emin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nref; ++i) {
      ref[i] = extrema[i].u;
      emax = std::max(emax, std::abs(extrema[i].err));
      emin = std::min(emin, std::abs(extrema[i].err));
    }
    spread = emax > 0.0 ? (emax - emin) / emax : 0.0;
    if (spread < options.tolerance) {
      converged = true;
      break;
    }
    if (spread < best_spread * 0.999) {
      best_spread = spread;
      stalls = 0;
    } else if (++stalls >= 5 &&
               best_spread < std::max(options.stall_tolerance,
                                      256.0 * std::numeric_limits<double>::epsilon() / levelled)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::vector<double> last(a.begin(), a.end());
    throw NumericalError("best_poly_approx: Remez exchange did not converge", spread,
                         std::move(last));
  }

  PolyCoeffs p;
  p.r = r;
  p.K = K;
  p.iterations = iter;
  p.levelled_error = levelled;
  p.levelled_spread = spread;
  p.cheb_coeffs.assign(K + 1, 0.0);
  for (int j = 0; j <= m; ++j) p.cheb_coeffs[2 * j] = a[j];
  p.coeffs = chebyshev_to_monomial(p.cheb_coeffs);
  for (int k2 = 1; k2 <= K; k2 += 2) p.coeffs[k2] = 0.0;

  double sup = 0.0;
  for (const auto& ex : extrema) sup = std::max(sup, std::abs(ex.err));
  p.sup_error = sup;

  for (auto it = extrema.rbegin(); it != extrema.rend(); ++it)
    if (it->u > 0.0) p.alternation_points.push_back(-it->u);
  for (const auto& ex : extrema) p.alternation_points.push_back(ex.u);
  return p;
}

double eval_poly(const PolyCoeffs& p, double u) {
  if (std::abs(u) <= 1.0 && !p.cheb_coeffs.empty()) {
    // Odd Chebyshev coefficients are zero; evaluating in u^2 keeps P exactly even.
    std::vector<double> even((p.cheb_coeffs.size() + 1) / 2);
    for (std::size_t j = 0; j < even.size(); ++j) even[j] = p.cheb_coeffs[2 * j];
    return even_cheb_sum(even, u);
  }
  double acc = 0.0;
  for (std::size_t k = p.coeffs.size(); k-- > 0;) acc = acc * u + p.coeffs[k];
  return acc;
}

}  // namespace lrnorm
