#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lrnorm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Signal on [0, 1] with declared smoothness and, where available, closed-form L_r norms.
struct TestSignal {
  std::function<double(double)> evaluator;
  double claimed_s = 0.0;
  double claimed_p = kInfinity;
  double claimed_L = 0.0;
  std::string kind;  // constant | piecewise-polynomial | bump-array | holder-cusp
  // Points where the signal is not smooth; quadratures split there.
  std::vector<double> breakpoints;
  // r -> ||f||_r; empty when no closed form exists.
  std::function<double(double)> exact_norm_fn;
  std::map<double, double> exact_norms;

  double operator()(double t) const { return evaluator(t); }
  std::optional<double> exact_norm(double r) const;
  bool has_exact_norm() const { return static_cast<bool>(exact_norm_fn); }
};

/// Sum_k (-1)^{r-k} C(r,k) f(x + (k - r/2) h); zero when x +- r h / 2 leaves [0, 1].
double symmetric_difference(const std::function<double(double)>& f, double h, int r, double x);

struct SmoothnessGrid {
  int h_points = 64;
  int x_points = 1 << 14;
  // Smallest scale of the geometric grids, as a fraction of the largest.
  double min_ratio = 1.0 / (1 << 14);
};

/// ||Delta_h^r f||_p on the uniform x grid (p = infinity: grid maximum, with the
/// breakpoint-aligned x values added).
double difference_norm(const TestSignal& f, double h, int r, double p,
                       const SmoothnessGrid& grid = {});

/// sup over a geometric grid of h in (0, t] (t included) of ||Delta_h^r f||_p.
double modulus_of_smoothness(const TestSignal& f, double t, int r, double p,
                             const SmoothnessGrid& grid = {});

/// ||f||_p by quadrature (trapezoid on the x grid, split at breakpoints).
double lp_norm(const TestSignal& f, double p, const SmoothnessGrid& grid = {});

/// ||f||_p + sup_t omega^{floor(s)+1}(f, t)_p / t^s over a geometric t grid in (0, 1].
/// omega is the running maximum of the difference norms over the same grid.
double besov_norm_estimate(const TestSignal& f, double s, double p,
                           const SmoothnessGrid& grid = {});

/// C-infinity profile g(x) = c exp(-1/(x(1-x))) on (0, 1), scaled so that
/// besov_norm_estimate(g, s, p) = 1. Norms ||g||_r are computed by quadrature.
struct BumpProfile {
  double scale = 1.0;
  double s = 1.0;
  double p = 2.0;
  double operator()(double x) const;
  double norm(double r) const;
};

BumpProfile make_mollifier(double s, double p);

/// f(t) = L' Sum_i theta_i sqrt(ln N) h^s g((t - t_i) / h), t_i = i h, N h = 1.
TestSignal make_bump_array(const std::vector<double>& theta, double h, double s, double Lprime,
                           const BumpProfile& g);

/// theta_i = eps_i U_i min(2 / sqrt(ln N), sqrt(ln N)) with Rademacher eps_i and uniform U_i.
std::vector<double> random_theta(int N, std::uint64_t seed);

/// Rescales a unit-L' bump array so its Besov norm estimate equals L.
double calibrate_lprime(const std::vector<double>& theta, double h, double s, double p, double L,
                        const BumpProfile& g);

TestSignal make_constant(double c);
/// |t - 1/2|^s.
TestSignal make_cusp(double s);
TestSignal make_polynomial(const std::vector<double>& coeffs);

}  // namespace lrnorm
