#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace lrnorm {

inline constexpr int kMaxKernelOrder = 10;

/// Reproducing kernel of polynomials of degree <= M on a window [lo, hi]
/// containing 0, stored as a Legendre series in z = (2v - lo - hi) / (hi - lo):
///   K(v) = Sum_j alpha_j P_j(z),   alpha_j = (2j+1) P_j(z(0)) / (hi - lo).
/// Integrating K(v) p(v) over the window returns p(0) for every such p.
class KernelShape {
 public:
  KernelShape() = default;
  KernelShape(int order, double lo, double hi);

  double operator()(double v) const;
  /// Integral of K from lo to min(max(v, lo), hi).
  double antiderivative(double v) const;
  double l2_norm() const { return l2_norm_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int order() const { return static_cast<int>(alpha_.size()) - 1; }
  const std::vector<double>& legendre_coeffs() const { return alpha_; }

 private:
  double lo_ = -0.5;
  double hi_ = 0.5;
  std::vector<double> alpha_;
  double l2_norm_ = 0.0;
};

/// Order-M kernel K_M on [-1/2, 1/2] and its boundary family.
struct Kernel {
  int M = 0;
  // phi_j(0) for the orthonormal Legendre basis phi_j(u) = sqrt(2j+1) P_j(2u).
  std::vector<double> interior_coeffs;
  double l2_norm = 1.0;
  KernelShape interior;

  /// One-sided (or two-sided) variant on the truncated support [lo, hi].
  KernelShape boundary_variant(double lo, double hi) const { return KernelShape(M, lo, hi); }
  /// Shape used at point x for bandwidth h: support clipped so that x - h v stays in [0, 1].
  KernelShape window(double x, double h) const;
};

Kernel make_kernel(int M);

double lambda_h(double sigma, double n, double h, double kernel_l2);

struct ProjectionContext {
  double h = 1.0;
  double n = 1.0;
  double sigma = 1.0;
  double lambda_h = 0.0;
  std::shared_ptr<const Kernel> kernel;

  static ProjectionContext make(std::shared_ptr<const Kernel> kernel, double h, double n,
                                double sigma);
};

/// Signal sampled at the nodes k / (size-1), k = 0..size-1, of [0, 1].
struct GridSignal {
  std::vector<double> values;

  static GridSignal sample(const std::function<double(double)>& f, int intervals);
  double spacing() const { return 1.0 / static_cast<double>(values.size() - 1); }
  /// Cubic Lagrange interpolation through the four nearest nodes.
  double interpolate(double t) const;
};

/// f_h(x) = Integral f(u) (1/h) K((x-u)/h) du for a sampled signal.
double project(const GridSignal& f, const ProjectionContext& ctx, double x);

/// Same projection for an analytic signal; `breakpoints` are points of
/// non-smoothness that the quadrature must not straddle.
double project(const std::function<double(double)>& f, const ProjectionContext& ctx, double x,
               std::span<const double> breakpoints = {});

}  // namespace lrnorm
