#pragma once

#include <vector>

namespace lrnorm {

// Degree cap for best_poly_approx. 2^{3K} still fits a double far beyond this.
inline constexpr int kMaxApproxDegree = 128;

/// Best uniform approximation of u -> |u|^r on [-1, 1] by a degree-K polynomial.
///
/// `coeffs` holds the monomial coefficients g[0..K] consumed by the
/// estimators; `cheb_coeffs` holds the same polynomial in the Chebyshev basis
/// T_0..T_K and is what eval_poly uses on [-1, 1]. Odd entries of both are
/// exactly zero. Immutable once built.
struct PolyCoeffs {
  double r = 1.0;
  int K = 0;
  std::vector<double> coeffs;
  std::vector<double> cheb_coeffs;
  double sup_error = 0.0;
  std::vector<double> alternation_points;
  // Levelled error |E| of the last exchange and its relative spread.
  double levelled_error = 0.0;
  double levelled_spread = 0.0;
  int iterations = 0;
  bool exact = false;
};

struct RemezOptions {
  double tolerance = 1e-12;
  int max_iterations = 100;
  // Spread accepted once the exchange stops improving (double-precision floor).
  double stall_tolerance = 1e-9;
};

PolyCoeffs best_poly_approx(double r, int K, const RemezOptions& options = {});

/// Sum_k g[k] u^k; Clenshaw on the Chebyshev form for |u| <= 1, Horner otherwise.
double eval_poly(const PolyCoeffs& p, double u);

/// Chebyshev coefficients (T_0..T_n) of a polynomial given by monomial coefficients.
std::vector<double> monomial_to_chebyshev(const std::vector<double>& monomial);
/// Monomial coefficients of a polynomial given in the Chebyshev basis.
std::vector<double> chebyshev_to_monomial(const std::vector<double>& cheb);

}  // namespace lrnorm
