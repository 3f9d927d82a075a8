#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrnorm/error.hpp"
#include "lrnorm/polyapprox.hpp"
#include "oracles.hpp"

using namespace lrnorm;

namespace {

std::vector<double> error_on_grid(const PolyCoeffs& p, int points) {
  std::vector<double> e(points);
  for (int i = 0; i < points; ++i) {
    const double u = -1.0 + 2.0 * i / (points - 1);
    e[i] = std::pow(std::abs(u), p.r) - eval_poly(p, u);
  }
  return e;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("constant approximation is the midrange") {
  for (double r : {1.0, 1.5, 3.0}) {
    const PolyCoeffs p = best_poly_approx(r, 0);
    CHECK(p.coeffs.size() == 1);
    CHECK(p.coeffs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.sup_error == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("quadratic approximation of |u|") {
  const PolyCoeffs p = best_poly_approx(1.0, 2);
  REQUIRE(p.coeffs.size() == 3);
  CHECK(p.coeffs[0] == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(std::abs(p.coeffs[1]) == 0.0);
  CHECK(p.coeffs[2] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.sup_error == doctest::Approx(oracle::closed_form_minimax(1.0, 2)).epsilon(1e-10));
  CHECK(eval_poly(p, 0.0) == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("quadratic approximation of |u|^3 matches the tangent-chord construction") {
  const PolyCoeffs p = best_poly_approx(3.0, 2);
  CHECK(p.sup_error == doctest::Approx(oracle::closed_form_minimax(3.0, 2)).epsilon(1e-10));
}

TEST_CASE("even exponent within degree is exact") {
  const PolyCoeffs p = best_poly_approx(2.0, 2);
  CHECK(p.sup_error <= 1e-12);
  CHECK(p.exact);
  CHECK(eval_poly(p, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
  const PolyCoeffs q = best_poly_approx(4.0, 6);
  CHECK(q.sup_error <= 1e-12);
}

TEST_CASE("value at zero is the constant term") {
  for (double r : {1.0, 1.5, 3.0}) {
    const PolyCoeffs p = best_poly_approx(r, 8);
    CHECK(eval_poly(p, 0.0) == doctest::Approx(p.coeffs[0]).epsilon(1e-12));
  }
}

TEST_CASE("odd coefficients vanish") {
  const PolyCoeffs p = best_poly_approx(1.5, 12);
  for (std::size_t k = 1; k < p.coeffs.size(); k += 2) CHECK(p.coeffs[k] == 0.0);
  for (std::size_t k = 1; k < p.cheb_coeffs.size(); k += 2) CHECK(p.cheb_coeffs[k] == 0.0);
}

TEST_CASE("reported sup error matches a dense grid and equioscillates") {
  for (double r : {1.0, 1.5, 3.0}) {
    for (int K : {4, 8, 16}) {
      CAPTURE(r);
      CAPTURE(K);
      const PolyCoeffs p = best_poly_approx(r, K);
      const auto e = error_on_grid(p, 100001);
      CHECK(sup_abs(e) == doctest::Approx(p.sup_error).epsilon(1e-6));
      CHECK(oracle::alternations(e, 1e-6) >= K + 2);
      CHECK(p.levelled_spread < 1e-9);
    }
  }
}

TEST_CASE("low degree errors agree with a discrete exchange on a fine grid") {
  // |u|^r on [-1, 1] by even polynomials is t^{r/2} on [0, 1] by polynomials in t = u^2.
  const auto grid = oracle::lobatto(0.0, 1.0, 20001);
  for (double r : {1.0, 1.5, 3.0}) {
    for (int K : {0, 2}) {
      CAPTURE(r);
      CAPTURE(K);
      const double ref = oracle::discrete_minimax(1, K / 2, r / 2.0, grid);
      CHECK(best_poly_approx(r, K).sup_error == doctest::Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("error decays like K^-r") {
  const double beta = 0.280169499;
  double previous_gap = 1.0;
  for (int K : {25, 50, 100}) {
    const double scaled = best_poly_approx(1.0, K).sup_error * K;
    const double gap = std::abs(scaled - beta);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
  const double v100 = best_poly_approx(1.0, 100).sup_error * 100;
  CHECK(v100 >= 0.27);
  CHECK(v100 <= 0.30);
}

TEST_CASE("coefficients stay below 2^{3K}") {
  for (double r : {1.0, 1.5, 3.0}) {
    for (int K = 0; K <= 30; K += 2) {
      const PolyCoeffs p = best_poly_approx(r, K);
      for (double g : p.coeffs) CHECK(std::abs(g) <= std::ldexp(1.0, 3 * K));
    }
  }
}

TEST_CASE("basis conversions round trip") {
  const std::vector<double> mono = {0.3, -1.0, 2.5, 0.0, -0.75, 1.25};
  const auto back = chebyshev_to_monomial(monomial_to_chebyshev(mono));
  REQUIRE(back.size() == mono.size());
  for (std::size_t i = 0; i < mono.size(); ++i) CHECK(back[i] == doctest::Approx(mono[i]).epsilon(1e-12));
  // T_2 = 2u^2 - 1.
  const auto cheb = monomial_to_chebyshev({-1.0, 0.0, 2.0});
  CHECK(cheb[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cheb[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid arguments are parameter errors") {
  CHECK_THROWS_AS(best_poly_approx(1.0, kMaxApproxDegree + 2), ParameterError);
  CHECK_THROWS_AS(best_poly_approx(1.0, -1), ParameterError);
}

TEST_CASE("iteration cap raises a numerical error with the last iterate") {
  RemezOptions opt;
  opt.max_iterations = 1;
  opt.stall_tolerance = 0.0;
  opt.tolerance = 1e-15;
  try {
    best_poly_approx(1.0, 40, opt);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(!e.last_iterate().empty());
    CHECK(e.residual() > 0.0);
  }
}
