#include <doctest.h>

#include <cmath>
#include <vector>

#include "lrnorm/error.hpp"
#include "lrnorm/lowerbound.hpp"
#include "oracles.hpp"

using namespace lrnorm;

TEST_CASE("LP value is twice the discrete minimax error") {
  for (int q = 1; q <= 3; ++q) {
    for (int K = 1; K + q <= 6; ++K) {
      MomentLPProblem prob;
      prob.q = q;
      prob.K = K;
      prob.interval_lo = 0.01;
      prob.interval_hi = 1.0;
      prob.objective_exponent = -q + 0.5;
      const auto sol = solve_moment_lp(prob);
      const double ref = oracle::discrete_minimax(q, K, prob.objective_exponent, lp_grid(prob));
      CAPTURE(q);
      CAPTURE(K);
      CHECK(sol.value == doctest::Approx(2.0 * ref).epsilon(1e-4));
      CHECK(sol.nu0.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sol.nu1.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("objective in the matched span has value zero") {
  MomentLPProblem prob;
  prob.q = 1;
  prob.K = 3;
  prob.objective_exponent = 2.0;
  CHECK(std::abs(solve_moment_lp(prob).value) <= 1e-9);
}

TEST_CASE("tilting") {
  const double lnN = 9.0;
  const auto at_left = DiscreteMeasure::from_atoms({{1.0 / (lnN * lnN), 1.0}});
  const auto t1 = tilt_measures(at_left, 1, lnN);
  REQUIRE(t1.support.size() == 1);
  CHECK(t1.support[0] == doctest::Approx(1.0 / (lnN * lnN)));
  CHECK(t1.weights[0] == doctest::Approx(1.0));
  for (int q : {1, 2}) {
    const auto t2 = tilt_measures(DiscreteMeasure::from_atoms({{1.0, 1.0}}), q, lnN);
    REQUIRE(t2.support.size() == 2);
    CHECK(t2.support[0] == 0.0);
    CHECK(t2.weights[0] == doctest::Approx(1.0 - std::pow(lnN, -2.0 * q)));
    CHECK(t2.total_mass() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(tilt_measures(DiscreteMeasure::from_atoms({{1e-4, 1.0}}), 1, lnN), ParameterError);
}

TEST_CASE("symmetrisation") {
  const double lnN = 9.0;
  const auto zero = symmetrize_scale(DiscreteMeasure::from_atoms({{0.0, 1.0}}), lnN);
  REQUIRE(zero.support.size() == 1);
  CHECK(zero.support[0] == 0.0);
  const auto one = symmetrize_scale(DiscreteMeasure::from_atoms({{1.0, 1.0}}), lnN);
  REQUIRE(one.support.size() == 2);
  CHECK(one.support[0] == doctest::Approx(-3.0));
  CHECK(one.support[1] == doctest::Approx(3.0));
  CHECK(one.weights[0] == doctest::Approx(0.5));
}

TEST_CASE("prior pairs satisfy the three conditions") {
  for (auto [r, p] : {std::pair{1.0, 2.0}, std::pair{3.0, 4.0}}) {
    const PriorPair pp = build_prior_pair(r, p, 9.0);
    CAPTURE(r);
    for (double res : pp.moment_residuals) CHECK(res <= 1e-8);
    CHECK(pp.separation > 0.0);
    CHECK(pp.moment_bound_ok());
    CHECK(pp.support_ok());
    CHECK(pp.mu0.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pp.mu1.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("chi-square bound") {
  const long double a = chi2_bound(1.0, 2.0, 100);
  const long double b = chi2_bound(1.0, 4.0, 100);
  const long double c = chi2_bound(1.0, 8.0, 100);
  CHECK(std::isfinite(static_cast<double>(c)));
  CHECK(a > b);
  CHECK(b > c);
  CHECK(chi2_bound(1e-8, 4.0, 100) <= 1e-12L);
  const TvBound tv = tv_bound_from_chi2(b);
  CHECK(tv.log_gap < 0.0L);
  CHECK(tv.tv <= 1.0);
  const TvBound small = tv_bound_from_chi2(0.01L);
  CHECK(small.tv == doctest::Approx(1.0 - std::exp(-0.01) / 2.0));
}

TEST_CASE("invalid problems") {
  MomentLPProblem prob;
  prob.q = 0;
  CHECK_THROWS_AS(prob.validate(), ParameterError);
  prob.q = 1;
  prob.interval_lo = 0.0;
  CHECK_THROWS_AS(prob.validate(), ParameterError);
}
