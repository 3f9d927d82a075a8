#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lrnorm/besov.hpp"
#include "lrnorm/error.hpp"
#include "lrnorm/signal_spec.hpp"

using namespace lrnorm;
using boost::math::quadrature::gauss_kronrod;

namespace {

double quad_norm(const TestSignal& f, double r, int pieces) {
  double acc = 0.0;
  for (int i = 0; i < pieces; ++i) {
    const double a = static_cast<double>(i) / pieces, b = static_cast<double>(i + 1) / pieces;
    acc += gauss_kronrod<double, 61>::integrate(
        [&](double t) { return std::pow(std::abs(f(t)), r); }, a, b, 15, 1e-14);
  }
  return std::pow(acc, 1.0 / r);
}

}  // namespace

TEST_CASE("symmetric differences") {
  const auto c = [](double) { return 3.0; };
  const auto lin = [](double t) { return t; };
  const auto sq = [](double t) { return t * t; };
  const double h = 0.05;
  CHECK(symmetric_difference(c, h, 1, 0.5) == doctest::Approx(0.0));
  CHECK(symmetric_difference(c, h, 3, 0.5) == doctest::Approx(0.0));
  CHECK(std::abs(symmetric_difference(lin, h, 2, 0.4)) <= 1e-15);
  CHECK(symmetric_difference(sq, h, 2, 0.4) == doctest::Approx(2 * h * h).epsilon(1e-10));
  CHECK(symmetric_difference(sq, h, 2, 0.01) == 0.0);
}

TEST_CASE("modulus of smoothness") {
  const TestSignal c = make_constant(2.0);
  CHECK(modulus_of_smoothness(c, 0.1, 1, 2.0) == doctest::Approx(0.0));
  const TestSignal cusp = make_cusp(0.5);
  const double t = 0.01;
  const double w = modulus_of_smoothness(cusp, t, 1, kInfinity);
  CHECK(w >= 0.9 * std::sqrt(t));
  CHECK(w <= 1.1 * std::sqrt(t));
  const TestSignal poly = make_polynomial({0.0, 1.0, -2.0, 0.5});
  double previous = 0.0;
  for (double tt : {0.01, 0.05, 0.1, 0.3}) {
    const double v = modulus_of_smoothness(poly, tt, 2, 2.0);
    CHECK(v >= previous);
    previous = v;
  }
}

TEST_CASE("Besov norm of constants") {
  CHECK(besov_norm_estimate(make_constant(0.0), 1.0, 2.0) == doctest::Approx(0.0));
  CHECK(besov_norm_estimate(make_constant(1.5), 1.0, 2.0) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("closed form norms of the test signals agree with quadrature") {
  const TestSignal cusp = make_cusp(0.7);
  for (double r : {1.0, 2.0, 3.0}) CHECK(*cusp.exact_norm(r) == doctest::Approx(quad_norm(cusp, r, 2)).epsilon(1e-8));

  const BumpProfile g = make_mollifier(1.0, 2.0);
  const std::vector<double> ones(4, 1.0);
  const TestSignal bumps = make_bump_array(ones, 0.25, 1.0, 1.0, g);
  for (double r : {1.0, 2.0, 3.0}) CHECK(*bumps.exact_norm(r) == doctest::Approx(quad_norm(bumps, r, 4)).epsilon(1e-6));

  const auto theta = random_theta(16, 5);
  const TestSignal random = make_bump_array(theta, 1.0 / 16, 2.0, 0.8, make_mollifier(2.0, 2.0));
  for (double r : {1.0, 2.5}) CHECK(*random.exact_norm(r) == doctest::Approx(quad_norm(random, r, 16)).epsilon(1e-6));
}

TEST_CASE("mollifier is normalised and bump arrays scale linearly") {
  const BumpProfile g = make_mollifier(1.0, 2.0);
  CHECK(besov_norm_estimate(make_bump_array({1.0, 1.0}, 0.5, 1.0, 1.0, g), 1.0, 2.0) > 0.0);
  const auto theta = random_theta(8, 2);
  const double a = besov_norm_estimate(make_bump_array(theta, 0.125, 1.0, 1.0, g), 1.0, 2.0);
  const double b = besov_norm_estimate(make_bump_array(theta, 0.125, 1.0, 3.0, g), 1.0, 2.0);
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-10));
  const double lp = calibrate_lprime(theta, 0.125, 1.0, 2.0, 1.0, g);
  SmoothnessGrid grid;
  grid.x_points = std::max(grid.x_points, 512);
  grid.min_ratio = std::min(grid.min_ratio, 0.125 / 64.0);
  CHECK(besov_norm_estimate(make_bump_array(theta, 0.125, 1.0, lp, g), 1.0, 2.0, grid) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Besov norm estimate is stable under grid refinement") {
  const auto theta = random_theta(8, 3);
  const TestSignal f = make_bump_array(theta, 0.125, 1.0, 1.0, make_mollifier(1.0, 2.0));
  SmoothnessGrid coarse;
  SmoothnessGrid fine;
  fine.x_points = coarse.x_points * 2;
  fine.h_points = coarse.h_points * 2;
  CHECK(besov_norm_estimate(f, 1.0, 2.0, fine) == doctest::Approx(besov_norm_estimate(f, 1.0, 2.0, coarse)).epsilon(0.05));
}

TEST_CASE("random theta respects the constraint set") {
  const int N = 32;
  const auto theta = random_theta(N, 9);
  const double cap = std::min(2.0 / std::sqrt(std::log(N)), std::sqrt(std::log(N)));
  for (double t : theta) CHECK(std::abs(t) <= cap);
  CHECK(random_theta(N, 9) == theta);
}

TEST_CASE("bump array errors") {
  const BumpProfile g = make_mollifier(1.0, 2.0);
  CHECK_THROWS_AS(make_bump_array({1.0}, 1.0, 1.0, 1.0, g), ParameterError);
  CHECK_THROWS_AS(make_bump_array({1.0, 1.0, 1.0}, 0.25, 1.0, 1.0, g), ParameterError);
  const TestSignal zero = make_bump_array({0.0, 0.0}, 0.5, 1.0, 1.0, g);
  CHECK(*zero.exact_norm(1.0) == 0.0);
  CHECK(zero(0.3) == 0.0);
}

TEST_CASE("signal specs") {
  const TestSignal c = parse_signal("const:2.5");
  CHECK(c(0.3) == 2.5);
  CHECK(*c.exact_norm(3.0) == doctest::Approx(2.5));
  const TestSignal cusp = parse_signal("cusp:0.5");
  CHECK(cusp(0.75) == doctest::Approx(0.5));
  const TestSignal poly = parse_signal("poly:1,0,2");
  CHECK(poly(0.5) == doctest::Approx(1.5));
  CHECK(!poly.has_exact_norm());
  SignalContext ctx;
  ctx.s = 1.0;
  ctx.p = 2.0;
  ctx.L = 1.0;
  const TestSignal bumps = parse_signal("bumps:8:3", ctx);
  CHECK(bumps.kind == "bump-array");
  CHECK(bumps.has_exact_norm());
  CHECK(signal_depends_on_bandwidth("bumps:auto:1"));
  CHECK(!signal_depends_on_bandwidth("bumps:8:1"));
  ctx.h = 0.125;
  CHECK(parse_signal("bumps:auto:3", ctx)(0.3) == doctest::Approx(bumps(0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(parse_signal("wiggle:3"), ParameterError);
  CHECK_THROWS_AS(parse_signal("const:abc"), ParameterError);
  CHECK_THROWS_AS(parse_signal("bumps:1:3", ctx), ParameterError);
}
