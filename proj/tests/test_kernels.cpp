#include <doctest.h>

#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss.hpp>

#include "lrnorm/error.hpp"
#include "lrnorm/kernels.hpp"

using namespace lrnorm;
using boost::math::quadrature::gauss;

namespace {

// Integral of u^k (1/h) K_x((x - u)/h) du, by Gauss-Legendre over the window.
double projected_monomial(const Kernel& k, double x, double h, int degree) {
  const KernelShape w = k.window(x, h);
  return gauss<double, 30>::integrate(
      [&](double v) { return std::pow(x - h * v, degree) * w(v); }, w.lo(), w.hi());
}

}  // namespace

TEST_CASE("order zero and one kernels are the box") {
  for (int M : {0, 1}) {
    const Kernel k = make_kernel(M);
    CHECK(k.l2_norm == doctest::Approx(1.0).epsilon(1e-14));
    for (double v : {-0.49, -0.2, 0.0, 0.3, 0.49}) CHECK(k.interior(v) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("order two kernel moments") {
  const Kernel k = make_kernel(2);
  auto moment = [&](int j) {
    return gauss<double, 20>::integrate([&](double u) { return std::pow(u, j) * k.interior(u); },
                                        -0.5, 0.5);
  };
  CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(moment(1)) <= 1e-10);
  CHECK(std::abs(moment(2)) <= 1e-10);
  const double l2 = std::sqrt(gauss<double, 20>::integrate(
      [&](double u) { return k.interior(u) * k.interior(u); }, -0.5, 0.5));
  CHECK(k.l2_norm == doctest::Approx(l2).epsilon(1e-12));
}

TEST_CASE("monomials are reproduced at interior and boundary points") {
  for (int M : {1, 2, 3}) {
    const Kernel k = make_kernel(M);
    const double h = 0.1;
    for (int i = 0; i < 50; ++i) {
      const double x = i / 49.0;
      for (int d = 0; d <= M; ++d) {
        CAPTURE(M);
        CAPTURE(x);
        CAPTURE(d);
        CHECK(std::abs(projected_monomial(k, x, h, d) - std::pow(x, d)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("boundary window antiderivative spans the unit mass") {
  const Kernel k = make_kernel(3);
  const KernelShape w = k.window(0.02, 0.1);
  CHECK(w.lo() == doctest::Approx(-0.5));
  CHECK(w.hi() == doctest::Approx(0.2));
  CHECK(w.antiderivative(w.hi()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.antiderivative(w.lo() - 1.0) == 0.0);
}

TEST_CASE("lambda_h arithmetic") {
  CHECK(lambda_h(1.0, 100.0, 0.01, 1.0) == doctest::Approx(1.0));
  CHECK(lambda_h(2.0, 100.0, 0.01, 1.0) == doctest::Approx(2.0));
  CHECK(lambda_h(1.0, 400.0, 0.01, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(lambda_h(-1.0, 100.0, 0.1, 1.0), ParameterError);
}

TEST_CASE("projection of sampled and analytic signals") {
  auto kernel = std::make_shared<const Kernel>(make_kernel(2));
  const auto ctx = ProjectionContext::make(kernel, 0.1, 1000.0, 1.0);
  const auto c = GridSignal::sample([](double) { return 0.7; }, 1000);
  const auto lin = GridSignal::sample([](double t) { return t; }, 1000);
  const auto zero = GridSignal::sample([](double) { return 0.0; }, 1000);
  for (double x : {0.0, 0.3, 0.5, 0.97}) {
    CHECK(project(c, ctx, x) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(std::abs(project(lin, ctx, x) - x) <= 1e-8);
    CHECK(project(zero, ctx, x) == 0.0);
    CHECK(std::abs(project([](double t) { return t * t; }, ctx, x) - x * x) <= 1e-8);
  }
}

TEST_CASE("coarse signal grid is a resolution error") {
  auto kernel = std::make_shared<const Kernel>(make_kernel(1));
  const auto ctx = ProjectionContext::make(kernel, 0.01, 1000.0, 1.0);
  const auto coarse = GridSignal::sample([](double t) { return t; }, 10);
  CHECK_THROWS_AS(project(coarse, ctx, 0.5), ResolutionError);
}

TEST_CASE("order cap") {
  CHECK_THROWS_AS(make_kernel(kMaxKernelOrder + 1), ParameterError);
}
