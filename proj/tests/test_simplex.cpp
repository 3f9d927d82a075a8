#include <doctest.h>

#include <Eigen/Dense>

#include "lrnorm/simplex.hpp"

using namespace lrnorm;

TEST_CASE("textbook maximisation with slacks") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18: optimum 36 at (2, 6).
  Eigen::MatrixXd A(3, 5);
  A << 1, 0, 1, 0, 0,
       0, 2, 0, 1, 0,
       3, 2, 0, 0, 1;
  Eigen::VectorXd b(3), c(5);
  b << 4, 12, 18;
  c << 3, 5, 0, 0, 0;
  const LPSolution s = simplex_maximize(A, b, c);
  REQUIRE(s.status == LPStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(36.0));
  CHECK(s.x(0) == doctest::Approx(2.0));
  CHECK(s.x(1) == doctest::Approx(6.0));
}

TEST_CASE("infeasible and unbounded programs") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 1,
       1, 1;
  Eigen::VectorXd b(2), c(2);
  b << 1, 2;
  c << 1, 0;
  CHECK(simplex_maximize(A, b, c).status == LPStatus::kInfeasible);

  Eigen::MatrixXd U(1, 2);
  U << 1, -1;
  Eigen::VectorXd ub(1), uc(2);
  ub << 0;
  uc << 1, 0;
  CHECK(simplex_maximize(U, ub, uc).status == LPStatus::kUnbounded);
}

TEST_CASE("redundant rows and degenerate vertices") {
  Eigen::MatrixXd A(3, 3);
  A << 1, 1, 1,
       2, 2, 2,
       1, 0, 0;
  Eigen::VectorXd b(3), c(3);
  b << 1, 2, 0;
  c << 5, 2, 1;
  const LPSolution s = simplex_maximize(A, b, c);
  REQUIRE(s.status == LPStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(2.0));
  CHECK(s.x(0) == doctest::Approx(0.0));
}
