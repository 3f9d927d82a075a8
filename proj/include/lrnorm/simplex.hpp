#pragma once

#include <vector>

#include <Eigen/Dense>

namespace lrnorm {

enum class LPStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct SimplexOptions {
  double tolerance = 1e-10;
  long max_iterations = 500000;
};

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  std::vector<int> basis;
  long iterations = 0;
};

/// maximize c'x subject to A x = b, x >= 0. Two-phase revised simplex in
/// extended precision with the basis refactorised at every pivot.
/// Pricing is Dantzig's rule; runs of degenerate pivots fall back to Bland's
/// rule. Redundant equality rows are detected and dropped.
LPSolution simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c, const SimplexOptions& options = {});

}  // namespace lrnorm
