#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace lrnorm {

/// Runs body(0..count-1) on a worker pool. Each index runs exactly once; if any
/// call throws, the exception from the lowest failing index is rethrown.
/// Worker count: `threads` if positive, else LRNORM_THREADS, else hardware concurrency.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads = 0);

int worker_count(int requested = 0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Standard error and 95% interval from the per-point standard errors.
  double slope_se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  // Same from the regression residuals (Student t).
  double residual_se = 0.0;
  double residual_ci_lo = 0.0;
  double residual_ci_hi = 0.0;
  bool degenerate = false;
};

/// Ordinary least squares of y on x. `y_se` (optional, same length) are standard
/// errors of the y values, propagated linearly into the slope.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y,
                   std::span<const double> y_se = {});

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> v);

}  // namespace lrnorm
