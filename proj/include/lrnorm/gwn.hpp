#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lrnorm/kernels.hpp"

namespace lrnorm {

/// Discretised path of dY = f dt + (sigma / sqrt(n_eff)) dB on m cells of [0, 1].
/// increments[i] is the increment over [i/m, (i+1)/m).
struct Observation {
  int m = 0;
  double dt = 0.0;
  std::vector<double> increments;
  double effective_n = 1.0;
  double sigma = 0.0;
  int split_index = 0;
  int split_count = 1;
  std::uint64_t seed = 0;

  double cell_midpoint(int i) const { return (i + 0.5) * dt; }
};

inline constexpr int kMinGridSize = 100;

inline int default_grid_size(double h) {
  return static_cast<int>(std::max(1000.0, std::ceil(10.0 / h)));
}

/// Simulates `splits` independent paths, each at noise level sigma sqrt(splits / n),
/// i.e. effective sample size n / splits. Split k draws from RNG stream k of `seed`.
std::vector<Observation> simulate(const std::function<double(double)>& f, double n, double sigma,
                                  int m, int splits, std::uint64_t seed);

/// Exact aggregation of `factor` consecutive increments; factor must divide m.
Observation coarsen(const Observation& obs, int factor);

/// Largest divisor f of obs.m that keeps the cell width at or below h / 16 and
/// leaves obs.m / f a multiple of `multiple_of` (at least 1).
int coarsening_factor(const Observation& obs, double h, int multiple_of = 1);

/// Kernel estimate at x: Sum_i w_i dY_i with w_i the cell average of (1/h) K((x - t)/h),
/// using the boundary-adapted kernel near 0 and 1.
double integrate_kernel(const Observation& obs, const ProjectionContext& ctx, double x);

/// Kernel estimate at x_j = j / J, j = 0..J. Coarsens the path first when allowed.
std::vector<double> integrate_kernel_grid(const Observation& obs, const ProjectionContext& ctx,
                                          int J, bool allow_coarsening = true);

/// Standard deviation of the noise part of integrate_kernel_grid(obs, ctx, J) at each x_j,
/// computed from the discrete weights (boundary windows included).
std::vector<double> kernel_noise_grid(const Observation& obs, const ProjectionContext& ctx, int J,
                                      bool allow_coarsening = true);
/// Evaluation grid size used by the estimators for bandwidth h on an m-cell path:
/// the smallest divisor of m that is at least min(m, max(256, 32 / h)), so that
/// evaluation points fall on cell boundaries.
int evaluation_grid_size(int m, double h);

}  // namespace lrnorm
