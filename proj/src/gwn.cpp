#include "lrnorm/gwn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrnorm/error.hpp"
#include "lrnorm/rng.hpp"

namespace lrnorm {

std::vector<Observation> simulate(const std::function<double(double)>& f, double n, double sigma,
                                  int m, int splits, std::uint64_t seed) {
  require(m >= kMinGridSize, "simulate: grid size m must be >= " + std::to_string(kMinGridSize));
  require(splits >= 1 && splits <= 3, "simulate: splits must be 1, 2 or 3");
  require(n >= splits, "simulate: n must be >= splits");
  require(sigma >= 0.0, "simulate: sigma must be nonnegative");
  const double dt = 1.0 / m;
  std::vector<double> drift(m);
  for (int i = 0; i < m; ++i) drift[i] = f((i + 0.5) * dt) * dt;
  const double scale = sigma * std::sqrt(splits / n) * std::sqrt(dt);
  std::vector<Observation> out(splits);
  for (int k = 0; k < splits; ++k) {
    Observation& o = out[k];
    o.m = m;
    o.dt = dt;
    o.effective_n = n / splits;
    o.sigma = sigma;
    o.split_index = k;
    o.split_count = splits;
    o.seed = seed;
    o.increments = drift;
    if (sigma > 0.0) {
      CounterRng rng(seed, static_cast<std::uint64_t>(k));
      for (double& y : o.increments) y += scale * rng.normal();
    }
  }
  return out;
}

Observation coarsen(const Observation& obs, int factor) {
  require(factor >= 1 && obs.m % factor == 0, "coarsen: factor must divide m");
  if (factor == 1) return obs;
  Observation c = obs;
  c.m = obs.m / factor;
  c.dt = 1.0 / c.m;
  c.increments.assign(c.m, 0.0);
  for (int i = 0; i < obs.m; ++i) c.increments[i / factor] += obs.increments[i];
  return c;
}

int coarsening_factor(const Observation& obs, double h, int multiple_of) {
  const int cap = static_cast<int>(std::floor(h / 16.0 / obs.dt + 1e-9));
  for (int f = std::min(cap, obs.m / kMinGridSize); f > 1; --f)
    if (obs.m % f == 0 && (obs.m / f) % multiple_of == 0) return f;
  return 1;
}

namespace {

void check_resolution(const Observation& obs, double h) {
  if (obs.dt > h / 10.0 * (1.0 + 1e-12))
    throw ResolutionError("kernel estimate: cell width " + std::to_string(obs.dt) +
                          " exceeds h/10 = " + std::to_string(h / 10.0));
}

double estimate_at(const Observation& obs, const KernelShape& shape, double h, double x) {
  // Cells meeting t in [x - h hi, x - h lo].
  const double t_lo = x - h * shape.hi();
  const double t_hi = x - h * shape.lo();
  const int i0 = std::max(0, static_cast<int>(std::floor(t_lo / obs.dt)));
  const int i1 = std::min(obs.m, static_cast<int>(std::ceil(t_hi / obs.dt)));
  double acc = 0.0;
  double g_prev = shape.antiderivative((x - i0 * obs.dt) / h);
  for (int i = i0; i < i1; ++i) {
    const double g_next = shape.antiderivative((x - (i + 1) * obs.dt) / h);
    acc += (g_prev - g_next) * obs.increments[i];
    g_prev = g_next;
  }
  return acc / obs.dt;
}

// Sum_i w_i^2 dt for the cell weights w_i used by estimate_at.
double weight_energy(const Observation& obs, const KernelShape& shape, double h, double x) {
  const double t_lo = x - h * shape.hi();
  const double t_hi = x - h * shape.lo();
  const int i0 = std::max(0, static_cast<int>(std::floor(t_lo / obs.dt)));
  const int i1 = std::min(obs.m, static_cast<int>(std::ceil(t_hi / obs.dt)));
  double acc = 0.0;
  double g_prev = shape.antiderivative((x - i0 * obs.dt) / h);
  for (int i = i0; i < i1; ++i) {
    const double g_next = shape.antiderivative((x - (i + 1) * obs.dt) / h);
    acc += (g_prev - g_next) * (g_prev - g_next);
    g_prev = g_next;
  }
  return acc / obs.dt;
}

const Observation& grid_path(const Observation& obs, const ProjectionContext& ctx, int J,
                             bool allow_coarsening, Observation& storage) {
  const int align = obs.m % J == 0 ? J : 1;
  const int factor = allow_coarsening ? coarsening_factor(obs, ctx.h, align) : 1;
  if (factor == 1) return obs;
  storage = coarsen(obs, factor);
  return storage;
}

}  // namespace

double integrate_kernel(const Observation& obs, const ProjectionContext& ctx, double x) {
  require(x >= 0.0 && x <= 1.0, "integrate_kernel: x must lie in [0, 1]");
  check_resolution(obs, ctx.h);
  return estimate_at(obs, ctx.kernel->window(x, ctx.h), ctx.h, x);
}

std::vector<double> integrate_kernel_grid(const Observation& obs, const ProjectionContext& ctx,
                                          int J, bool allow_coarsening) {
  require(J >= 1, "integrate_kernel_grid: J must be >= 1");
  check_resolution(obs, ctx.h);
  Observation storage;
  const Observation& path = grid_path(obs, ctx, J, allow_coarsening, storage);
  std::vector<double> out(J + 1);
  if (path.m % J != 0) {
    for (int j = 0; j <= J; ++j) {
      const double x = static_cast<double>(j) / J;
      out[j] = estimate_at(path, ctx.kernel->window(x, ctx.h), ctx.h, x);
    }
    return out;
  }
  // Evaluation points sit on cell boundaries, so every interior point shares
  // one weight vector: cell c - d gets w[d + D - 1] for x at boundary c.
  const int q = path.m / J;
  const double h = ctx.h, dt = path.dt;
  const KernelShape& shape = ctx.kernel->interior;
  const int D = static_cast<int>(std::ceil(0.5 * h / dt)) + 1;
  std::vector<double> w(2 * D);
  for (int d = 1 - D; d <= D; ++d)
    w[d + D - 1] = (shape.antiderivative(d * dt / h) - shape.antiderivative((d - 1) * dt / h)) / dt;
  for (int j = 0; j <= J; ++j) {
    const double x = static_cast<double>(j) / J;
    const int c = j * q;
    if (x - 0.5 * h < 0.0 || x + 0.5 * h > 1.0 || c - D < 0 || c + D > path.m) {
      out[j] = estimate_at(path, ctx.kernel->window(x, h), h, x);
      continue;
    }
    double acc = 0.0;
    for (int d = 1 - D; d <= D; ++d) acc += w[d + D - 1] * path.increments[c - d];
    out[j] = acc;
  }
  return out;
}

std::vector<double> kernel_noise_grid(const Observation& obs, const ProjectionContext& ctx, int J,
                                      bool allow_coarsening) {
  require(J >= 1, "kernel_noise_grid: J must be >= 1");
  check_resolution(obs, ctx.h);
  Observation storage;
  const Observation& path = grid_path(obs, ctx, J, allow_coarsening, storage);
  const double scale = path.sigma / std::sqrt(path.effective_n);
  const double h = ctx.h;
  double interior = -1.0;
  std::vector<double> out(J + 1);
  for (int j = 0; j <= J; ++j) {
    const double x = static_cast<double>(j) / J;
    const KernelShape shape = ctx.kernel->window(x, h);
    const bool inside = x - 0.5 * h >= 0.0 && x + 0.5 * h <= 1.0;
    if (inside && interior >= 0.0) {
      out[j] = interior;
      continue;
    }
    out[j] = scale * std::sqrt(weight_energy(path, shape, h, x));
    if (inside && path.m % J == 0) interior = out[j];
  }
  return out;
}

int evaluation_grid_size(int m, double h) {
  const int target = std::min(m, std::max(256, static_cast<int>(std::ceil(32.0 / h))));
  for (int J = target; J < m; ++J)
    if (m % J == 0) return J;
  return m;
}

}  // namespace lrnorm
