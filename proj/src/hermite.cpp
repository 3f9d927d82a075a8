#include "lrnorm/hermite.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "lrnorm/error.hpp"

namespace lrnorm {

namespace {

std::atomic<int> g_fault_degree{-1};
std::atomic<double> g_fault_delta{0.0};

// Recurrence coefficient used to step from degree j to j + 1.
double step_coefficient(int j) {
  const int fd = g_fault_degree.load(std::memory_order_relaxed);
  if (fd >= 0 && j + 1 == fd) return j + g_fault_delta.load(std::memory_order_relaxed);
  return j;
}

void check_degree(int k, const HermiteContext& ctx) {
  require(ctx.max_degree >= 0, "HermiteContext: max_degree must be nonnegative");
  require(k >= 0 && k <= ctx.max_degree,
          "hermite: degree " + std::to_string(k) + " outside [0, " +
              std::to_string(ctx.max_degree) + "]");
}

[[noreturn]] void saturate(int k) {
  throw SaturationError("hermite: magnitude exceeded overflow guard at degree " +
                            std::to_string(k),
                        k);
}

}  // namespace

double hermite_eval(int k, double x, const HermiteContext& ctx) {
  check_degree(k, ctx);
  if (k == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - step_coefficient(j) * prev;
    prev = cur;
    cur = next;
    if (!(std::abs(cur) <= ctx.overflow_guard)) saturate(j + 1);
  }
  if (!(std::abs(cur) <= ctx.overflow_guard)) saturate(k);
  return cur;
}

double moment_estimate(int k, double x, double lambda, const HermiteContext& ctx) {
  require(lambda > 0.0, "moment_estimate: lambda must be positive");
  check_degree(k, ctx);
  // G_{j+1} = x G_j - j lambda^2 G_{j-1} with G_j = lambda^j H_j(x / lambda).
  if (k == 0) return 1.0;
  const double l2 = lambda * lambda;
  double prev = 1.0, cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - step_coefficient(j) * l2 * prev;
    prev = cur;
    cur = next;
    if (!(std::abs(cur) <= ctx.overflow_guard)) saturate(j + 1);
  }
  return cur;
}

void set_hermite_fault(int degree, double delta) {
  g_fault_delta.store(degree >= 0 ? delta : 0.0);
  g_fault_degree.store(degree);
}

void scaled_hermite_all(double x, double lambda, std::span<double> out,
                        const HermiteContext& ctx) {
  if (out.empty()) return;
  check_degree(static_cast<int>(out.size()) - 1, ctx);
  const double l2 = lambda * lambda;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    out[j + 1] = x * out[j] - static_cast<double>(j) * l2 * out[j - 1];
    if (!(std::abs(out[j + 1]) <= ctx.overflow_guard)) saturate(static_cast<int>(j + 1));
  }
}

}  // namespace lrnorm
