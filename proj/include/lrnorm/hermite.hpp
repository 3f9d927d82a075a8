#pragma once

#include <span>
#include <vector>

namespace lrnorm {

/// Limits applied by the Hermite evaluators.
struct HermiteContext {
  int max_degree = 128;
  // |H_k| beyond this is reported as saturation instead of returned.
  double overflow_guard = 1e300;
};

/// Probabilists' Hermite polynomial H_k(x) by the three-term recurrence
/// H_{k+1} = x H_k - k H_{k-1}.
double hermite_eval(int k, double x, const HermiteContext& ctx = {});

/// lambda^k H_k(x / lambda). Unbiased for mu^k when x ~ Normal(mu, lambda^2).
double moment_estimate(int k, double x, double lambda, const HermiteContext& ctx = {});

/// Test hook: adds `delta` to the recurrence coefficient that produces H_degree
/// in hermite_eval and moment_estimate. A negative degree removes the fault.
void set_hermite_fault(int degree, double delta);

/// Fills out[j] = lambda^j H_j(x / lambda) for j = 0..out.size()-1.
/// lambda = 0 is allowed and yields x^j.
void scaled_hermite_all(double x, double lambda, std::span<double> out,
                        const HermiteContext& ctx = {});

}  // namespace lrnorm
