#include "lrnorm/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "lrnorm/error.hpp"

namespace lrnorm {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LRNORM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads) {
  const int workers = static_cast<int>(std::min<std::size_t>(worker_count(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y,
                   std::span<const double> y_se) {
  require(x.size() == y.size() && x.size() >= 2, "fit_slope: need >= 2 matched points");
  require(y_se.empty() || y_se.size() == y.size(), "fit_slope: y_se length mismatch");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  if (!(sxx > 0.0) || !std::isfinite(sxy)) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  constexpr double kZ95 = 1.959963984540054;
  if (!y_se.empty()) {
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      var += (x[i] - mx) * (x[i] - mx) * y_se[i] * y_se[i];
    fit.slope_se = std::sqrt(var) / sxx;
  }
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    fit.residual_se = std::sqrt(rss / (n - 2.0) / sxx);
    const boost::math::students_t dist(n - 2.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.residual_ci_lo = fit.slope - t * fit.residual_se;
    fit.residual_ci_hi = fit.slope + t * fit.residual_se;
  }
  if (y_se.empty()) fit.slope_se = fit.residual_se;
  fit.ci_lo = fit.slope - kZ95 * fit.slope_se;
  fit.ci_hi = fit.slope + kZ95 * fit.slope_se;
  return fit;
}

MeanSe mean_and_se(std::span<const double> v) {
  MeanSe out;
  if (v.empty()) return out;
  double m = 0.0;
  for (double a : v) m += a;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  out.mean = m;
  if (v.size() > 1) out.se = std::sqrt(ss / (v.size() - 1.0) / v.size());
  return out;
}

}  // namespace lrnorm
