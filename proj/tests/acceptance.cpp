// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "lrnorm/adapt.hpp"
#include "lrnorm/estimators.hpp"
#include "lrnorm/gwn.hpp"
#include "lrnorm/harness.hpp"
#include "lrnorm/hermite.hpp"
#include "lrnorm/invariants.hpp"
#include "lrnorm/kernels.hpp"
#include "lrnorm/lowerbound.hpp"
#include "lrnorm/polyapprox.hpp"
#include "oracles.hpp"

using namespace lrnorm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Outcome bernstein() {
  const double beta = 0.280169499;
  Outcome o{true, ""};
  double previous_gap = 1.0, v100 = 0.0, t100 = 0.0;
  for (int K : {25, 50, 100}) {
    const auto t0 = Clock::now();
    const double v = best_poly_approx(1.0, K).sup_error * K;
    if (K == 100) {
      t100 = seconds_since(t0);
      v100 = v;
    }
    const double gap = std::abs(v - beta);
    o.pass = o.pass && gap < previous_gap;
    previous_gap = gap;
    o.detail += "K=" + std::to_string(K) + ":" + num(v) + " ";
  }
  o.pass = o.pass && v100 >= 0.27 && v100 <= 0.30 && t100 < 5.0;
  o.detail += "runtime(K=100)=" + num(t100) + " s";
  return o;
}

Outcome exact_even() {
  const double e = best_poly_approx(2.0, 2).sup_error;
  return {e <= 1e-12, "supError=" + num(e)};
}

Outcome equioscillation() {
  Outcome o{true, ""};
  int fewest_extra = 1 << 20;
  double worst_spread = 0.0;
  for (double r : {1.0, 1.5, 3.0}) {
    for (int K : {4, 8, 16}) {
      const PolyCoeffs p = best_poly_approx(r, K);
      std::vector<double> e(100001);
      for (std::size_t i = 0; i < e.size(); ++i) {
        const double u = -1.0 + 2.0 * static_cast<double>(i) / (e.size() - 1);
        e[i] = std::pow(std::abs(u), r) - eval_poly(p, u);
      }
      const int alt = oracle::alternations(e, 1e-6);
      fewest_extra = std::min(fewest_extra, alt - (K + 2));
      worst_spread = std::max(worst_spread, p.levelled_spread);
      o.pass = o.pass && alt >= K + 2 && p.levelled_spread < 1e-9;
    }
  }
  o.detail = "min(alternations - (K+2))=" + std::to_string(fewest_extra) +
             " max spread=" + num(worst_spread);
  return o;
}

Outcome coefficient_bound() {
  double worst = 0.0;
  for (double r : {1.0, 1.5, 3.0})
    for (int K = 0; K <= 30; ++K)
      for (double g : best_poly_approx(r, K).coeffs)
        worst = std::max(worst, std::abs(g) / std::ldexp(1.0, 3 * K));
  return {worst <= 1.0, "max |g_k| / 2^{3K}=" + num(worst)};
}

Outcome hermite_unbiased() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::uint64_t seed = 100;
  for (double mu : {0.0, 0.5, 1.5}) {
    for (double lambda : {0.5, 1.0}) {
      const auto z = oracle::normals(seed++, 1000000);
      std::vector<double> v(z.size());
      for (int k = 0; k <= 10; ++k) {
        for (std::size_t i = 0; i < z.size(); ++i) v[i] = moment_estimate(k, mu + lambda * z[i], lambda);
        const auto ms = oracle::mean_se(v);
        const double dev = ms.se > 0 ? std::abs(ms.mean - std::pow(mu, k)) / ms.se
                                     : (ms.mean == std::pow(mu, k) ? 0.0 : INFINITY);
        worst = std::max(worst, dev);
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 4.0 && t < 30.0, "max |mean - mu^k| / SE=" + num(worst) + " runtime=" + num(t) + " s"};
}

Outcome hermite_second_moment() {
  double worst = 0.0;
  std::uint64_t seed = 200;
  for (int M : {2, 3}) {
    for (double mu : {0.0, 0.5 * M, 1.0 * M, -1.0 * M}) {
      const auto z = oracle::normals(seed++, 1000000);
      for (int k = 0; k <= M * M; ++k) {
        long double acc = 0.0L;
        for (double zi : z) {
          const double h = hermite_eval(k, mu + zi);
          acc += static_cast<long double>(h) * h;
        }
        const double m2 = static_cast<double>(acc / z.size());
        worst = std::max(worst, m2 / std::pow(2.0 * M * M, k));
      }
    }
  }
  return {worst <= 1.0, "max E[H_k^2] / (2M^2)^k=" + num(worst)};
}

Outcome kernel_reproduction() {
  using boost::math::quadrature::gauss;
  double worst_quad = 0.0, worst_project = 0.0;
  const double h = 0.1;
  for (int M : {1, 2, 3}) {
    const Kernel k = make_kernel(M);
    const auto ctx = ProjectionContext::make(std::make_shared<const Kernel>(k), h, 1000.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double x = i / 49.0;
      const KernelShape w = k.window(x, h);
      for (int d = 0; d <= M; ++d) {
        const double q = gauss<double, 30>::integrate(
            [&](double v) { return std::pow(x - h * v, d) * w(v); }, w.lo(), w.hi());
        worst_quad = std::max(worst_quad, std::abs(q - std::pow(x, d)));
        const double p = project([d](double t) { return std::pow(t, d); }, ctx, x);
        worst_project = std::max(worst_project, std::abs(p - std::pow(x, d)));
      }
    }
  }
  return {worst_quad <= 1e-8 && worst_project <= 1e-8,
          "max error (Gauss oracle)=" + num(worst_quad) + " (project)=" + num(worst_project)};
}

Outcome noise_geometry() {
  const double n = 1000.0, h = 0.1;
  const auto ctx = ProjectionContext::make(std::make_shared<const Kernel>(make_kernel(2)), h, n, 1.0);
  std::vector<double> a, b;
  for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
    const auto obs = simulate([](double) { return 0.0; }, n, 1.0, 1000, 1, seed)[0];
    a.push_back(integrate_kernel(obs, ctx, 0.4));
    b.push_back(integrate_kernel(obs, ctx, 0.4 + 2.0 * h));
  }
  double saa = 0, sbb = 0, sab = 0, ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  const double sd = std::sqrt(saa / (a.size() - 1));
  const double rel = std::abs(sd / ctx.lambda_h - 1.0);
  const double corr = sab / std::sqrt(saa * sbb);
  return {rel <= 0.05 && std::abs(corr) <= 0.02,
          "|sd/lambda_h - 1|=" + num(rel) + " corr(2h)=" + num(corr)};
}

Outcome even_closed_form() {
  double worst = 0.0;
  const double lambda = 0.7;
  std::uint64_t seed = 300;
  for (int r : {2, 4}) {
    EstimatorConfig cfg = EstimatorConfig::defaults(r);
    const PointwiseRule rule(cfg, lambda, nullptr);
    for (double x : {-1.3, -0.4, 0.0, 0.6, 2.1}) {
      const auto xi = oracle::normals(seed++, 1000000);
      const auto ms = oracle::complex_average(r, x, lambda, xi);
      const double closed = moment_estimate(r, x, lambda);
      const double f[1] = {x};
      const double from_rule = rule(f).value;
      worst = std::max({worst, std::abs(closed - ms.mean) / ms.se, std::abs(from_rule - ms.mean) / ms.se});
    }
  }
  return {worst <= 4.0, "max |closed form - oracle| / SE=" + num(worst)};
}

Outcome rate_slopes() {
  Outcome o{true, ""};
  for (const ExperimentConfig& cfg : reference_rate_scenarios()) {
    const auto t0 = Clock::now();
    const RateReport rep = run_rate_experiment(cfg);
    const double t = seconds_since(t0);
    bool varying = true;
    for (const auto& row : rep.rows) varying = varying && row.se_error > 0.0;
    const bool ok = std::abs(rep.fitted_slope - rep.theoretical_slope) <= 0.15 && !rep.degenerate &&
                    varying && t <= 600.0 && cfg.reps == 200;
    o.pass = o.pass && ok;
    o.detail += "r=" + num(cfg.r) + ":" + num(rep.fitted_slope) + " (theory " +
                num(rep.theoretical_slope) + ", " + num(t) + " s) ";
  }
  return o;
}

Outcome adaptation() {
  const ExperimentConfig cfg = reference_adapt_scenario();
  const AdaptReport rep = run_adapt_experiment(cfg);
  const bool condition = 4.0 * cfg.r * rep.eps * (2.0 * rep.s_max + 1.0) < 1.0;
  bool covered = rep.rows.size() == 4 && cfg.reps == 200;
  std::string detail;
  for (const auto& row : rep.rows) {
    detail += "s=" + num(row.s) + ",n=" + std::to_string(row.n) + ":" + num(row.ratio) +
              "(clamp " + num(row.clamp_fraction_adaptive) + ") ";
    covered = covered && std::isfinite(row.ratio);
  }
  detail += "max ratio=" + num(rep.max_ratio);
  return {condition && covered && rep.max_ratio <= 3.0, detail};
}

Outcome lp_dual() {
  double worst_rel = 0.0;
  for (int q = 1; q <= 5; ++q) {
    for (int K = 1; q + K <= 6; ++K) {
      MomentLPProblem prob;
      prob.q = q;
      prob.K = K;
      prob.interval_lo = 1.0 / 81.0;
      prob.interval_hi = 1.0;
      prob.objective_exponent = -q + 0.5;
      const double value = solve_moment_lp(prob).value;
      const double ref = 2.0 * oracle::discrete_minimax(q, K, prob.objective_exponent, lp_grid(prob));
      worst_rel = std::max(worst_rel, std::abs(value - ref) / ref);
    }
  }
  bool priors = true;
  double worst_res = 0.0;
  for (auto [r, p] : {std::pair{1.0, 2.0}, std::pair{3.0, 4.0}}) {
    const PriorPair pp = build_prior_pair(r, p, 9.0);
    for (double v : pp.moment_residuals) worst_res = std::max(worst_res, v);
    priors = priors && pp.separation > 0.0 && pp.moment_bound_ok();
  }
  return {worst_rel <= 1e-4 && worst_res <= 1e-8 && priors,
          "max LP/oracle rel. gap=" + num(worst_rel) + " max moment residual=" + num(worst_res)};
}

Outcome chi2() {
  bool ok = true;
  long double previous = INFINITY;
  std::string detail;
  for (double d : {2.0, 4.0, 8.0}) {
    const long double c = chi2_bound(1.0, d, 100);
    const TvBound tv = tv_bound_from_chi2(c);
    ok = ok && std::isfinite(c) && c < previous && std::isfinite(tv.log_gap) && tv.log_gap < 0.0L;
    previous = c;
    char buf[128];
    std::snprintf(buf, sizeof buf, "d=%g: ln chi2=%.6Lg ln(1-TV)=%.6Lg ", d, std::log(c), tv.log_gap);
    detail += buf;
  }
  return {ok, detail};
}

Outcome determinism() {
  InvariantOptions opt;
  opt.seed = 1;
  const InvariantReport a = run_invariant_suite(opt);
  const InvariantReport b = run_invariant_suite(opt);
  const std::string ja = a.to_json(), jb = b.to_json();
  return {ja == jb, std::string(ja == jb ? "identical" : "different") + " reports (" +
                        std::to_string(ja.size()) + " bytes), " + std::to_string(a.failures()) +
                        " failing checks"};
}

}  // namespace

int main() {
  report(1, "Bernstein constant", bernstein);
  report(2, "exact even case", exact_even);
  report(3, "equioscillation", equioscillation);
  report(4, "coefficient bound", coefficient_bound);
  report(5, "Hermite unbiasedness", hermite_unbiased);
  report(6, "Hermite second moment", hermite_second_moment);
  report(7, "kernel reproduction", kernel_reproduction);
  report(8, "noise geometry", noise_geometry);
  report(9, "even-r closed form", even_closed_form);
  report(10, "rate slopes", rate_slopes);
  report(11, "adaptation", adaptation);
  report(12, "LP/dual equivalence", lp_dual);
  report(13, "chi-square bound", chi2);
  report(14, "determinism", determinism);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
