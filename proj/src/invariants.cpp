#include "lrnorm/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Dense>

#include "lrnorm/adapt.hpp"
#include "lrnorm/besov.hpp"
#include "lrnorm/error.hpp"
#include "lrnorm/estimators.hpp"
#include "lrnorm/gwn.hpp"
#include "lrnorm/harness.hpp"
#include "lrnorm/hermite.hpp"
#include "lrnorm/json_io.hpp"
#include "lrnorm/kernels.hpp"
#include "lrnorm/lowerbound.hpp"
#include "lrnorm/polyapprox.hpp"
#include "lrnorm/rng.hpp"
#include "lrnorm/signal_spec.hpp"
#include "lrnorm/stats.hpp"

namespace lrnorm {

namespace {

constexpr double kBernstein = 0.280169499;

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed(std::uint64_t cell, std::uint64_t rep = 0) const {
    return derive_seed(seed_, cell, rep);
  }

  void add(const std::string& module, const std::string& name, bool passed, double value,
           double limit, const std::string& detail = {}) {
    checks.push_back({module, name, passed, value, limit, detail});
  }

  // Runs `body`; an exception is recorded as a failed check.
  void guard(const std::string& module, const std::string& name,
             const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(module, name, false, std::numeric_limits<double>::quiet_NaN(), 0.0,
          std::string("exception: ") + e.what());
    }
  }

  std::vector<InvariantCheck> checks;

 private:
  std::uint64_t seed_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Standard normal draws for replication `rep` of stream `cell`.
std::vector<double> normals(const Suite& S, std::uint64_t cell, std::size_t count) {
  std::vector<double> z(count);
  CounterRng rng(S.seed(cell));
  rng.fill_normal(z);
  return z;
}

// ---------------------------------------------------------------- polyapprox

int count_alternations(const PolyCoeffs& p, int points, double& grid_sup) {
  std::vector<double> e(points);
  grid_sup = 0.0;
  for (int i = 0; i < points; ++i) {
    const double u = -1.0 + 2.0 * i / (points - 1);
    e[i] = std::pow(std::abs(u), p.r) - eval_poly(p, u);
    grid_sup = std::max(grid_sup, std::abs(e[i]));
  }
  int count = 0, last_sign = 0;
  for (int i = 0; i < points; ++i) {
    const bool left = i == 0 || (e[i] >= e[i - 1]);
    const bool right = i == points - 1 || (e[i] >= e[i + 1]);
    const bool left_min = i == 0 || (e[i] <= e[i - 1]);
    const bool right_min = i == points - 1 || (e[i] <= e[i + 1]);
    int sign = 0;
    if (left && right && e[i] > 0) sign = 1;
    if (left_min && right_min && e[i] < 0) sign = -1;
    if (sign == 0 || std::abs(e[i]) < (1.0 - 1e-6) * grid_sup) continue;
    if (sign != last_sign) {
      ++count;
      last_sign = sign;
    }
  }
  return count;
}

// Best uniform approximation of |u|^r by even polynomials of degree <= K on a
// dense grid: ternary search over the u^2 coefficient, midrange constant.
double brute_force_minimax(double r, int K) {
  const int G = 20001;
  std::vector<double> u(G), f(G);
  for (int i = 0; i < G; ++i) {
    u[i] = static_cast<double>(i) / (G - 1);
    f[i] = std::pow(u[i], r);
  }
  auto err_for = [&](double c2) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < G; ++i) {
      const double d = f[i] - c2 * u[i] * u[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return 0.5 * (hi - lo);
  };
  if (K < 2) return err_for(0.0);
  double a = -10.0, b = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (err_for(m1) < err_for(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return err_for(0.5 * (a + b));
}

void polyapprox_checks(Suite& S) {
  const std::string mod = "polyapprox";
  S.guard(mod, "equioscillation", [&] {
    bool ok = true;
    double worst_spread = 0.0, worst_sup_gap = 0.0;
    int worst_margin = 1 << 30;
    for (double r : {1.0, 1.5, 3.0})
      for (int K : {4, 8, 16}) {
        const PolyCoeffs p = best_poly_approx(r, K);
        double grid_sup = 0.0;
        const int alt = count_alternations(p, 100001, grid_sup);
        worst_margin = std::min(worst_margin, alt - (K + 2));
        worst_spread = std::max(worst_spread, p.levelled_spread);
        worst_sup_gap = std::max(worst_sup_gap, std::abs(grid_sup - p.sup_error) / p.sup_error);
        ok = ok && alt >= K + 2 && p.levelled_spread < 1e-9;
      }
    S.add(mod, "equioscillation", ok, worst_spread, 1e-9,
          "min(alternations - (K+2)) = " + std::to_string(worst_margin));
    S.add(mod, "sup_error_matches_grid", worst_sup_gap <= 1e-6, worst_sup_gap, 1e-6);
  });
  S.guard(mod, "symmetry", [&] {
    double worst = 0.0;
    for (double r : {1.0, 1.5, 3.0})
      for (int K : {4, 8, 16, 32, 64}) {
        const PolyCoeffs p = best_poly_approx(r, K);
        for (int i = 0; i <= 1000; ++i) {
          const double u = i / 1000.0;
          worst = std::max(worst, std::abs(eval_poly(p, u) - eval_poly(p, -u)));
        }
      }
    S.add(mod, "symmetry", worst <= 1e-14, worst, 1e-14);
  });
  S.guard(mod, "bound_chain", [&] {
    bool ok = true;
    double prev_gap = std::numeric_limits<double>::infinity();
    std::string detail;
    double worst = 0.0;
    for (int K : {4, 8, 16, 32, 64}) {
      const double v = best_poly_approx(1.0, K).sup_error * K;
      const double gap = std::abs(v - kBernstein);
      ok = ok && v >= 0.25 && v <= 0.32 && gap <= prev_gap;
      prev_gap = gap;
      worst = std::max(worst, gap);
      detail += "K=" + std::to_string(K) + ":" + fmt(v) + " ";
    }
    S.add(mod, "bound_chain", ok, worst, 0.07, detail);
  });
  S.guard(mod, "coefficient_bound", [&] {
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : {1.0, 1.5, 3.0})
      for (int K = 1; K <= 30; ++K) {
        const PolyCoeffs p = best_poly_approx(r, K);
        double mx = 0.0;
        for (double g : p.coeffs) mx = std::max(mx, std::abs(g));
        worst = std::max(worst, std::log2(mx) - 3.0 * K);
      }
    S.add(mod, "coefficient_bound", worst <= 0.0, worst, 0.0, "max log2(|g_k|) - 3K");
  });
  S.guard(mod, "oracle_equivalence", [&] {
    double worst = 0.0;
    for (double r : {1.0, 1.5, 3.0})
      for (int K = 0; K <= 3; ++K) {
        const double e = best_poly_approx(r, K).sup_error;
        worst = std::max(worst, std::abs(e - brute_force_minimax(r, K)));
      }
    S.add(mod, "oracle_equivalence", worst <= 1e-6, worst, 1e-6);
  });
}

// ------------------------------------------------------------------- hermite

// H_k(x) from its explicit expansion k! Sum_m (-1)^m x^{k-2m} / (m! (k-2m)! 2^m).
double hermite_expanded(int k, double x, double& abs_sum) {
  double total = 0.0;
  abs_sum = 0.0;
  for (int m = 0; 2 * m <= k; ++m) {
    long long c = 1;  // k! / (m! (k-2m)! 2^m), exact for k <= 20
    for (int i = k - 2 * m + 1; i <= k; ++i) c *= i;
    for (int i = 2; i <= m; ++i) c /= i;
    c >>= m;
    const double term = (m % 2 ? -1.0 : 1.0) * static_cast<double>(c) * std::pow(x, k - 2 * m);
    total += term;
    abs_sum += std::abs(term);
  }
  return total;
}

void hermite_checks(Suite& S) {
  const std::string mod = "hermite";
  S.guard(mod, "unbiasedness", [&] {
    const std::size_t draws = 1000000;
    double worst = 0.0;
    int cell = 0;
    for (double mu : {0.0, 0.5, 1.5})
      for (double lambda : {0.5, 1.0}) {
        const auto z = normals(S, 0x4e00 + cell++, draws);
        for (int k = 0; k <= 10; ++k) {
          std::vector<double> v(draws);
          for (std::size_t i = 0; i < draws; ++i) v[i] = moment_estimate(k, mu + lambda * z[i], lambda);
          const MeanSe ms = mean_and_se(v);
          const double dev = std::abs(ms.mean - std::pow(mu, k));
          const double score = ms.se > 0.0 ? dev / ms.se : (dev > 1e-12 ? 1e9 : 0.0);
          worst = std::max(worst, score);
        }
      }
    S.add(mod, "unbiasedness", worst <= 4.0, worst, 4.0, "max |mean - mu^k| / SE");
  });
  S.guard(mod, "second_moment_bound", [&] {
    const std::size_t draws = 1000000;
    double worst = 0.0;
    int cell = 0;
    for (int M : {2, 3}) {
      for (double mu : {0.0, 0.5 * M, static_cast<double>(M)}) {
        const auto z = normals(S, 0x4e80 + cell++, draws);
        for (int k = 0; k <= M * M; ++k) {
          double acc = 0.0;
          for (std::size_t i = 0; i < draws; ++i) {
            const double h = hermite_eval(k, mu + z[i]);
            acc += h * h;
          }
          worst = std::max(worst, (acc / draws) / std::pow(2.0 * M * M, k));
        }
      }
    }
    S.add(mod, "second_moment_bound", worst <= 1.0, worst, 1.0, "max E[H_k^2] / (2M^2)^k");
  });
  S.guard(mod, "recurrence_matches_expansion", [&] {
    CounterRng rng(S.seed(0x4f00));
    double worst = 0.0;
    for (int k = 0; k <= 8; ++k)
      for (int i = 0; i < 100; ++i) {
        const double x = -6.0 + 12.0 * rng.uniform();
        double scale = 0.0;
        const double ref = hermite_expanded(k, x, scale);
        worst = std::max(worst, std::abs(hermite_eval(k, x) - ref) / std::max(scale, 1e-300));
      }
    S.add(mod, "recurrence_matches_expansion", worst <= 1e-10, worst, 1e-10);
  });
}

// ------------------------------------------------------------------- kernels

void kernel_checks(Suite& S) {
  const std::string mod = "kernels";
  S.guard(mod, "polynomial_reproduction", [&] {
    double worst = 0.0;
    for (int M : {1, 2, 3, 4, 6}) {
      const Kernel k = make_kernel(M);
      for (double h : {0.1, 0.3}) {
        const auto res = reproduction_residuals(k, h, 50);
        for (double v : res) worst = std::max(worst, v);
      }
    }
    S.add(mod, "polynomial_reproduction", worst <= 1e-8, worst, 1e-8);
  });
  S.guard(mod, "approximation_order", [&] {
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (double s : {0.5, 1.5}) {
      auto kernel = std::make_shared<const Kernel>(make_kernel(2));
      const auto f = [s](double u) { return std::pow(std::abs(u - 0.5), s); };
      const double bp[] = {0.5};
      std::vector<double> x, y;
      for (int e = 4; e <= 9; ++e) {
        const double h = std::ldexp(1.0, -e);
        const auto ctx = ProjectionContext::make(kernel, h, 1.0, 1.0);
        double err = 0.0;
        for (int i = 0; i <= 400; ++i) {
          const double t = i / 400.0;
          err = std::max(err, std::abs(project(f, ctx, t, bp) - f(t)));
        }
        x.push_back(std::log(h));
        y.push_back(std::log(err));
      }
      const SlopeFit fit = fit_slope(x, y);
      worst = std::max(worst, std::abs(fit.slope - s));
      ok = ok && std::abs(fit.slope - s) <= 0.1;
      detail += "s=" + fmt(s) + " slope=" + fmt(fit.slope) + " ";
    }
    S.add(mod, "approximation_order", ok, worst, 0.1, detail);
  });
  S.guard(mod, "noise_decorrelation", [&] {
    const int reps = 100000;
    const double h = 0.05, x = 0.3;
    auto kernel = shared_kernel(2);
    const auto ctx = ProjectionContext::make(kernel, h, 1000.0, 1.0);
    const int m = default_grid_size(h);
    std::vector<double> a(reps), b(reps), c(reps);
    parallel_for(reps, [&](std::size_t k) {
      const auto obs = simulate([](double) { return 0.0; }, 1000.0, 1.0, m, 1, S.seed(0x6b00, k));
      a[k] = integrate_kernel(obs.front(), ctx, x);
      b[k] = integrate_kernel(obs.front(), ctx, x + 1.5 * h);
      c[k] = integrate_kernel(obs.front(), ctx, x + 2.0 * h);
    });
    auto corr = [](const std::vector<double>& u, const std::vector<double>& v) {
      const double n = static_cast<double>(u.size());
      double mu = 0, mv = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        mu += u[i];
        mv += v[i];
      }
      mu /= n;
      mv /= n;
      double suv = 0, suu = 0, svv = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        suv += (u[i] - mu) * (v[i] - mv);
        suu += (u[i] - mu) * (u[i] - mu);
        svv += (v[i] - mv) * (v[i] - mv);
      }
      return suv / std::sqrt(suu * svv);
    };
    const double worst = std::max(std::abs(corr(a, b)), std::abs(corr(a, c)));
    S.add(mod, "noise_decorrelation", worst <= 0.02, worst, 0.02, "separations 1.5h and 2h");
  });
}

// ----------------------------------------------------------------------- gwn

double correlation(const std::vector<double>& u, const std::vector<double>& v) {
  const MeanSe a = mean_and_se(u), b = mean_and_se(v);
  double suv = 0, suu = 0, svv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suv += (u[i] - a.mean) * (v[i] - b.mean);
    suu += (u[i] - a.mean) * (u[i] - a.mean);
    svv += (v[i] - b.mean) * (v[i] - b.mean);
  }
  return suv / std::sqrt(suu * svv);
}

void gwn_checks(Suite& S) {
  const std::string mod = "gwn";
  S.guard(mod, "mean_scale_independence", [&] {
    const int reps = 10000;
    const double h = 0.1, n = 2000.0;
    const TestSignal f = make_cusp(0.5);
    auto kernel = shared_kernel(2);
    const auto ctx = ProjectionContext::make(kernel, h, n / 2.0, 1.0);
    const int m = default_grid_size(h);
    const std::vector<double> xs = {0.0, 0.03, 0.25, 0.5, 0.77, 1.0};
    std::vector<std::vector<double>> first(xs.size(), std::vector<double>(reps));
    std::vector<std::vector<double>> second(xs.size(), std::vector<double>(reps));
    parallel_for(reps, [&](std::size_t k) {
      const auto obs = simulate(f.evaluator, n, 1.0, m, 2, S.seed(0x6700, k));
      for (std::size_t j = 0; j < xs.size(); ++j) {
        first[j][k] = integrate_kernel(obs[0], ctx, xs[j]);
        second[j][k] = integrate_kernel(obs[1], ctx, xs[j]);
      }
    });
    double worst_mean = 0.0, worst_scale = 0.0, worst_corr = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const MeanSe ms = mean_and_se(first[j]);
      const double target = project(f.evaluator, ctx, xs[j], f.breakpoints);
      worst_mean = std::max(worst_mean, std::abs(ms.mean - target) / ms.se);
      const bool interior = xs[j] >= h / 2.0 && xs[j] <= 1.0 - h / 2.0;
      if (interior) {
        const double sd = ms.se * std::sqrt(static_cast<double>(reps));
        worst_scale = std::max(worst_scale, std::abs(sd / ctx.lambda_h - 1.0));
      }
      worst_corr = std::max(worst_corr, std::abs(correlation(first[j], second[j])));
    }
    S.add(mod, "mean", worst_mean <= 4.0, worst_mean, 4.0, "max |mean - f_h(x)| / SE");
    S.add(mod, "scale", worst_scale <= 0.05, worst_scale, 0.05, "max |sd / lambda_h - 1|");
    S.add(mod, "split_independence", worst_corr <= 0.02, worst_corr, 0.02);
  });
}

// --------------------------------------------------------------------- besov

void besov_checks(Suite& S) {
  const std::string mod = "besov";
  S.guard(mod, "closed_form_norms", [&] {
    double worst = 0.0;
    struct Case {
      int N;
      double s;
      bool unit;
    };
    for (const Case c : {Case{4, 1.0, true}, Case{8, 1.5, false}, Case{16, 2.0, false}}) {
      const auto theta =
          c.unit ? std::vector<double>(c.N, 1.0) : random_theta(c.N, S.seed(0x6200, c.N));
      const BumpProfile g = make_mollifier(c.s, 2.0);
      const TestSignal f = make_bump_array(theta, 1.0 / c.N, c.s, 1.0, g);
      for (double r : {1.0, 2.0, 3.0}) {
        const double exact = *f.exact_norm(r);
        worst = std::max(worst, std::abs(lp_norm(f, r) - exact) / exact);
      }
    }
    S.add(mod, "closed_form_norms", worst <= 1e-6, worst, 1e-6);
  });
  S.guard(mod, "positive_homogeneity", [&] {
    SmoothnessGrid grid;
    grid.h_points = 24;
    grid.x_points = 1 << 11;
    double worst = 0.0;
    for (const std::string spec : {"cusp:0.7", "poly:0.2,1.3,-0.4"}) {
      const TestSignal f = parse_signal(spec);
      TestSignal cf = f;
      const double c = 3.7;
      cf.evaluator = [g = f.evaluator, c](double t) { return c * g(t); };
      for (double p : {1.0, 2.0, kInfinity}) {
        const double a = besov_norm_estimate(f, 0.7, p, grid);
        const double b = besov_norm_estimate(cf, 0.7, p, grid);
        worst = std::max(worst, std::abs(b - c * a) / (c * a));
      }
    }
    S.add(mod, "positive_homogeneity", worst <= 1e-10, worst, 1e-10);
  });
  S.guard(mod, "modulus_vanishing", [&] {
    SmoothnessGrid grid;
    grid.h_points = 16;
    grid.x_points = 1 << 11;
    double worst = 0.0;
    const TestSignal quad = make_polynomial({0.3, -1.2, 0.7});
    const TestSignal lin = make_polynomial({-0.5, 2.0});
    for (double p : {1.0, 2.0, kInfinity})
      for (double t : {0.05, 0.3}) {
        worst = std::max(worst, modulus_of_smoothness(quad, t, 3, p, grid));
        worst = std::max(worst, modulus_of_smoothness(lin, t, 2, p, grid));
      }
    S.add(mod, "modulus_vanishing", worst <= 1e-12, worst, 1e-12);
  });
}

// ---------------------------------------------------------------- estimators

void estimator_checks(Suite& S) {
  const std::string mod = "estimators";
  S.guard(mod, "poly_regime_bias", [&] {
    EstimatorConfig cfg = EstimatorConfig::defaults(1.0);
    cfg.n = 1024.0;
    cfg.derive();
    const double lambda = 1.0;
    const auto poly = shared_poly(1.0, cfg.K);
    const PointwiseRule rule(cfg, lambda, poly.get());
    const double root_log = std::sqrt(cfg.log_n());
    const double A = 2.0 * cfg.c1 * lambda * root_log;
    const double bound = 2.0 * cfg.c1 * kBernstein / cfg.c2 * lambda / root_log;
    const std::size_t draws = 200000;
    double worst = 0.0;
    int cell = 0;
    for (double frac : {0.0, 0.1, 0.3, 0.6, 1.0}) {
      const double mu = frac * A;
      const auto z = normals(S, 0x6500 + cell++, draws);
      std::vector<double> v(draws);
      for (std::size_t i = 0; i < draws; ++i) v[i] = rule.poly_value(mu + lambda * z[i]);
      worst = std::max(worst, std::abs(mean_and_se(v).mean - mu) / bound);
    }
    S.add(mod, "poly_regime_bias", worst <= 1.0, worst, 1.0, "max |E P(X) - |mu|| / bound");
  });
  S.guard(mod, "smooth_regime_bias", [&] {
    EstimatorConfig cfg = EstimatorConfig::defaults(1.0);
    cfg.n = 1024.0;
    cfg.derive();
    const double lambda = 1.0;
    const auto poly = shared_poly(1.0, cfg.K);
    const PointwiseRule rule(cfg, lambda, poly.get());
    const double root_log = std::sqrt(cfg.log_n());
    const double bound =
        4.0 * lambda / (cfg.c1 * root_log) * std::pow(cfg.n, -cfg.c1 * cfg.c1 / 8.0);
    const std::size_t draws = 200000;
    double worst = 0.0;
    int cell = 0;
    for (double frac : {1.0, 1.5, 2.0, 3.0, 5.0}) {
      for (double sign : {1.0, -1.0}) {
        const double mu = sign * frac * 0.5 * cfg.c1 * lambda * root_log;
        const auto z = normals(S, 0x6580 + cell++, draws);
        // Control variate: X - mu has mean zero, so E|X| - |mu| = E[|X| - |mu| - sgn(mu)(X - mu)].
        double acc = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
          const double x = mu + lambda * z[i];
          const double f[2] = {x, 10.0 * rule.threshold() * sign};
          const PointwiseRecord rec = rule(f);
          acc += rec.value - std::abs(mu) - sign * (x - mu);
        }
        worst = std::max(worst, std::abs(acc / draws));
      }
    }
    S.add(mod, "smooth_regime_bias", worst <= bound, worst, bound,
          "control-variate Monte Carlo of E|X| - |mu|");
  });
  S.guard(mod, "even_unbiasedness", [&] {
    const std::size_t draws = 1000000;
    double worst = 0.0;
    int cell = 0;
    for (int r : {2, 4}) {
      EstimatorConfig cfg = EstimatorConfig::defaults(r);
      cfg.n = 1024.0;
      cfg.derive();
      const double lambda = 0.8;
      const PointwiseRule rule(cfg, lambda, nullptr);
      for (double mu : {0.0, 0.7, 2.0}) {
        const auto z = normals(S, 0x6600 + cell++, draws);
        std::vector<double> v(draws);
        for (std::size_t i = 0; i < draws; ++i) {
          const double f[1] = {mu + lambda * z[i]};
          v[i] = rule(f).value;
        }
        const MeanSe ms = mean_and_se(v);
        worst = std::max(worst, std::abs(ms.mean - std::pow(mu, r)) / ms.se);
      }
    }
    S.add(mod, "even_unbiasedness", worst <= 4.0, worst, 4.0, "max |mean - mu^r| / SE");
  });
  S.guard(mod, "range_and_truncation", [&] {
    double worst_clamp = 0.0, worst_range = 0.0;
    std::string detail;
    const int reps = 8;
    for (ExperimentConfig c : reference_rate_scenarios()) {
      long evals = 0, clamped = 0;
      for (long n : c.n_grid) {
        const double nd = static_cast<double>(n);
        const double h = rate_bandwidth(nd, c.s, c.r);
        const EstimatorConfig ec = estimator_config_for(c, nd, h);
        SignalContext sc;
        sc.s = c.s;
        sc.p = c.p;
        sc.L = c.L;
        sc.h = h;
        const TestSignal f = parse_signal(c.signal_spec, sc);
        const ProjectionContext ctx = make_context(ec, shared_kernel(ec.M));
        const auto poly = ec.mode == EstimatorMode::kEven ? nullptr : shared_poly(ec.r, ec.K);
        const int splits = split_count(ec.mode);
        std::vector<EstimateResult> out(reps);
        parallel_for(reps, [&](std::size_t k) {
          const auto obs = simulate(f.evaluator, nd * splits, ec.sigma, rate_grid_size(h), splits,
                                    S.seed(0x6700 + static_cast<std::uint64_t>(c.r * 16) + n, k));
          out[k] = run_estimator(obs, ctx, ec, poly.get());
        });
        for (const auto& res : out) {
          evals += res.evaluations;
          clamped += res.clamped;
          const double hi = ec.mode == EstimatorMode::kEven ? kInfinity : ec.L;
          if (res.value < 0.0) worst_range = std::max(worst_range, -res.value);
          if (res.value > hi) worst_range = std::max(worst_range, res.value - hi);
        }
      }
      const double frac = static_cast<double>(clamped) / evals;
      worst_clamp = std::max(worst_clamp, frac);
      detail += "r=" + fmt(c.r) + ":" + fmt(frac) + " ";
    }
    S.add(mod, "range", worst_range == 0.0, worst_range, 0.0);
    S.add(mod, "truncation_activity", worst_clamp <= 0.01, worst_clamp, 0.01, detail);
  });
  S.guard(mod, "zero_signal_poly_regime", [&] {
    ExperimentConfig c;
    c.r = 1.0;
    c.s = 1.0;
    const double n = 4096.0, h = rate_bandwidth(n, 1.0, 1.0);
    const EstimatorConfig ec = estimator_config_for(c, n, h);
    const ProjectionContext ctx = make_context(ec, shared_kernel(ec.M));
    const auto poly = shared_poly(ec.r, ec.K);
    long evals = 0, polys = 0;
    for (int k = 0; k < 8; ++k) {
      const auto obs = simulate([](double) { return 0.0; }, 2.0 * n, ec.sigma, rate_grid_size(h), 2,
                                S.seed(0x6800, k));
      const auto res = run_estimator(obs, ctx, ec, poly.get());
      evals += res.evaluations;
      polys += res.poly_points;
    }
    const double frac = static_cast<double>(polys) / evals;
    S.add(mod, "zero_signal_poly_regime", frac >= 0.99, frac, 0.99);
  });
}

// --------------------------------------------------------------------- adapt

void adapt_checks(Suite& S) {
  const std::string mod = "adapt";
  S.guard(mod, "feasibility_monotonicity", [&] {
    CounterRng rng(S.seed(0x7100));
    int mismatches = 0;
    for (int trial = 0; trial < 4000; ++trial) {
      const int count = 1 + static_cast<int>(rng() % 20);
      std::vector<CandidateValue> cands(count);
      for (int i = 0; i < count; ++i) {
        cands[i].h = std::ldexp(1.0, -i);
        cands[i].lambda = 0.1 * std::pow(1.4, i);
        cands[i].T = 1.0 + 0.2 * rng.normal() * rng.uniform();
      }
      const double cstar = std::pow(10.0, -1.0 + 3.0 * rng.uniform());
      const double log_n = 7.0;
      // Exhaustive: every qualifying index, then the largest bandwidth among them.
      std::size_t expect = count - 1;
      for (int i = count - 1; i >= 0; --i) {
        bool ok = true;
        for (int j = i + 1; j < count; ++j) {
          const double gap = cands[i].T - cands[j].T;
          ok = ok && gap * gap <= cstar * cands[j].lambda * cands[j].lambda / log_n;
        }
        if (ok) expect = static_cast<std::size_t>(i);
      }
      std::vector<CandidateValue> shuffled(cands.rbegin(), cands.rend());
      if (lepski_select(shuffled, cstar, log_n).index != expect) ++mismatches;
    }
    S.add(mod, "feasibility_monotonicity", mismatches == 0, mismatches, 0.0);
  });

  // Shared setup for the adaptive runs below.
  const double n = 32.0;
  EstimatorConfig base = EstimatorConfig::defaults(1.0);
  base.eps = 0.9 / (4.0 * 1.0 * 5.0);
  base.n = n;
  base.M = 3;
  base.relax_degree_constraints = true;
  base.derive();
  ExperimentConfig ec;
  ec.signal_spec = "bumps:auto:1";

  S.guard(mod, "determinism", [&] {
    BandwidthGrid grid = make_bandwidth_grid(n, 2.0, GridKind::kDyadic, 1.0);
    SignalContext sc;
    sc.h = rate_bandwidth(n, 1.0, 1.0);
    const TestSignal f = parse_signal(ec.signal_spec, sc);
    const int m = adaptive_grid_size(grid);
    const auto a = simulate(f.evaluator, 2 * n, 1.0, m, 2, S.seed(0x7200));
    const auto b = simulate(f.evaluator, 2 * n, 1.0, m, 2, S.seed(0x7200));
    base.h = grid.h_max;
    const auto ra = adaptive_estimate(a, base, grid);
    const auto rb = adaptive_estimate(b, base, grid);
    const bool same = ra.hhat == rb.hhat && ra.That == rb.That;
    S.add(mod, "determinism", same, std::abs(ra.hhat - rb.hhat), 0.0);
  });

  S.guard(mod, "grid_kind_consistency", [&] {
    BandwidthGrid dyadic = make_bandwidth_grid(n, 2.0, GridKind::kDyadic);
    BandwidthGrid harmonic = make_bandwidth_grid(n, 2.0, GridKind::kHarmonic);
    // Matching endpoints: the dyadic grid spans the harmonic one.
    dyadic.candidates.front() = harmonic.candidates.front();
    base.h = dyadic.candidates.front();
    CalibrationOptions opt;
    opt.reps = 100;
    opt.seed = S.seed(0x7300);
    const double cstar = calibrate_cstar(base, dyadic, opt).cstar;
    dyadic.cstar = harmonic.cstar = cstar;
    const int m = std::max(adaptive_grid_size(dyadic), adaptive_grid_size(harmonic));
    const int reps = 12;
    double worst = 1.0;
    std::string detail;
    for (double s : {1.0, 2.0}) {
      SignalContext sc;
      sc.s = s;
      sc.h = rate_bandwidth(n, s, 1.0);
      const TestSignal f = parse_signal(ec.signal_spec, sc);
      const double truth = *f.exact_norm(1.0);
      std::vector<double> hd(reps), hh(reps);
      for (int k = 0; k < reps; ++k) {
        const auto obs = simulate(f.evaluator, 2 * n, 1.0, m, 2, S.seed(0x7400 + (s > 1.5), k));
        hd[k] = adaptive_estimate(obs, base, dyadic).hhat;
        hh[k] = adaptive_estimate(obs, base, harmonic).hhat;
      }
      std::sort(hd.begin(), hd.end());
      std::sort(hh.begin(), hh.end());
      const double h1 = hd[reps / 2], h2 = hh[reps / 2];
      auto fixed_risk = [&](double h) {
        EstimatorConfig c = base;
        c.h = h;
        const ProjectionContext ctx = make_context(c, shared_kernel(c.M));
        const auto poly = shared_poly(c.r, c.K);
        const int reps_risk = 100;
        std::vector<double> sq(reps_risk);
        parallel_for(reps_risk, [&](std::size_t k) {
          const auto obs = simulate(f.evaluator, 2 * n, 1.0, std::max(m, rate_grid_size(h)), 2,
                                    S.seed(0x7500, k));
          const double e = run_estimator(obs, ctx, c, poly.get()).value - truth;
          sq[k] = e * e;
        });
        return std::sqrt(mean_and_se(sq).mean);
      };
      const double r1 = fixed_risk(h1), r2 = fixed_risk(h2);
      const double ratio = std::max(r1, r2) / std::min(r1, r2);
      worst = std::max(worst, ratio);
      detail += "s=" + fmt(s) + " h=" + fmt(h1) + "/" + fmt(h2) + " ratio=" + fmt(ratio) + " ";
    }
    S.add(mod, "grid_kind_consistency", worst <= 2.0, worst, 2.0, detail);
  });
}

// ---------------------------------------------------------------- lowerbound

// Discrete minimax error of t^exponent on `grid` by span{t^{1-q}, ..., t^K}
// via multi-point exchange.
double discrete_remez(int q, int K, double exponent, const std::vector<double>& grid) {
  const int nb = K + q;
  const int G = static_cast<int>(grid.size());
  const double lo = grid.front(), hi = grid.back();
  auto basis = [&](int l, double t) {
    const double y = (2.0 * t - lo - hi) / (hi - lo);
    return std::pow(t, 1 - q) * std::cos(l * std::acos(std::clamp(y, -1.0, 1.0)));
  };
  std::vector<int> ref(nb + 1);
  for (int j = 0; j <= nb; ++j) ref[j] = static_cast<int>(std::lround(j * (G - 1.0) / nb));
  double E = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::MatrixXd A(nb + 1, nb + 1);
    Eigen::VectorXd rhs(nb + 1);
    for (int j = 0; j <= nb; ++j) {
      for (int l = 0; l < nb; ++l) A(j, l) = basis(l, grid[ref[j]]);
      A(j, nb) = (j % 2 ? -1.0 : 1.0);
      rhs(j) = std::pow(grid[ref[j]], exponent);
    }
    const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
    E = std::abs(sol(nb));
    std::vector<double> err(G);
    double mx = 0.0;
    for (int g = 0; g < G; ++g) {
      double p = 0.0;
      for (int l = 0; l < nb; ++l) p += sol(l) * basis(l, grid[g]);
      err[g] = std::pow(grid[g], exponent) - p;
      mx = std::max(mx, std::abs(err[g]));
    }
    if (mx - E <= 1e-12 * mx) return mx;
    // One extremum per run of constant sign.
    std::vector<int> ext;
    for (int g = 0; g < G; ++g) {
      if (err[g] == 0.0) continue;
      if (!ext.empty() && (err[ext.back()] > 0) == (err[g] > 0)) {
        if (std::abs(err[g]) > std::abs(err[ext.back()])) ext.back() = g;
      } else {
        ext.push_back(g);
      }
    }
    while (static_cast<int>(ext.size()) > nb + 1) {
      if (std::abs(err[ext.front()]) < std::abs(err[ext.back()])) {
        ext.erase(ext.begin());
      } else {
        ext.pop_back();
      }
    }
    if (static_cast<int>(ext.size()) < nb + 1) throw NumericalError("discrete exchange lost alternation");
    ref = ext;
  }
  throw NumericalError("discrete exchange did not converge");
}

void lowerbound_checks(Suite& S) {
  const std::string mod = "lowerbound";
  S.guard(mod, "lp_dual_equivalence", [&] {
    double worst = 0.0;
    for (int q = 1; q <= 3; ++q)
      for (int K = 1; K + q <= 6; ++K)
        for (double lnN : {4.0, 9.0})
          for (double r : {1.0, 3.0}) {
            MomentLPProblem prob;
            prob.q = q;
            prob.K = K;
            prob.interval_lo = 1.0 / (lnN * lnN);
            prob.objective_exponent = -q + r / 2.0;
            const double lp = solve_moment_lp(prob).value;
            const double E = discrete_remez(q, K, prob.objective_exponent, lp_grid(prob));
            worst = std::max(worst, std::abs(lp - 2.0 * E) / (2.0 * E));
          }
    S.add(mod, "lp_dual_equivalence", worst <= 1e-4, worst, 1e-4, "relative gap to 2E");
  });
  S.guard(mod, "scaling_law", [&] {
    double worst = 1.0;
    std::string detail;
    for (auto [r, p] : {std::pair{1.0, 2.0}, std::pair{3.0, 4.0}}) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (double lnN : {4.0, 9.0, 16.0}) {
        const MomentLPProblem prob = MomentLPProblem::for_priors(r, p, lnN, 1.0);
        const double v = solve_moment_lp(prob).value * std::pow(lnN, -(2.0 * prob.q - r));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi / lo);
      detail += "r=" + fmt(r) + ":" + fmt(hi / lo) + " ";
    }
    S.add(mod, "scaling_law", worst <= 2.0, worst, 2.0, "max/min of value lnN^-(2q-r), d = 1");
  });
  S.guard(mod, "condition_triple", [&] {
    bool ok = true;
    double worst_res = 0.0, worst_mass = 0.0;
    std::string detail;
    for (auto [r, p] : {std::pair{1.0, 2.0}, std::pair{3.0, 4.0}}) {
      const PriorPair pp = build_prior_pair(r, p, 9.0);
      for (double v : pp.moment_residuals) worst_res = std::max(worst_res, v);
      ok = ok && pp.moment_match_ok() && pp.separation_ok() && pp.moment_bound_ok() &&
           pp.support_ok();
      for (const DiscreteMeasure* m :
           {&pp.lp.nu0, &pp.lp.nu1, &pp.nu0_tilde, &pp.nu1_tilde, &pp.mu0, &pp.mu1})
        worst_mass = std::max(worst_mass, std::abs(m->total_mass() - 1.0));
      detail += "r=" + fmt(r) + " sep=" + fmt(pp.separation) + " ";
    }
    S.add(mod, "condition_triple", ok, worst_res, 1e-8, detail);
    S.add(mod, "probability_conservation", worst_mass <= 1e-12, worst_mass, 1e-12);
  });
  S.guard(mod, "chi2_tv", [&] {
    bool ok = true;
    long double prev = std::numeric_limits<long double>::infinity();
    double worst_gap = -std::numeric_limits<double>::infinity();
    std::string detail;
    for (double d : {2.0, 4.0, 8.0}) {
      const long double c = chi2_bound(1.0, d, 100);
      ok = ok && std::isfinite(c) && c < prev;
      prev = c;
      // TV < 1 exactly when ln(1 - TV) is finite; TV itself rounds to 1 for large chi2.
      const TvBound tv = tv_bound_from_chi2(c);
      ok = ok && std::isfinite(tv.log_gap) && tv.log_gap < 0.0L;
      worst_gap = std::max(worst_gap, static_cast<double>(tv.log_gap));
      detail += "d=" + fmt(d) + ":ln chi2=" + fmt(static_cast<double>(std::log(c))) + " ";
    }
    S.add(mod, "chi2_tv", ok, worst_gap, 0.0, detail + "value is max ln(1 - TV)");
  });
}

// ------------------------------------------------------------------- harness

void harness_checks(Suite& S) {
  const std::string mod = "harness";
  S.guard(mod, "slope_fit_coverage", [&] {
    CounterRng rng(S.seed(0x8100));
    const int trials = 4000;
    int covered = 0;
    std::vector<double> x(7), y(7), se(7);
    for (int t = 0; t < trials; ++t) {
      const double a = -0.5 + rng.uniform();
      for (int i = 0; i < 7; ++i) {
        x[i] = 5.0 + i;
        se[i] = 0.02 + 0.05 * rng.uniform();
        y[i] = a * x[i] + 0.3 + se[i] * rng.normal();
      }
      const SlopeFit fit = fit_slope(x, y, se);
      if (fit.ci_lo <= a && a <= fit.ci_hi) ++covered;
    }
    const double rate = static_cast<double>(covered) / trials;
    S.add(mod, "slope_fit_coverage", std::abs(rate - 0.95) <= 0.015, rate, 0.95,
          "coverage of the 95% interval, tolerance 0.015");
  });
  S.guard(mod, "reproducibility", [&] {
    ExperimentConfig c;
    c.r = 1.0;
    c.n_grid = {256, 512};
    c.reps = 4;
    c.seed_base = S.seed(0x8200);
    const RateReport a = run_rate_experiment(c);
    const RateReport b = run_rate_experiment(c);
    const bool same = rate_csv(a) == rate_csv(b) && to_json(a).dump() == to_json(b).dump();
    S.add(mod, "reproducibility", same, same ? 0.0 : 1.0, 0.0);
  });
}

class FaultScope {
 public:
  FaultScope(int degree, double delta) { set_hermite_fault(degree, delta); }
  ~FaultScope() { set_hermite_fault(-1, 0.0); }
};

}  // namespace

std::size_t InvariantReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const InvariantCheck& c) { return !c.passed; }));
}

std::string InvariantReport::to_json() const {
  Json j;
  j["seed"] = seed;
  j["total"] = checks.size();
  j["failures"] = failures();
  j["passed"] = all_passed();
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json e;
    e["module"] = c.module;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = std::isfinite(c.value) ? Json(c.value) : Json(nullptr);
    e["limit"] = c.limit;
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  return j.dump(2) + "\n";
}

InvariantReport run_invariant_suite(const InvariantOptions& options) {
  FaultScope fault(options.hermite_fault_degree, options.hermite_fault_delta);
  Suite S(options.seed);
  polyapprox_checks(S);
  hermite_checks(S);
  kernel_checks(S);
  gwn_checks(S);
  besov_checks(S);
  estimator_checks(S);
  adapt_checks(S);
  lowerbound_checks(S);
  harness_checks(S);
  InvariantReport rep;
  rep.seed = options.seed;
  rep.checks = std::move(S.checks);
  return rep;
}

}  // namespace lrnorm
