#include "lrnorm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lrnorm/error.hpp"
#include "lrnorm/gwn.hpp"
#include "lrnorm/json_io.hpp"
#include "lrnorm/rng.hpp"
#include "lrnorm/signal_spec.hpp"
#include "lrnorm/stats.hpp"

namespace lrnorm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParameterError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
}

std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// Rethrows an estimator failure tagged with its experiment coordinate.
[[noreturn]] void rethrow_at(const Error& e, const std::string& where) {
  const std::string msg = where + ": " + e.what();
  switch (e.code()) {
    case ErrorCode::kParameter: throw ParameterError(msg);
    case ErrorCode::kNumerical: throw NumericalError(msg);
    default: throw InternalError(msg);
  }
}

struct RepOutcome {
  double estimate = 0.0;
  long evaluations = 0;
  long clamped = 0;
  long poly_points = 0;
};

RateRow summarise(long n, double h, double truth, const std::vector<RepOutcome>& reps, int m) {
  RateRow row;
  row.n = n;
  row.h = h;
  row.truth = truth;
  row.grid_size = m;
  const double R = static_cast<double>(reps.size());
  std::vector<double> sq(reps.size());
  long evals = 0, clamped = 0, poly = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const double e = reps[i].estimate - truth;
    sq[i] = e * e;
    sum += reps[i].estimate;
    evals += reps[i].evaluations;
    clamped += reps[i].clamped;
    poly += reps[i].poly_points;
  }
  row.mean_estimate = sum / R;
  const MeanSe mse = mean_and_se(sq);
  row.rmse = std::sqrt(mse.mean);
  row.se_error = row.rmse > 0.0 ? mse.se / (2.0 * row.rmse) : 0.0;
  row.clamp_fraction = evals > 0 ? static_cast<double>(clamped) / evals : 0.0;
  row.poly_fraction = evals > 0 ? static_cast<double>(poly) / evals : 0.0;
  return row;
}

void fit_report(RateReport& rep) {
  std::vector<double> x, y, se;
  rep.degenerate = rep.rows.size() < 2;
  for (const auto& row : rep.rows) {
    if (!(row.rmse > 1e-9 * std::max(1.0, std::abs(row.truth)))) rep.degenerate = true;
    x.push_back(rate_abscissa(static_cast<double>(row.n), rep.r));
    y.push_back(std::log(row.rmse));
    se.push_back(row.rmse > 0.0 ? row.se_error / row.rmse : 0.0);
  }
  if (rep.degenerate) return;
  const SlopeFit fit = fit_slope(x, y, se);
  rep.degenerate = fit.degenerate;
  rep.fitted_slope = fit.slope;
  rep.slope_se = fit.slope_se;
  rep.slope_ci = {fit.ci_lo, fit.ci_hi};
  rep.residual_slope_ci = {fit.residual_ci_lo, fit.residual_ci_hi};
}

TestSignal signal_for(const ExperimentConfig& cfg, double s, double h) {
  SignalContext sc;
  sc.s = s;
  sc.p = cfg.p;
  sc.L = cfg.L;
  sc.h = h;
  return parse_signal(cfg.signal_spec, sc);
}

double exact_norm_or_throw(const TestSignal& f, double r, const std::string& spec) {
  const auto v = f.exact_norm(r);
  if (!v) throw ParameterError("configuration: signal '" + spec + "' has no exact L_r norm");
  return *v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << content;
}

}  // namespace

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kRate: return "rate";
    case ExperimentMode::kAdapt: return "adapt";
    case ExperimentMode::kLowerbound: return "lowerbound";
    case ExperimentMode::kInvariants: return "invariants";
  }
  return "rate";
}

ExperimentMode experiment_mode_from_string(const std::string& s) {
  if (s == "rate" || s == "rates") return ExperimentMode::kRate;
  if (s == "adapt") return ExperimentMode::kAdapt;
  if (s == "lowerbound") return ExperimentMode::kLowerbound;
  if (s == "invariants") return ExperimentMode::kInvariants;
  throw ParameterError("config: unknown mode '" + s + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "mode") {
    mode = experiment_mode_from_string(v);
  } else if (key == "signal") {
    signal_spec = v;
  } else if (key == "r") {
    r = parse_real(key, v);
  } else if (key == "s") {
    s = parse_real(key, v);
  } else if (key == "p") {
    p = v == "inf" ? kInfinity : parse_real(key, v);
  } else if (key == "sigma") {
    sigma = parse_real(key, v);
  } else if (key == "L") {
    L = parse_real(key, v);
  } else if (key == "n") {
    n_grid.clear();
    for (const auto& tok : split_list(v)) n_grid.push_back(static_cast<long>(parse_integer(key, tok)));
  } else if (key == "reps") {
    reps = static_cast<int>(parse_integer(key, v));
  } else if (key == "seed") {
    seed_base = static_cast<std::uint64_t>(parse_integer(key, v));
  } else if (key == "out") {
    output_path = v;
  } else if (key == "c1") {
    overrides.c1 = parse_real(key, v);
  } else if (key == "c2") {
    overrides.c2 = parse_real(key, v);
  } else if (key == "eps") {
    overrides.eps = parse_real(key, v);
  } else if (key == "cstar") {
    if (v == "auto") {
      overrides.cstar.reset();
    } else {
      overrides.cstar = parse_real(key, v);
    }
  } else if (key == "grid") {
    overrides.grid = grid_kind_from_string(v);
  } else if (key == "relax") {
    if (v == "true" || v == "1") {
      overrides.relax = true;
    } else if (v == "false" || v == "0") {
      overrides.relax = false;
    } else {
      throw ParameterError("relax: expected true or false, got '" + v + "'");
    }
  } else if (key == "smax") {
    s_max = parse_real(key, v);
  } else if (key == "svalues") {
    s_values.clear();
    for (const auto& tok : split_list(v)) s_values.push_back(parse_real(key, tok));
  } else if (key == "h") {
    h = v == "auto" ? 0.0 : parse_real(key, v);
  } else if (key == "M") {
    M = static_cast<int>(parse_integer(key, v));
  } else if (key == "lnN") {
    lnN = parse_real(key, v);
  } else if (key == "d") {
    d = parse_real(key, v);
  } else {
    throw ParameterError("config: unknown key '" + key + "'");
  }
}

std::map<std::string, std::string> ExperimentConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["mode"] = to_string(mode);
  kv["signal"] = signal_spec;
  kv["r"] = format_real(r);
  kv["s"] = format_real(s);
  kv["p"] = std::isinf(p) ? "inf" : format_real(p);
  kv["sigma"] = format_real(sigma);
  kv["L"] = format_real(L);
  std::string ns;
  for (std::size_t i = 0; i < n_grid.size(); ++i) ns += (i ? "," : "") + std::to_string(n_grid[i]);
  kv["n"] = ns;
  kv["reps"] = std::to_string(reps);
  kv["seed"] = std::to_string(seed_base);
  if (!output_path.empty()) kv["out"] = output_path;
  if (overrides.c1) kv["c1"] = format_real(*overrides.c1);
  if (overrides.c2) kv["c2"] = format_real(*overrides.c2);
  if (overrides.eps) kv["eps"] = format_real(*overrides.eps);
  kv["cstar"] = overrides.cstar ? format_real(*overrides.cstar) : "auto";
  if (overrides.grid) kv["grid"] = to_string(*overrides.grid);
  kv["relax"] = overrides.relax ? "true" : "false";
  kv["smax"] = format_real(s_max);
  std::string sv;
  for (std::size_t i = 0; i < s_values.size(); ++i) sv += (i ? "," : "") + format_real(s_values[i]);
  kv["svalues"] = sv;
  kv["h"] = h > 0.0 ? format_real(h) : "auto";
  kv["M"] = std::to_string(M);
  kv["lnN"] = format_real(lnN);
  kv["d"] = format_real(d);
  return kv;
}

void ExperimentConfig::validate() const {
  require(reps >= 1, "config: reps >= 1 violated");
  require(r >= 1.0, "config: r >= 1 violated");
  require(s > 0.0, "config: s > 0 violated");
  require(sigma >= 0.0, "config: sigma >= 0 violated");
  require(L > 0.0, "config: L > 0 violated");
  require(p >= 1.0, "config: p >= 1 violated");
  require(h >= 0.0 && h <= 1.0, "config: h must lie in (0, 1] or be auto");
  require(M >= 0 && M <= kMaxKernelOrder, "config: kernel order M out of range");
  if (mode == ExperimentMode::kRate || mode == ExperimentMode::kAdapt) {
    require(!n_grid.empty(), "config: nGrid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      require(n_grid[i] >= 256, "config: nGrid entries must be >= 256");
      if (i > 0) require(n_grid[i] > n_grid[i - 1], "config: nGrid must be strictly increasing");
    }
  }
  if (mode == ExperimentMode::kAdapt) {
    require(!s_values.empty(), "config: svalues is empty");
    require(s_max > 0.0, "config: smax > 0 violated");
    for (double v : s_values) require(v > 0.0 && v <= s_max, "config: svalues must lie in (0, smax]");
  }
  if (mode == ExperimentMode::kLowerbound) {
    require(lnN > 1.0, "config: lnN > 1 violated");
    require(d > 0.0, "config: d > 0 violated");
  }
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_seed_environment(ExperimentConfig& cfg) {
  if (const char* env = std::getenv("LRNORM_SEED"); env && *env)
    cfg.seed_base = static_cast<std::uint64_t>(parse_integer("LRNORM_SEED", env));
}

double rate_bandwidth(double n, double s, double r) {
  require(n > 1.0 && s > 0.0, "rate_bandwidth: needs n > 1 and s > 0");
  if (mode_for(r) == EstimatorMode::kEven) return std::pow(n, -1.0 / (2.0 * s + 1.0 - 1.0 / r));
  return std::pow(n * std::log(n), -1.0 / (2.0 * s + 1.0));
}

double theoretical_slope(double s, double r) {
  if (mode_for(r) == EstimatorMode::kEven) return -s / (2.0 * s + 1.0 - 1.0 / r);
  return -s / (2.0 * s + 1.0);
}

double rate_abscissa(double n, double r) {
  if (mode_for(r) == EstimatorMode::kEven) return std::log(n);
  return std::log(n * std::log(n));
}

int kernel_order_for(double s) { return static_cast<int>(std::ceil(s - 1e-12)) + 1; }

int rate_grid_size(double h) { return (default_grid_size(h) + 63) / 64 * 64; }

EstimatorConfig estimator_config_for(const ExperimentConfig& cfg, double n, double h) {
  EstimatorConfig ec = EstimatorConfig::defaults(cfg.r);
  if (cfg.overrides.c1) ec.c1 = *cfg.overrides.c1;
  if (cfg.overrides.c2) ec.c2 = *cfg.overrides.c2;
  if (cfg.overrides.eps) ec.eps = *cfg.overrides.eps;
  ec.sigma = cfg.sigma;
  ec.L = cfg.L;
  ec.h = h;
  ec.n = n;
  ec.M = cfg.M > 0 ? cfg.M : kernel_order_for(cfg.s);
  ec.relax_degree_constraints = cfg.overrides.relax;
  ec.derive();
  ec.validate();
  return ec;
}

RateReport run_rate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.mode == ExperimentMode::kRate, "run_rate_experiment: mode must be rate");
  RateReport rep;
  rep.mode = to_string(mode_for(cfg.r));
  rep.signal_spec = cfg.signal_spec;
  rep.r = cfg.r;
  rep.s = cfg.s;
  rep.sigma = cfg.sigma;
  rep.L = cfg.L;
  rep.reps = cfg.reps;
  rep.seed_base = cfg.seed_base;
  rep.theoretical_slope = theoretical_slope(cfg.s, cfg.r);
  rep.abscissa = mode_for(cfg.r) == EstimatorMode::kEven ? "log n" : "log(n ln n)";

  for (long n : cfg.n_grid) {
    const double nd = static_cast<double>(n);
    const double h = cfg.h > 0.0 ? cfg.h : rate_bandwidth(nd, cfg.s, cfg.r);
    const EstimatorConfig ec = estimator_config_for(cfg, nd, h);
    const TestSignal f = signal_for(cfg, cfg.s, h);
    const double truth = exact_norm_or_throw(f, cfg.r, cfg.signal_spec);
    const int m = rate_grid_size(h);
    const int splits = split_count(ec.mode);
    const auto kernel = shared_kernel(ec.M);
    const ProjectionContext ctx = make_context(ec, kernel);
    const auto poly = ec.mode == EstimatorMode::kEven ? nullptr : shared_poly(ec.r, ec.K);

    std::vector<RepOutcome> out(cfg.reps);
    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t k) {
      try {
        const auto obs = simulate(f.evaluator, nd * splits, ec.sigma, m, splits,
                                  derive_seed(cfg.seed_base, static_cast<std::uint64_t>(n), k));
        const EstimateResult res = run_estimator(obs, ctx, ec, poly.get());
        out[k] = {res.value, res.evaluations, res.clamped, res.poly_points};
      } catch (const Error& e) {
        rethrow_at(e, "rate experiment (n=" + std::to_string(n) + ", rep=" + std::to_string(k) + ")");
      }
    });
    rep.rows.push_back(summarise(n, h, truth, out, m));
  }
  fit_report(rep);
  if (!cfg.output_path.empty()) write_rate_outputs(rep, cfg.output_path);
  return rep;
}

AdaptReport run_adapt_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  require(cfg.mode == ExperimentMode::kAdapt, "run_adapt_experiment: mode must be adapt");
  const GridKind kind = cfg.overrides.grid.value_or(GridKind::kDyadic);
  // Largest eps meeting 4 r eps (2 s_max + 1) < 1 with a 10% margin.
  const double eps = cfg.overrides.eps.value_or(0.9 / (4.0 * cfg.r * (2.0 * cfg.s_max + 1.0)));
  const int M = cfg.M > 0 ? cfg.M : kernel_order_for(cfg.s_max);

  AdaptReport report;
  report.eps = eps;
  report.s_max = cfg.s_max;
  report.grid_kind = to_string(kind);

  struct Cell {
    BandwidthGrid grid;
    EstimatorConfig base;
    int m = 0;
  };
  std::map<long, Cell> cells;
  for (long n : cfg.n_grid) {
    const double nd = static_cast<double>(n);
    Cell c;
    c.base = EstimatorConfig::defaults(cfg.r);
    if (cfg.overrides.c1) c.base.c1 = *cfg.overrides.c1;
    if (cfg.overrides.c2) c.base.c2 = *cfg.overrides.c2;
    c.base.eps = eps;
    c.base.sigma = cfg.sigma;
    c.base.L = cfg.L;
    c.base.n = nd;
    c.base.M = M;
    c.base.relax_degree_constraints = true;
    c.base.derive();
    c.grid = make_bandwidth_grid(nd, cfg.s_max, kind);
    c.base.h = c.grid.h_max;
    c.base.validate();
    check_adaptive_config(c.base, c.grid);
    if (cfg.overrides.cstar) {
      c.grid.cstar = *cfg.overrides.cstar;
    } else {
      CalibrationOptions opt;
      opt.reps = std::max(200, cfg.reps);
      opt.seed = derive_seed(cfg.seed_base, 0xc5a7, static_cast<std::uint64_t>(n));
      c.grid.cstar = calibrate_cstar(c.base, c.grid, opt).cstar;
    }
    c.m = adaptive_grid_size(c.grid);
    cells.emplace(n, std::move(c));
  }

  for (double s : cfg.s_values) {
    RateReport rr;
    rr.mode = to_string(mode_for(cfg.r));
    rr.signal_spec = cfg.signal_spec;
    rr.r = cfg.r;
    rr.s = s;
    rr.sigma = cfg.sigma;
    rr.L = cfg.L;
    rr.reps = cfg.reps;
    rr.seed_base = cfg.seed_base;
    rr.theoretical_slope = theoretical_slope(s, cfg.r);
    rr.abscissa = "log(n ln n)";
    for (long n : cfg.n_grid) {
      const double nd = static_cast<double>(n);
      const Cell& c = cells.at(n);
      const double h_star = rate_bandwidth(nd, s, cfg.r);
      const TestSignal f = signal_for(cfg, s, h_star);
      const double truth = exact_norm_or_throw(f, cfg.r, cfg.signal_spec);
      const int splits = split_count(c.base.mode);
      EstimatorConfig oracle = c.base;
      oracle.h = h_star;
      oracle.validate();
      const auto kernel = shared_kernel(M);
      const ProjectionContext octx = make_context(oracle, kernel);
      const auto poly = shared_poly(oracle.r, oracle.K);
      const int m = std::max(c.m, rate_grid_size(h_star));
      const std::uint64_t cell_id =
          (static_cast<std::uint64_t>(n) << 16) ^ static_cast<std::uint64_t>(std::llround(s * 1000));

      std::vector<RepOutcome> adaptive(cfg.reps), fixed(cfg.reps);
      std::vector<double> hhat(cfg.reps);
      std::vector<int> fell_back(cfg.reps);
      parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t k) {
        try {
          const auto obs = simulate(f.evaluator, nd * splits, cfg.sigma, m, splits,
                                    derive_seed(cfg.seed_base, cell_id, k));
          const LepskiResult lr = adaptive_estimate(obs, c.base, c.grid);
          const auto& d = lr.per_candidate[lr.index].diagnostics;
          adaptive[k] = {lr.That, d.evaluations, d.clamped, d.poly_points};
          hhat[k] = lr.hhat;
          fell_back[k] = lr.fallback ? 1 : 0;
          const EstimateResult o = run_estimator(obs, octx, oracle, poly.get());
          fixed[k] = {o.value, o.evaluations, o.clamped, o.poly_points};
        } catch (const Error& e) {
          std::ostringstream where;
          where << "adapt experiment (s=" << s << ", n=" << n << ", rep=" << k << ")";
          rethrow_at(e, where.str());
        }
      });

      const RateRow ra = summarise(n, c.grid.h_max, truth, adaptive, m);
      const RateRow ro = summarise(n, h_star, truth, fixed, m);
      rr.rows.push_back(ra);

      AdaptRow row;
      row.s = s;
      row.n = n;
      row.h_oracle = h_star;
      row.cstar = c.grid.cstar;
      row.truth = truth;
      row.rmse_adaptive = ra.rmse;
      row.rmse_oracle = ro.rmse;
      row.ratio = ro.rmse > 0.0 ? ra.rmse / ro.rmse : (ra.rmse > 0.0 ? kInfinity : 1.0);
      double hsum = 0.0, fsum = 0.0;
      std::vector<double> diff(cfg.reps), ea(cfg.reps), eo(cfg.reps);
      for (int k = 0; k < cfg.reps; ++k) {
        hsum += hhat[k];
        fsum += fell_back[k];
        ea[k] = adaptive[k].estimate - truth;
        eo[k] = fixed[k].estimate - truth;
        diff[k] = ea[k] - eo[k];
      }
      row.mean_hhat = hsum / cfg.reps;
      row.fallback_rate = fsum / cfg.reps;
      auto variance = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const MeanSe ms = mean_and_se(v);
        return ms.se * ms.se * static_cast<double>(v.size());
      };
      row.paired_variance = variance(diff);
      row.unpaired_variance = variance(ea) + variance(eo);
      row.clamp_fraction_adaptive = ra.clamp_fraction;
      row.clamp_fraction_oracle = ro.clamp_fraction;
      row.candidates = c.grid.candidates.size();
      report.max_ratio = std::max(report.max_ratio, row.ratio);
      report.rows.push_back(row);
    }
    fit_report(rr);
    report.per_smoothness.push_back(std::move(rr));
  }
  if (!cfg.output_path.empty()) write_adapt_outputs(report, cfg.output_path);
  return report;
}

std::vector<ExperimentConfig> reference_rate_scenarios() {
  std::vector<ExperimentConfig> out;
  for (double r : {1.0, 3.0, 2.0}) {
    ExperimentConfig c;
    c.mode = ExperimentMode::kRate;
    c.signal_spec = "bumps:auto:1";
    c.r = r;
    c.s = 1.0;
    c.p = 2.0;
    c.sigma = 1.0;
    c.L = 1.0;
    c.n_grid = {256, 512, 1024, 2048, 4096, 8192, 16384};
    c.reps = 200;
    if (r != 2.0) {
      // K = ceil(ln n) grows across the grid.
      c.overrides.c2 = 1.0;
      c.overrides.relax = true;
    }
    if (r == 3.0) c.sigma = 0.01;
    out.push_back(c);
  }
  return out;
}

ExperimentConfig reference_adapt_scenario() {
  ExperimentConfig c;
  c.mode = ExperimentMode::kAdapt;
  c.signal_spec = "bumps:auto:1";
  c.r = 1.0;
  c.p = 2.0;
  c.sigma = 1.0;
  c.L = 1.0;
  c.s_max = 2.0;
  c.s_values = {1.0, 2.0};
  c.n_grid = {1024, 4096};
  c.reps = 200;
  c.overrides.c2 = 1.0;
  return c;
}

std::string rate_csv(const RateReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n,h,truth,mean_estimate,rmse,se_error,clamp_fraction,poly_fraction,grid_size\n";
  for (const auto& r : report.rows)
    os << r.n << ',' << r.h << ',' << r.truth << ',' << r.mean_estimate << ',' << r.rmse << ','
       << r.se_error << ',' << r.clamp_fraction << ',' << r.poly_fraction << ',' << r.grid_size
       << '\n';
  return os.str();
}

std::string adapt_csv(const AdaptReport& report) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "s,n,h_oracle,cstar,truth,rmse_adaptive,rmse_oracle,ratio,mean_hhat,fallback_rate,"
        "paired_variance,unpaired_variance,clamp_fraction_adaptive,clamp_fraction_oracle\n";
  for (const auto& r : report.rows)
    os << r.s << ',' << r.n << ',' << r.h_oracle << ',' << r.cstar << ',' << r.truth << ','
       << r.rmse_adaptive << ',' << r.rmse_oracle << ',' << r.ratio << ',' << r.mean_hhat << ','
       << r.fallback_rate << ',' << r.paired_variance << ',' << r.unpaired_variance << ','
       << r.clamp_fraction_adaptive << ',' << r.clamp_fraction_oracle << '\n';
  return os.str();
}

void write_rate_outputs(const RateReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/rate.csv", rate_csv(report));
  write_file(dir + "/rate.json", to_json(report).dump(2) + "\n");
}

void write_adapt_outputs(const AdaptReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/adapt.csv", adapt_csv(report));
  write_file(dir + "/adapt.json", to_json(report).dump(2) + "\n");
}

}  // namespace lrnorm
