#include "lrnorm/lrnorm.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lrnorm/adapt.hpp"
#include "lrnorm/error.hpp"
#include "lrnorm/estimators.hpp"
#include "lrnorm/gwn.hpp"
#include "lrnorm/harness.hpp"
#include "lrnorm/hermite.hpp"
#include "lrnorm/invariants.hpp"
#include "lrnorm/json_io.hpp"
#include "lrnorm/kernels.hpp"
#include "lrnorm/lowerbound.hpp"
#include "lrnorm/polyapprox.hpp"
#include "lrnorm/rng.hpp"
#include "lrnorm/signal_spec.hpp"

struct lrn_request {
  std::map<std::string, std::string> values;
};

struct lrn_result {
  std::string json;
  bool passed = true;
  std::vector<std::pair<std::string, std::string>> files;
};

namespace {

using namespace lrnorm;

thread_local std::string g_last_error;

lrn_status fail(lrn_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
lrn_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return LRN_OK;
  } catch (const lrnorm::Error& e) {
    switch (e.code()) {
      case ErrorCode::kParameter: return fail(LRN_ERR_PARAMETER, e.what());
      case ErrorCode::kNumerical: return fail(LRN_ERR_NUMERICAL, e.what());
      case ErrorCode::kInvariant: return fail(LRN_ERR_INVARIANT, e.what());
      default: return fail(LRN_ERR_INTERNAL, e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    return fail(LRN_ERR_PARAMETER, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LRN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LRN_ERR_INTERNAL, e.what());
  }
}

// Typed access to request keys with per-operation defaults. Every key must be
// consumed, so misspelled flags are reported instead of ignored.
class Args {
 public:
  explicit Args(const lrn_request* req) {
    require(req != nullptr, "request is null");
    values_ = req->values;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) {
    const std::string v = text(key, "");
    if (v.empty()) return fallback;
    if (v == "inf") return kInfinity;
    std::size_t pos = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == v.size() && !std::isnan(x), key + ": expected a number, got '" + v + "'");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    const std::string v = text(key, "");
    if (v.empty()) return fallback;
    std::size_t pos = 0;
    long long x = 0;
    try {
      x = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos == v.size(), key + ": expected an integer, got '" + v + "'");
    return x;
  }

  std::uint64_t seed(std::uint64_t fallback) {
    const long long s = integer("seed", static_cast<long long>(fallback));
    require(s >= 0, "seed must be nonnegative");
    return static_cast<std::uint64_t>(s);
  }

  // Output directory is handled by the caller.
  void finish() {
    used_.insert("out");
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ParameterError("unknown key '" + k + "' for this operation");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

lrn_result* make_result(const Json& j) {
  auto* res = new lrn_result;
  res->json = j.dump(2) + "\n";
  return res;
}

SignalContext signal_context(Args& a) {
  SignalContext sc;
  sc.s = a.real("s", 1.0);
  sc.p = a.real("p", 2.0);
  sc.L = a.real("L", 1.0);
  sc.h = a.real("h", 0.0);
  return sc;
}

void op_approx(Args& a, lrn_result*& out) {
  const double r = a.real("r", 1.0);
  const long long K = a.integer("K", 8);
  a.finish();
  require(K >= 0 && K <= kMaxApproxDegree, "K must lie in [0, " + std::to_string(kMaxApproxDegree) + "]");
  const PolyCoeffs p = best_poly_approx(r, static_cast<int>(K));
  out = make_result(to_json(p));
  out->files.push_back({"approx.json", out->json});
}

void op_hermite(Args& a, lrn_result*& out) {
  const long long k = a.integer("k", 4);
  const double x = a.real("x", 0.0);
  const double lambda = a.real("lambda", 1.0);
  a.finish();
  require(k >= 0, "k must be nonnegative");
  require(lambda >= 0.0, "lambda must be nonnegative");
  std::vector<double> all(static_cast<std::size_t>(k) + 1);
  scaled_hermite_all(x, lambda, all);
  Json j;
  j["k"] = k;
  j["x"] = x;
  j["lambda"] = lambda;
  j["hermite"] = lambda > 0.0 ? Json(hermite_eval(static_cast<int>(k), x / lambda)) : Json(nullptr);
  j["momentEstimate"] = all.back();
  j["scaledSequence"] = all;
  out = make_result(j);
  out->files.push_back({"hermite.json", out->json});
}

void op_kernel(Args& a, lrn_result*& out) {
  const long long M = a.integer("M", 2);
  const double h = a.real("h", 0.1);
  const long long points = a.integer("points", 50);
  a.finish();
  require(M >= 0 && M <= kMaxKernelOrder, "M must lie in [0, " + std::to_string(kMaxKernelOrder) + "]");
  const Kernel k = make_kernel(static_cast<int>(M));
  Json j = to_json(k);
  j["reproductionResiduals"] = reproduction_residuals(k, h, static_cast<int>(points));
  j["h"] = h;
  out = make_result(j);
  out->files.push_back({"kernel.json", out->json});
}

void op_simulate(Args& a, lrn_result*& out) {
  const std::string spec = a.text("signal", "cusp:0.5");
  const SignalContext sc = signal_context(a);
  const double n = a.real("n", 1024.0);
  const double sigma = a.real("sigma", 1.0);
  const long long splits = a.integer("splits", 1);
  const long long m = a.integer("m", default_grid_size(sc.h > 0.0 ? sc.h : 0.1));
  const std::uint64_t seed = a.seed(1);
  a.finish();
  require(splits >= 1, "splits must be at least 1");
  require(m >= kMinGridSize, "m must be at least " + std::to_string(kMinGridSize));
  const TestSignal f = parse_signal(spec, sc);
  const auto obs = simulate(f.evaluator, n, sigma, static_cast<int>(m), static_cast<int>(splits), seed);
  Json j;
  j["signal"] = spec;
  j["n"] = n;
  j["sigma"] = sigma;
  j["m"] = m;
  j["splits"] = splits;
  j["seed"] = seed;
  j["effectiveN"] = obs.front().effective_n;
  std::ostringstream csv;
  csv.precision(17);
  csv << "split,t,increment\n";
  for (const auto& o : obs)
    for (int i = 0; i < o.m; ++i) csv << o.split_index << ',' << i * o.dt << ',' << o.increments[i] << '\n';
  out = make_result(j);
  out->files.push_back({"simulate.json", out->json});
  out->files.push_back({"simulate.csv", csv.str()});
}

void op_estimate(Args& a, lrn_result*& out) {
  ExperimentConfig cfg;
  cfg.signal_spec = a.text("signal", cfg.signal_spec);
  cfg.r = a.real("r", 1.0);
  cfg.s = a.real("s", 1.0);
  cfg.p = a.real("p", 2.0);
  cfg.L = a.real("L", 1.0);
  cfg.sigma = a.real("sigma", 1.0);
  cfg.M = static_cast<int>(a.integer("M", 0));
  if (a.has("c1")) cfg.overrides.c1 = a.real("c1", 0.0);
  if (a.has("c2")) cfg.overrides.c2 = a.real("c2", 0.0);
  if (a.has("eps")) cfg.overrides.eps = a.real("eps", 0.0);
  const double n = a.real("n", 1024.0);
  const double h = a.real("h", 0.0);
  const std::uint64_t seed = a.seed(1);
  a.finish();
  require(n > 1.0, "n must exceed 1");
  const double hh = h > 0.0 ? h : rate_bandwidth(n, cfg.s, cfg.r);
  const EstimatorConfig ec = estimator_config_for(cfg, n, hh);
  SignalContext sc;
  sc.s = cfg.s;
  sc.p = cfg.p;
  sc.L = cfg.L;
  sc.h = hh;
  const TestSignal f = parse_signal(cfg.signal_spec, sc);
  const int splits = split_count(ec.mode);
  const auto obs = simulate(f.evaluator, n * splits, ec.sigma, rate_grid_size(hh), splits, seed);
  const auto poly = ec.mode == EstimatorMode::kEven ? nullptr : shared_poly(ec.r, ec.K);
  const EstimateResult res = run_estimator(obs, make_context(ec, shared_kernel(ec.M)), ec, poly.get());
  Json j;
  j["signal"] = cfg.signal_spec;
  j["mode"] = to_string(ec.mode);
  j["r"] = cfg.r;
  j["n"] = n;
  j["h"] = hh;
  j["M"] = ec.M;
  j["K"] = ec.K;
  j["seed"] = seed;
  j["estimate"] = to_json(res);
  const auto truth = f.exact_norm(cfg.r);
  j["truth"] = truth ? Json(*truth) : Json(nullptr);
  out = make_result(j);
  out->files.push_back({"estimate.json", out->json});
}

// Harness-backed operations take the ExperimentConfig keys directly.
ExperimentConfig experiment_config(const lrn_request* req, ExperimentMode mode,
                                   const std::function<void(ExperimentConfig&, const std::string&)>& base) {
  ExperimentConfig cfg;
  auto values = req->values;
  if (const auto it = values.find("scenario"); it != values.end()) {
    base(cfg, it->second);
    values.erase(it);
  }
  cfg.mode = mode;
  for (const auto& [k, v] : values)
    if (k != "out" && k != "mode") cfg.set(k, v);
  return cfg;
}

void op_rates(const lrn_request* req, lrn_result*& out) {
  const ExperimentConfig cfg = experiment_config(req, ExperimentMode::kRate, [](ExperimentConfig& c, const std::string& s) {
    const auto refs = reference_rate_scenarios();
    if (s == "r1") {
      c = refs[0];
    } else if (s == "r3") {
      c = refs[1];
    } else if (s == "r2") {
      c = refs[2];
    } else {
      throw ParameterError("scenario must be r1, r3 or r2, got '" + s + "'");
    }
  });
  const RateReport rep = run_rate_experiment(cfg);
  Json j = to_json(rep);
  j["config"] = to_json(cfg);
  out = make_result(j);
  out->files.push_back({"rate.json", to_json(rep).dump(2) + "\n"});
  out->files.push_back({"rate.csv", rate_csv(rep)});
}

void op_adapt(const lrn_request* req, lrn_result*& out) {
  const ExperimentConfig cfg = experiment_config(req, ExperimentMode::kAdapt, [](ExperimentConfig& c, const std::string& s) {
    if (s != "reference") throw ParameterError("scenario must be reference, got '" + s + "'");
    c = reference_adapt_scenario();
  });
  const AdaptReport rep = run_adapt_experiment(cfg);
  Json j = to_json(rep);
  j["config"] = to_json(cfg);
  out = make_result(j);
  out->files.push_back({"adapt.json", to_json(rep).dump(2) + "\n"});
  out->files.push_back({"adapt.csv", adapt_csv(rep)});
}

void op_lowerbound(Args& a, lrn_result*& out) {
  const double r = a.real("r", 1.0);
  const double p = a.real("p", 2.0);
  const double lnN = a.real("lnN", 9.0);
  const double d = a.real("d", 4.0);
  const double alpha = a.real("alpha", 1.0);
  const long long N = a.integer("N", 100);
  const long long grid = a.integer("gridSize", 0);
  a.finish();
  require(N >= 1, "N must be positive");
  const PriorPair pp = build_prior_pair(r, p, lnN, d, static_cast<int>(grid));
  Json j = to_json(pp);
  const long double chi2 = chi2_bound(alpha, d, static_cast<long>(N));
  Json b = to_json(tv_bound_from_chi2(chi2));
  b["alpha"] = alpha;
  b["N"] = N;
  j["bound"] = b;
  out = make_result(j);
  out->files.push_back({"lowerbound.json", out->json});
}

void op_invariants(Args& a, lrn_result*& out) {
  InvariantOptions opt;
  opt.seed = a.seed(opt.seed);
  opt.hermite_fault_degree = static_cast<int>(a.integer("faultDegree", -1));
  opt.hermite_fault_delta = a.real("faultDelta", 0.0);
  a.finish();
  const InvariantReport rep = run_invariant_suite(opt);
  out = new lrn_result;
  out->json = rep.to_json();
  out->passed = rep.all_passed();
  out->files.push_back({"invariants.json", out->json});
}

lrn_status run_args(const lrn_request* req, lrn_result** out,
                    void (*op)(Args&, lrn_result*&)) {
  if (!out) return fail(LRN_ERR_PARAMETER, "output pointer is null");
  *out = nullptr;
  return guarded([&] {
    Args a(req);
    lrn_result* res = nullptr;
    op(a, res);
    *out = res;
  });
}

lrn_status run_request(const lrn_request* req, lrn_result** out,
                       void (*op)(const lrn_request*, lrn_result*&)) {
  if (!out) return fail(LRN_ERR_PARAMETER, "output pointer is null");
  *out = nullptr;
  return guarded([&] {
    require(req != nullptr, "request is null");
    lrn_result* res = nullptr;
    op(req, res);
    *out = res;
  });
}

}  // namespace

extern "C" {

const char* lrn_version(void) { return "0.1.0"; }

const char* lrn_last_error(void) { return g_last_error.c_str(); }

lrn_request* lrn_request_new(void) { return new (std::nothrow) lrn_request; }

void lrn_request_free(lrn_request* req) { delete req; }

lrn_status lrn_request_set(lrn_request* req, const char* key, const char* value) {
  if (!req || !key || !value) return fail(LRN_ERR_PARAMETER, "request, key and value must be non-null");
  if (!*key) return fail(LRN_ERR_PARAMETER, "empty key");
  req->values[key] = value;
  return LRN_OK;
}

const char* lrn_request_get(const lrn_request* req, const char* key) {
  if (!req || !key) return nullptr;
  const auto it = req->values.find(key);
  return it == req->values.end() ? nullptr : it->second.c_str();
}

lrn_status lrn_request_load_file(lrn_request* req, const char* path) {
  if (!req || !path) return fail(LRN_ERR_PARAMETER, "request and path must be non-null");
  return guarded([&] {
    for (const auto& [k, v] : read_key_value_file(path)) req->values[k] = v;
  });
}

lrn_status lrn_request_apply_environment(lrn_request* req) {
  if (!req) return fail(LRN_ERR_PARAMETER, "request is null");
  return guarded([&] {
    ExperimentConfig probe;
    probe.seed_base = 0;
    const char* env = std::getenv("LRNORM_SEED");
    if (!env || !*env) return;
    apply_seed_environment(probe);
    req->values["seed"] = std::to_string(probe.seed_base);
  });
}

lrn_status lrn_approx(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_approx); }
lrn_status lrn_hermite(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_hermite); }
lrn_status lrn_kernel(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_kernel); }
lrn_status lrn_simulate(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_simulate); }
lrn_status lrn_estimate(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_estimate); }
lrn_status lrn_adapt(const lrn_request* req, lrn_result** out) { return run_request(req, out, op_adapt); }
lrn_status lrn_rates(const lrn_request* req, lrn_result** out) { return run_request(req, out, op_rates); }
lrn_status lrn_lowerbound(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_lowerbound); }
lrn_status lrn_invariants(const lrn_request* req, lrn_result** out) { return run_args(req, out, op_invariants); }

lrn_status lrn_run(const char* operation, const lrn_request* req, lrn_result** out) {
  if (!operation) return fail(LRN_ERR_PARAMETER, "operation is null");
  const std::string op = operation;
  if (op == "approx") return lrn_approx(req, out);
  if (op == "hermite") return lrn_hermite(req, out);
  if (op == "kernel") return lrn_kernel(req, out);
  if (op == "simulate") return lrn_simulate(req, out);
  if (op == "estimate") return lrn_estimate(req, out);
  if (op == "adapt") return lrn_adapt(req, out);
  if (op == "rates") return lrn_rates(req, out);
  if (op == "lowerbound") return lrn_lowerbound(req, out);
  if (op == "invariants") return lrn_invariants(req, out);
  if (out) *out = nullptr;
  return fail(LRN_ERR_PARAMETER, "unknown operation '" + op + "'");
}

const char* lrn_result_json(const lrn_result* res) { return res ? res->json.c_str() : ""; }

int lrn_result_passed(const lrn_result* res) { return res && res->passed ? 1 : 0; }

int lrn_result_file_count(const lrn_result* res) {
  return res ? static_cast<int>(res->files.size()) : 0;
}

const char* lrn_result_file_name(const lrn_result* res, int index) {
  if (!res || index < 0 || index >= static_cast<int>(res->files.size())) return nullptr;
  return res->files[index].first.c_str();
}

const char* lrn_result_file_contents(const lrn_result* res, int index) {
  if (!res || index < 0 || index >= static_cast<int>(res->files.size())) return nullptr;
  return res->files[index].second.c_str();
}

lrn_status lrn_result_write(const lrn_result* res, const char* dir) {
  if (!res || !dir) return fail(LRN_ERR_PARAMETER, "result and directory must be non-null");
  return guarded([&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ParameterError(std::string("cannot create '") + dir + "': " + ec.message());
    for (const auto& [name, content] : res->files) {
      const std::string path = (std::filesystem::path(dir) / name).string();
      std::ofstream f(path, std::ios::binary);
      if (!f) throw ParameterError("cannot write '" + path + "'");
      f << content;
    }
  });
}

void lrn_result_free(lrn_result* res) { delete res; }

}  // extern "C"
