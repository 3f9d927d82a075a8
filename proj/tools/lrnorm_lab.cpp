#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lrnorm/lrnorm.h"

namespace {

struct Flag {
  std::string key;
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Flag> flags;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"approx", "Best uniform polynomial approximation of |u|^r",
       {{"r", "exponent r > 0"}, {"K", "polynomial degree"}}},
      {"hermite", "Hermite polynomial and unbiased moment estimate",
       {{"k", "degree"}, {"x", "observation"}, {"lambda", "noise scale"}}},
      {"kernel", "Reproducing kernel of order M",
       {{"M", "kernel order"}, {"h", "bandwidth for the reproduction check"},
        {"points", "evaluation points for the reproduction check"}}},
      {"simulate", "Simulate white-noise observations",
       {{"signal", "signal spec"}, {"s", "smoothness for signal construction"},
        {"p", "Besov p"}, {"L", "Besov radius"}, {"h", "bandwidth for bumps:auto"},
        {"n", "total sample size"}, {"sigma", "noise level"}, {"splits", "independent copies"},
        {"m", "path cells"}, {"seed", "seed"}}},
      {"estimate", "One L_r norm estimate at a fixed bandwidth",
       {{"signal", "signal spec"}, {"r", "exponent"}, {"s", "smoothness"}, {"p", "Besov p"},
        {"L", "Besov radius"}, {"sigma", "noise level"}, {"M", "kernel order"},
        {"c1", "threshold constant"}, {"c2", "degree constant"}, {"eps", "clamp exponent"},
        {"n", "effective sample size per split"}, {"h", "bandwidth (default: rate-optimal)"},
        {"seed", "seed"}}},
      {"adapt", "Adaptive versus oracle risk study",
       {{"scenario", "reference"}, {"signal", "signal spec"}, {"r", "exponent"}, {"p", "Besov p"},
        {"sigma", "noise level"}, {"L", "Besov radius"}, {"n", "sample sizes, comma separated"},
        {"reps", "replications"}, {"seed", "seed base"}, {"c1", "threshold constant"},
        {"c2", "degree constant"}, {"eps", "clamp exponent"}, {"cstar", "Lepski constant or auto"},
        {"grid", "dyadic or harmonic"}, {"smax", "largest smoothness"},
        {"svalues", "smoothness values, comma separated"}, {"M", "kernel order"}}},
      {"rates", "Convergence rate study",
       {{"scenario", "r1, r3 or r2"}, {"signal", "signal spec"}, {"r", "exponent"},
        {"s", "smoothness"}, {"p", "Besov p"}, {"sigma", "noise level"}, {"L", "Besov radius"},
        {"n", "sample sizes, comma separated"}, {"reps", "replications"}, {"seed", "seed base"},
        {"c1", "threshold constant"}, {"c2", "degree constant"}, {"eps", "clamp exponent"},
        {"relax", "true to skip the degree conditions on c2"},
        {"h", "fixed bandwidth or auto"}, {"M", "kernel order"}}},
      {"lowerbound", "Two-prior construction and chi-square bound",
       {{"r", "exponent"}, {"p", "Besov p"}, {"lnN", "ln N"}, {"d", "degree factor"},
        {"alpha", "chi-square alpha"}, {"N", "chi-square N"}, {"gridSize", "LP grid size"}}},
      {"invariants", "Run the invariant suite",
       {{"seed", "seed"}, {"faultDegree", "Hermite fault degree (test hook)"},
        {"faultDelta", "Hermite fault size (test hook)"}}},
  };
  return list;
}

int exit_code(lrn_status s) {
  switch (s) {
    case LRN_OK: return 0;
    case LRN_ERR_PARAMETER: return 1;
    case LRN_ERR_INVARIANT: return 3;
    default: return 2;
  }
}

struct RequestDeleter {
  void operator()(lrn_request* r) const { lrn_request_free(r); }
};
struct ResultDeleter {
  void operator()(lrn_result* r) const { lrn_result_free(r); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax L_r norm estimation lab"};
  app.require_subcommand(1);
  std::string out_dir, config_file;
  app.add_option("--out", out_dir, "directory for output files");
  app.add_option("--config", config_file, "key=value file; flags take precedence");
  bool quiet = false;
  app.add_flag("--quiet", quiet, "do not print the result JSON");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    sub->set_help_flag("--help", "Print this help message and exit");
    subs[c.name] = sub;
    for (const auto& f : c.flags) sub->add_option("--" + f.key, values[c.name][f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;

  std::unique_ptr<lrn_request, RequestDeleter> req(lrn_request_new());
  if (!req) return 2;
  lrn_status st = LRN_OK;
  if (!config_file.empty()) st = lrn_request_load_file(req.get(), config_file.c_str());
  if (st == LRN_OK) st = lrn_request_apply_environment(req.get());
  for (const auto& f : commands()) {
    if (f.name != name || st != LRN_OK) continue;
    for (const auto& flag : f.flags)
      if (subs[name]->count("--" + flag.key) > 0)
        st = lrn_request_set(req.get(), flag.key.c_str(), values[name][flag.key].c_str());
  }
  if (st != LRN_OK) {
    std::cerr << "lrnorm-lab: " << lrn_last_error() << "\n";
    return exit_code(st);
  }

  lrn_result* raw = nullptr;
  st = lrn_run(name.c_str(), req.get(), &raw);
  std::unique_ptr<lrn_result, ResultDeleter> res(raw);
  if (st != LRN_OK) {
    std::cerr << "lrnorm-lab " << name << ": " << lrn_last_error() << "\n";
    return exit_code(st);
  }
  if (out_dir.empty()) {
    if (const char* from_file = lrn_request_get(req.get(), "out")) out_dir = from_file;
  }
  if (!out_dir.empty()) {
    st = lrn_result_write(res.get(), out_dir.c_str());
    if (st != LRN_OK) {
      std::cerr << "lrnorm-lab: " << lrn_last_error() << "\n";
      return exit_code(st);
    }
  }
  if (!quiet) std::fputs(lrn_result_json(res.get()), stdout);
  return lrn_result_passed(res.get()) ? 0 : 3;
}
