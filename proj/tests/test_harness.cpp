#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "lrnorm/error.hpp"
#include "lrnorm/harness.hpp"
#include "lrnorm/json_io.hpp"
#include "lrnorm/rng.hpp"
#include "lrnorm/stats.hpp"

using namespace lrnorm;

namespace {

ExperimentConfig small_even_study(int reps) {
  ExperimentConfig c;
  c.signal_spec = "bumps:auto:2";
  c.r = 2.0;
  c.s = 1.0;
  c.n_grid = {256, 1024, 4096};
  c.reps = reps;
  c.seed_base = 5;
  return c;
}

}  // namespace

TEST_CASE("key=value parsing") {
  const auto kv = parse_key_values("# study\nr = 3\n\n  sigma=0.5  # noise\nn=256,512\n");
  CHECK(kv.at("r") == "3");
  CHECK(kv.at("sigma") == "0.5");
  ExperimentConfig c;
  for (const auto& [k, v] : kv) c.set(k, v);
  CHECK(c.r == 3.0);
  CHECK(c.sigma == 0.5);
  CHECK(c.n_grid == std::vector<long>{256, 512});
  CHECK_THROWS_AS(c.set("colour", "blue"), ParameterError);
  CHECK_THROWS_AS(c.set("r", "three"), ParameterError);
  CHECK_THROWS_AS(c.set("relax", "maybe"), ParameterError);
}

TEST_CASE("key=value round trip") {
  ExperimentConfig c;
  c.set("mode", "adapt");
  c.set("svalues", "1,1.5");
  c.set("c2", "0.7");
  c.set("grid", "harmonic");
  c.set("relax", "true");
  ExperimentConfig d;
  for (const auto& [k, v] : c.to_key_values()) d.set(k, v);
  CHECK(d.to_key_values() == c.to_key_values());
  CHECK(d.overrides.c2.value() == 0.7);
  CHECK(d.overrides.relax);
}

TEST_CASE("file, environment and explicit settings") {
  const auto path = std::filesystem::temp_directory_path() / "lrnorm_harness_test.cfg";
  std::ofstream(path) << "seed = 11\nreps = 7\n";
  ExperimentConfig c;
  for (const auto& [k, v] : read_key_value_file(path.string())) c.set(k, v);
  CHECK(c.seed_base == 11);
  ::setenv("LRNORM_SEED", "99", 1);
  apply_seed_environment(c);
  ::unsetenv("LRNORM_SEED");
  CHECK(c.seed_base == 99);
  c.set("seed", "3");
  CHECK(c.seed_base == 3);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_key_value_file("/nonexistent/lrnorm.cfg"), ParameterError);
}

TEST_CASE("validation") {
  ExperimentConfig c;
  c.n_grid = {100};
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.n_grid = {512, 256};
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = ExperimentConfig{};
  c.sigma = -1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("rate schedules") {
  CHECK(rate_bandwidth(1000.0, 1.0, 1.0) == doctest::Approx(std::pow(1000.0 * std::log(1000.0), -1.0 / 3.0)));
  CHECK(rate_bandwidth(1000.0, 1.0, 2.0) == doctest::Approx(std::pow(1000.0, -1.0 / 2.5)));
  CHECK(theoretical_slope(1.0, 1.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(theoretical_slope(1.0, 3.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(theoretical_slope(1.0, 2.0) == doctest::Approx(-0.4));
  CHECK(rate_abscissa(1000.0, 1.0) == doctest::Approx(std::log(1000.0 * std::log(1000.0))));
  CHECK(rate_abscissa(1000.0, 2.0) == doctest::Approx(std::log(1000.0)));
}

TEST_CASE("slope fit") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {1, 3, 5, 7};
  const std::vector<double> se = {0.1, 0.1, 0.1, 0.1};
  const SlopeFit f = fit_slope(x, y, se);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.ci_lo < 2.0);
  CHECK(f.ci_hi > 2.0);
  CHECK(f.residual_se == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("counter-based streams") {
  CounterRng a(7, 0), b(7, 0), c(7, 1);
  for (int i = 0; i < 10; ++i) {
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
  }
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
}

TEST_CASE("noiseless constant gives a degenerate fit") {
  ExperimentConfig c;
  c.signal_spec = "const:0.5";
  c.r = 3.0;
  c.sigma = 0.0;
  c.L = 2.0;
  c.n_grid = {256, 512, 1024};
  c.reps = 2;
  c.overrides.c2 = 1.0;
  c.overrides.relax = true;
  const RateReport rep = run_rate_experiment(c);
  for (const auto& row : rep.rows) CHECK(row.rmse <= 1e-8);
  CHECK(rep.degenerate);
}

TEST_CASE("signals without a closed-form norm are rejected") {
  ExperimentConfig c;
  c.signal_spec = "poly:0,1";
  c.reps = 2;
  CHECK_THROWS_AS(run_rate_experiment(c), ParameterError);
}

TEST_CASE("rate studies are reproducible and tighten with more replications") {
  const RateReport a = run_rate_experiment(small_even_study(100));
  const RateReport b = run_rate_experiment(small_even_study(100));
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(rate_csv(a) == rate_csv(b));
  const RateReport c = run_rate_experiment(small_even_study(200));
  const double wa = a.slope_ci.second - a.slope_ci.first;
  const double wc = c.slope_ci.second - c.slope_ci.first;
  CHECK(wc / wa == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.3));
}

TEST_CASE("paired arms of an adaptation study") {
  ExperimentConfig c = reference_adapt_scenario();
  c.n_grid = {4096};
  c.s_values = {1.0};
  c.reps = 30;
  c.overrides.cstar = 30.0;
  const AdaptReport rep = run_adapt_experiment(c);
  REQUIRE(rep.rows.size() == 1);
  const AdaptRow& row = rep.rows[0];
  CHECK(4.0 * c.r * rep.eps * (2.0 * rep.s_max + 1.0) < 1.0);
  CHECK(row.cstar == 30.0);
  CHECK(row.paired_variance < row.unpaired_variance);
  CHECK(row.ratio == doctest::Approx(row.rmse_adaptive / row.rmse_oracle));
}

TEST_CASE("report outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "lrnorm_harness_out";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = small_even_study(5);
  c.output_path = dir.string();
  const RateReport rep = run_rate_experiment(c);
  CHECK(std::filesystem::exists(dir / "rate.csv"));
  CHECK(std::filesystem::exists(dir / "rate.json"));
  std::ifstream in(dir / "rate.json");
  const Json j = Json::parse(in);
  CHECK(j.at("rows").size() == rep.rows.size());
  std::filesystem::remove_all(dir);
}
