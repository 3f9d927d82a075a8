#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lrnorm/lrnorm.h"

namespace {

struct Request {
  lrn_request* req = lrn_request_new();
  ~Request() { lrn_request_free(req); }
  Request& set(const char* k, const char* v) {
    REQUIRE(lrn_request_set(req, k, v) == LRN_OK);
    return *this;
  }
};

struct Result {
  lrn_result* res = nullptr;
  ~Result() { lrn_result_free(res); }
  nlohmann::json json() const { return nlohmann::json::parse(lrn_result_json(res)); }
};

}  // namespace

TEST_CASE("version and empty error") {
  CHECK(std::string(lrn_version()).size() > 0);
  CHECK(lrn_last_error() != nullptr);
}

TEST_CASE("approx through the C API") {
  Request rq;
  rq.set("r", "1").set("K", "2");
  Result r;
  REQUIRE(lrn_approx(rq.req, &r.res) == LRN_OK);
  const auto j = r.json();
  CHECK(j.at("supError").get<double>() == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(lrn_result_passed(r.res) == 1);
  REQUIRE(lrn_result_file_count(r.res) == 1);
  CHECK(std::string(lrn_result_file_name(r.res, 0)) == "approx.json");
  CHECK(lrn_result_file_name(r.res, 5) == nullptr);
}

TEST_CASE("dispatch by name and parameter errors") {
  Request rq;
  rq.set("k", "2").set("x", "2");
  Result r;
  REQUIRE(lrn_run("hermite", rq.req, &r.res) == LRN_OK);
  CHECK(r.json().at("hermite").get<double>() == doctest::Approx(3.0));

  Result bad;
  CHECK(lrn_run("teleport", rq.req, &bad.res) == LRN_ERR_PARAMETER);
  CHECK(bad.res == nullptr);

  Request unknown;
  unknown.set("colour", "blue");
  Result u;
  CHECK(lrn_approx(unknown.req, &u.res) == LRN_ERR_PARAMETER);
  CHECK(std::string(lrn_last_error()).find("colour") != std::string::npos);

  Request neg;
  neg.set("K", "-3");
  Result n;
  CHECK(lrn_approx(neg.req, &n.res) == LRN_ERR_PARAMETER);

  Request nan;
  nan.set("r", "abc");
  Result a;
  CHECK(lrn_approx(nan.req, &a.res) == LRN_ERR_PARAMETER);
  CHECK(lrn_approx(nan.req, nullptr) == LRN_ERR_PARAMETER);
}

TEST_CASE("numerical failures map to their own status") {
  Request rq;
  rq.set("k", "120").set("x", "1e5");
  Result r;
  CHECK(lrn_hermite(rq.req, &r.res) == LRN_ERR_NUMERICAL);
}

TEST_CASE("request file, environment and explicit values") {
  const auto path = std::filesystem::temp_directory_path() / "lrnorm_capi_test.cfg";
  std::ofstream(path) << "# config\nseed = 4\nr = 3\n";
  Request rq;
  REQUIRE(lrn_request_load_file(rq.req, path.string().c_str()) == LRN_OK);
  CHECK(std::string(lrn_request_get(rq.req, "seed")) == "4");
  ::setenv("LRNORM_SEED", "12", 1);
  REQUIRE(lrn_request_apply_environment(rq.req) == LRN_OK);
  ::unsetenv("LRNORM_SEED");
  CHECK(std::string(lrn_request_get(rq.req, "seed")) == "12");
  rq.set("seed", "5");
  CHECK(std::string(lrn_request_get(rq.req, "seed")) == "5");
  CHECK(lrn_request_get(rq.req, "missing") == nullptr);
  std::filesystem::remove(path);
  CHECK(lrn_request_load_file(rq.req, "/nonexistent/x.cfg") == LRN_ERR_PARAMETER);
}

TEST_CASE("simulate writes its files") {
  Request rq;
  rq.set("signal", "const:1").set("n", "100").set("sigma", "0").set("m", "100");
  Result r;
  REQUIRE(lrn_simulate(rq.req, &r.res) == LRN_OK);
  const auto dir = std::filesystem::temp_directory_path() / "lrnorm_capi_out";
  std::filesystem::remove_all(dir);
  REQUIRE(lrn_result_write(r.res, dir.string().c_str()) == LRN_OK);
  CHECK(std::filesystem::exists(dir / "simulate.json"));
  CHECK(std::filesystem::exists(dir / "simulate.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("estimate and lowerbound") {
  Request rq;
  rq.set("signal", "const:0.5").set("r", "2").set("sigma", "0.01").set("n", "1000").set("h", "0.1");
  Result r;
  REQUIRE(lrn_estimate(rq.req, &r.res) == LRN_OK);
  const auto j = r.json();
  CHECK(j.at("estimate").at("value").get<double>() == doctest::Approx(0.5).epsilon(0.02));

  Request lb;
  lb.set("r", "1").set("p", "2").set("lnN", "9");
  Result l;
  REQUIRE(lrn_lowerbound(lb.req, &l.res) == LRN_OK);
  const auto k = l.json();
  CHECK(k.at("separation").get<double>() > 0.0);
  CHECK(k.at("bound").at("logGap").get<double>() < 0.0);
}
