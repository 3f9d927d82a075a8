#include "lrnorm/json_io.hpp"

#include <cmath>
#include <memory>

#include "lrnorm/error.hpp"

namespace lrnorm {

namespace {

Json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json reals(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

Json to_json(const PolyCoeffs& p) {
  Json j;
  j["r"] = p.r;
  j["K"] = p.K;
  j["coeffs"] = reals(p.coeffs);
  j["chebyshevCoeffs"] = reals(p.cheb_coeffs);
  j["supError"] = p.sup_error;
  j["alternationPoints"] = reals(p.alternation_points);
  j["levelledError"] = p.levelled_error;
  j["levelledSpread"] = p.levelled_spread;
  j["iterations"] = p.iterations;
  j["exact"] = p.exact;
  return j;
}

std::vector<double> reproduction_residuals(const Kernel& k, double h, int points) {
  require(points >= 2, "reproduction_residuals: needs at least two points");
  auto kp = std::make_shared<const Kernel>(k);
  const ProjectionContext ctx = ProjectionContext::make(kp, h, 1.0, 1.0);
  std::vector<double> out;
  for (int deg = 0; deg <= k.M; ++deg) {
    const auto mono = [deg](double t) { return std::pow(t, deg); };
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const double x = static_cast<double>(i) / (points - 1);
      worst = std::max(worst, std::abs(project(mono, ctx, x) - mono(x)));
    }
    out.push_back(worst);
  }
  return out;
}

Json to_json(const Kernel& k) {
  Json j;
  j["M"] = k.M;
  j["coefficients"] = reals(k.interior_coeffs);
  j["legendreCoefficients"] = reals(k.interior.legendre_coeffs());
  j["l2Norm"] = k.l2_norm;
  j["reproductionResiduals"] = reals(reproduction_residuals(k));
  return j;
}

Json to_json(const TestSignal& f, double r) {
  Json j;
  j["kind"] = f.kind;
  j["claimedS"] = real(f.claimed_s);
  j["claimedP"] = real(f.claimed_p);
  j["claimedL"] = real(f.claimed_L);
  j["breakpoints"] = reals(f.breakpoints);
  const auto e = f.exact_norm(r);
  j["r"] = r;
  j["exactNorm"] = e ? real(*e) : Json(nullptr);
  return j;
}

Json to_json(const EstimateResult& e) {
  Json j;
  j["value"] = real(e.value);
  j["integral"] = real(e.integral);
  j["evaluations"] = e.evaluations;
  j["clamped"] = e.clamped;
  j["polyPoints"] = e.poly_points;
  return j;
}

Json to_json(const LepskiResult& l) {
  Json j;
  j["hhat"] = l.hhat;
  j["That"] = real(l.That);
  j["index"] = l.index;
  j["fallback"] = l.fallback;
  Json per = Json::array();
  for (const auto& c : l.per_candidate) {
    Json e;
    e["h"] = c.h;
    e["T"] = real(c.T);
    e["lambda"] = c.lambda;
    e["clamped"] = c.diagnostics.clamped;
    per.push_back(e);
  }
  j["perCandidate"] = per;
  return j;
}

Json to_json(const CalibrationResult& c) {
  Json j;
  j["cstar"] = c.cstar;
  j["selectionRate"] = c.selection_rate;
  Json curve = Json::array();
  for (const auto& [cs, rate] : c.curve) curve.push_back({cs, rate});
  j["curve"] = curve;
  return j;
}

Json to_json(const DiscreteMeasure& m) {
  Json j;
  j["support"] = reals(m.support);
  j["weights"] = reals(m.weights);
  j["totalMass"] = m.total_mass();
  return j;
}

Json to_json(const PriorPair& p) {
  Json j;
  j["r"] = p.r;
  j["p"] = p.p;
  j["lnN"] = p.lnN;
  j["d"] = p.d;
  j["q"] = p.q;
  j["K"] = p.K;
  Json lp;
  lp["value"] = p.lp.value;
  lp["iterations"] = p.lp.iterations;
  lp["constraintResidual"] = p.lp.constraint_residual;
  lp["nu0"] = to_json(p.lp.nu0);
  lp["nu1"] = to_json(p.lp.nu1);
  j["lp"] = lp;
  j["nu0Tilde"] = to_json(p.nu0_tilde);
  j["nu1Tilde"] = to_json(p.nu1_tilde);
  j["mu0"] = to_json(p.mu0);
  j["mu1"] = to_json(p.mu1);
  j["separation"] = p.separation;
  j["momentResiduals"] = reals(p.moment_residuals);
  j["pMomentBounds"] = {p.p_moment_bounds.first, p.p_moment_bounds.second};
  j["pMomentLimit"] = p.p_moment_limit;
  Json cond;
  cond["momentMatch"] = p.moment_match_ok();
  cond["separation"] = p.separation_ok();
  cond["momentBound"] = p.moment_bound_ok();
  cond["support"] = p.support_ok();
  j["conditions"] = cond;
  return j;
}

Json to_json(const TvBound& t) {
  Json j;
  j["chi2"] = real(static_cast<double>(t.chi2));
  j["logChi2"] = real(static_cast<double>(std::log(t.chi2)));
  j["logGap"] = real(static_cast<double>(t.log_gap));
  j["tv"] = real(t.tv);
  return j;
}

Json to_json(const RateReport& r) {
  Json j;
  j["mode"] = r.mode;
  j["signal"] = r.signal_spec;
  j["r"] = r.r;
  j["s"] = r.s;
  j["sigma"] = r.sigma;
  j["L"] = r.L;
  j["reps"] = r.reps;
  j["seedBase"] = r.seed_base;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json e;
    e["n"] = row.n;
    e["h"] = row.h;
    e["truth"] = row.truth;
    e["meanEstimate"] = real(row.mean_estimate);
    e["rmse"] = real(row.rmse);
    e["seError"] = real(row.se_error);
    e["clampFraction"] = row.clamp_fraction;
    e["polyFraction"] = row.poly_fraction;
    e["gridSize"] = row.grid_size;
    rows.push_back(e);
  }
  j["rows"] = rows;
  j["abscissa"] = r.abscissa;
  j["fittedSlope"] = real(r.fitted_slope);
  j["slopeCI"] = {real(r.slope_ci.first), real(r.slope_ci.second)};
  j["slopeSE"] = real(r.slope_se);
  j["residualSlopeCI"] = {real(r.residual_slope_ci.first), real(r.residual_slope_ci.second)};
  j["theoreticalSlope"] = r.theoretical_slope;
  j["degenerate"] = r.degenerate;
  return j;
}

Json to_json(const AdaptReport& r) {
  Json j;
  j["eps"] = r.eps;
  j["smax"] = r.s_max;
  j["grid"] = r.grid_kind;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json e;
    e["s"] = row.s;
    e["n"] = row.n;
    e["hOracle"] = row.h_oracle;
    e["cstar"] = row.cstar;
    e["truth"] = row.truth;
    e["rmseAdaptive"] = real(row.rmse_adaptive);
    e["rmseOracle"] = real(row.rmse_oracle);
    e["ratio"] = real(row.ratio);
    e["meanHhat"] = row.mean_hhat;
    e["fallbackRate"] = row.fallback_rate;
    e["pairedVariance"] = row.paired_variance;
    e["unpairedVariance"] = row.unpaired_variance;
    e["clampFractionAdaptive"] = row.clamp_fraction_adaptive;
    e["clampFractionOracle"] = row.clamp_fraction_oracle;
    e["candidates"] = row.candidates;
    rows.push_back(e);
  }
  j["ratios"] = rows;
  j["maxRatio"] = real(r.max_ratio);
  Json per = Json::array();
  for (const auto& rr : r.per_smoothness) per.push_back(to_json(rr));
  j["perSmoothness"] = per;
  return j;
}

Json to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  for (const auto& [k, v] : c.to_key_values()) j[k] = v;
  return j;
}

void apply_json(ExperimentConfig& cfg, const Json& j) {
  require(j.is_object(), "config JSON must be an object");
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ",";
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else if (value.is_number() || value.is_boolean()) {
      text = value.dump();
    } else {
      throw ParameterError("config JSON: unsupported value for '" + key + "'");
    }
    cfg.set(key, text);
  }
}

}  // namespace lrnorm
