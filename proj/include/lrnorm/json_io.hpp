#pragma once

#include <json.hpp>

#include "lrnorm/adapt.hpp"
#include "lrnorm/besov.hpp"
#include "lrnorm/harness.hpp"
#include "lrnorm/kernels.hpp"
#include "lrnorm/lowerbound.hpp"
#include "lrnorm/polyapprox.hpp"

namespace lrnorm {

using Json = nlohmann::ordered_json;

Json to_json(const PolyCoeffs& p);
/// {M, coefficients, l2Norm, reproductionResiduals}; residuals are the worst
/// monomial reproduction errors of degree 0..M over interior and boundary points.
Json to_json(const Kernel& k);
Json to_json(const TestSignal& f, double r);
Json to_json(const EstimateResult& e);
Json to_json(const LepskiResult& l);
Json to_json(const CalibrationResult& c);
Json to_json(const DiscreteMeasure& m);
Json to_json(const PriorPair& p);
Json to_json(const TvBound& t);
Json to_json(const RateReport& r);
Json to_json(const AdaptReport& r);
Json to_json(const ExperimentConfig& c);

/// Applies a flat JSON object of key/value pairs (numbers, strings, or arrays
/// for list keys) on top of `cfg`.
void apply_json(ExperimentConfig& cfg, const Json& j);

/// Largest |project(t^k) - x^k| over `points` evaluation points in [0, 1], k = 0..M.
std::vector<double> reproduction_residuals(const Kernel& k, double h = 0.1, int points = 50);

}  // namespace lrnorm
