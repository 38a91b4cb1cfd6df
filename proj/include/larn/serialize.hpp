#pragma once

#include "larn/larn_estimator.hpp"
#include "larn/model_selection.hpp"
#include "larn/scalar_rule.hpp"
#include "larn/simbench.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace larn {

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const CvResult& cv);
nlohmann::json to_json(const RiskReport& report);
nlohmann::json to_json(const SimConfig& cfg);

/// Missing keys keep their defaults; unknown keys and wrongly typed values
/// raise ConfigError naming the field.
SimConfig sim_config_from_json(const nlohmann::json& j);

/// A benchmark run: a base SimConfig swept over (p, q) settings and rho values.
struct BenchmarkConfig {
    SimConfig base;
    std::vector<std::pair<Index, Index>> settings{{20, 20}, {60, 60}};
    std::vector<double> rhos{0.7};
    std::vector<Method> methods{Method::Larn, Method::Tgl, Method::SepLasso};
    LambdaScale lambda_scale = LambdaScale::Log10PerSample;
};

/// The SimConfig keys plus "settings" ([[p, q], ...]), "rhos", "methods" and
/// "lambda_scale".
/// With `full` the defaults become 100 replications over all four settings.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j, bool full = false);

/// Error surface in long format: lambda_index, lambda, threshold_index, threshold, cv_rmse.
std::string cv_surface_csv(const CvResult& cv);

} // namespace larn
