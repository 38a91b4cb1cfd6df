#pragma once

#include "larn/larn_estimator.hpp"
#include "larn/model_selection.hpp"
#include "larn/types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace larn {

struct SimConfig {
    Index n = 50;
    Index p = 20;
    Index q = 20;
    double rho = 0.7;        // AR(1) parameter of the error covariance
    double design_ar = 0.7;  // AR(1) parameter of the design covariance
    double signal_mean = 2.0;
    double signal_sd = 1.0;
    double within_row_prob = 0.3;
    double row_prob = 0.125;
    std::uint64_t seed = 1;
    int replications = 20;

    void validate() const;
};

/// Entry (i, j) = rho^|i - j|.
Matrix ar1_covariance(Index dim, double rho);

/// n rows drawn i.i.d. from N(0, cov) as Z L' with L the Cholesky factor of cov.
Matrix sample_gaussian_rows(Index n, const Matrix& cov, std::mt19937_64& gen);
Matrix sample_gaussian_rows(Index n, const Matrix& cov, std::uint64_t seed);

struct SimInstance {
    Dataset data;
    Matrix B0;
};

/// X ~ N(0, AR1(design_ar)), E ~ N(0, AR1(rho)), B0 = W * K * Q elementwise
/// with W ~ N(signal_mean, signal_sd^2), K ~ Bernoulli(within_row_prob),
/// Q rows all-0 or all-1 ~ Bernoulli(row_prob); Y = X B0 + E.
/// Uses stream `stream` of cfg.seed.
SimInstance generate_instance(const SimConfig& cfg, std::uint64_t stream = 0);

struct MetricsRow {
    std::string setting;
    double rho = 0.0;
    int replication = 0;
    std::string method;
    double cv_rmse = 0.0;
    double mae = 0.0;
    double tp = 0.0;
    double tn = 0.0;
};

/// MAE over all entries; TP and TN use exact zeros. An empty denominator gives 1.
MetricsRow metrics(const Matrix& B_hat, const Matrix& B0, double cv_rmse);

/// Per-column lasso min ||y - X beta||^2 + lambda ||beta||_1 by cyclic coordinate descent.
Matrix separate_lasso(const Dataset& data, double lambda, double tol = 1e-10, int max_sweeps = 100000);

enum class Method { Larn, Tgl, SepLasso };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct BenchmarkOptions {
    std::vector<Method> methods{Method::Larn, Method::Tgl, Method::SepLasso};
    CvGrid grid;          // seed is overridden per replication
    LarnConfig larn;      // penalty used by LARN; TGL reuses the solver settings
    int jobs = 1;
    std::string setting;  // label written to the CSV; defaults to "p<p>q<q>"
};

/// Fit one method on one instance: cross-validate, refit at the optimum, score.
MetricsRow evaluate_method(const SimInstance& inst, Method method, const BenchmarkOptions& options,
                           std::uint64_t cv_seed);

/// Replications run in parallel (options.jobs) with per-replication streams of
/// cfg.seed. `sink` receives rows strictly in (replication, method) order as
/// soon as each prefix is complete. A failed method is reported with NaN metrics.
std::vector<MetricsRow> run_benchmark(const SimConfig& cfg, const BenchmarkOptions& options,
                                      const std::function<void(const MetricsRow&)>& sink = {},
                                      const std::function<void(const std::string&)>& progress = {});

/// Long-format CSV header and row.
std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);

} // namespace larn
