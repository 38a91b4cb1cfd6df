#pragma once

#include "larn/larn_estimator.hpp"
#include "larn/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace larn {

/// Log10: 10^u. Log10PerSample: 2 n 10^u, the same four decades on the scale
/// of a (1/2n)-normalized loss. LinearPositive: evenly spaced on (0, 2].
enum class LambdaScale { Log10, Log10PerSample, LinearPositive };

LambdaScale parse_lambda_scale(std::string_view name);

/// `count` ascending lambdas, u evenly spaced on [-2, 2]. `n` is the sample
/// size and only matters for Log10PerSample.
std::vector<double> default_lambda_grid(LambdaScale scale = LambdaScale::Log10, int count = 100, Index n = 1);

/// `count` thresholds evenly spaced on [0, 0.9 * max_abs], starting at 0.
std::vector<double> default_threshold_grid(double max_abs, int count = 100);

struct CvGrid {
    /// Explicit grid. Empty means default_lambda_grid(lambda_scale, lambda_count, n).
    std::vector<double> lambdas;
    LambdaScale lambda_scale = LambdaScale::Log10PerSample;
    int lambda_count = 100;
    /// Shared threshold grid. When unset, each lambda gets
    /// default_threshold_grid(max |B^(1)|, threshold_count) from a full-data fit.
    std::optional<std::vector<double>> thresholds;
    int threshold_count = 100;
    int k = 5;
    std::uint64_t seed = 1;

    std::vector<double> resolved_lambdas(Index n) const;
    void validate(Index n) const;
};

/// k disjoint folds covering 0..n-1 after a seeded shuffle. The first n % k
/// folds hold one extra index. Indices inside a fold are sorted.
std::vector<std::vector<Index>> kfold_split(Index n, int k, std::uint64_t seed);

/// Complement of `fold` in 0..n-1.
std::vector<Index> training_indices(Index n, const std::vector<Index>& fold);

/// sqrt(sum_k ||Y_k - X_k B_{-k}||_F^2) / (n q), with n the total held-out count.
double cv_rmse(const Dataset& data, const std::vector<std::vector<Index>>& folds,
               const std::vector<Matrix>& B_per_fold);

/// Pre-threshold estimator used inside cross-validation.
using Fitter = std::function<Matrix(const Dataset& train, double lambda)>;

struct CvResult {
    std::vector<double> lambdas;
    /// thresholds[i] is the threshold grid used at lambdas[i].
    std::vector<std::vector<double>> thresholds;
    /// cv_rmse(i, t): error at lambdas[i], thresholds[i][t]. +inf marks failed cells.
    Matrix cv_rmse;
    /// fold_sse[f](i, t): held-out sum of squares of fold f.
    std::vector<Matrix> fold_sse;
    double best_lambda = 0.0;
    double best_threshold = 0.0;
    Index best_lambda_index = 0;
    Index best_threshold_index = 0;
    double best_error = 0.0;
    /// Pre-threshold fits on training folds; always k * |lambdas|.
    long fold_fits = 0;
    /// Full-data fits that fix per-lambda threshold grids (|lambdas| or 0).
    long reference_fits = 0;
    std::vector<std::vector<Index>> folds;
};

struct CvOptions {
    /// 1 runs the serial reference loop; more runs (lambda, fold) cells through OpenMP.
    int jobs = 1;
    /// When false the threshold axis collapses to {0} (estimators without a thresholding stage).
    bool thresholded = true;
};

/// Two-dimensional (lambda, threshold) cross-validation. One fit per
/// (lambda, fold) cell; every threshold is then scored against that cached
/// fit. Ties prefer the larger lambda, then the larger threshold.
CvResult cross_validate_with(const Dataset& data, const Fitter& fitter, const CvGrid& grid,
                             const CvOptions& options = {});

/// cross_validate_with using larn_fit under `config`.
CvResult cross_validate(const Dataset& data, const LarnConfig& config, const CvGrid& grid,
                        const CvOptions& options = {});

/// Refit at (best_lambda, best_threshold) on the full data.
FitResult refit_best(const Dataset& data, const LarnConfig& config, const CvResult& cv);

} // namespace larn
