#include "larn/model_selection.hpp"

#include "larn/errors.hpp"
#include "larn/random.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace larn {

LambdaScale parse_lambda_scale(std::string_view name)
{
    if (name == "log10") return LambdaScale::Log10;
    if (name == "log10-n") return LambdaScale::Log10PerSample;
    if (name == "linear-positive") return LambdaScale::LinearPositive;
    throw ConfigError("unknown lambda scale '" + std::string(name) + "' (expected log10, log10-n or linear-positive)");
}

std::vector<double> default_lambda_grid(LambdaScale scale, int count, Index n)
{
    if (count < 1) throw ConfigError("lambda grid needs at least one value");
    if (n < 1) throw ConfigError("lambda grid needs a positive sample size");
    const double unit = scale == LambdaScale::Log10PerSample ? 2.0 * static_cast<double>(n) : 1.0;
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (scale != LambdaScale::LinearPositive) {
            const double u = count == 1 ? 0.0 : -2.0 + 4.0 * i / (count - 1);
            grid[static_cast<std::size_t>(i)] = unit * std::pow(10.0, u);
        } else {
            grid[static_cast<std::size_t>(i)] = 2.0 * (i + 1) / count;
        }
    }
    return grid;
}

std::vector<double> default_threshold_grid(double max_abs, int count)
{
    if (count < 1) throw ConfigError("threshold grid needs at least one value");
    std::vector<double> grid(static_cast<std::size_t>(count), 0.0);
    const double top = 0.9 * max_abs;
    for (int i = 1; i < count; ++i) grid[static_cast<std::size_t>(i)] = top * i / (count - 1);
    return grid;
}

std::vector<double> CvGrid::resolved_lambdas(Index n) const
{
    return lambdas.empty() ? default_lambda_grid(lambda_scale, lambda_count, n) : lambdas;
}

void CvGrid::validate(Index n) const
{
    const std::vector<double> lambdas = resolved_lambdas(n);
    if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw ConfigError("cv grid: lambdas must be ascending");
    if (lambdas.front() < 0.0) throw ConfigError("cv grid: lambdas must be nonnegative");
    if (thresholds) {
        if (thresholds->empty()) throw ConfigError("cv grid: empty threshold grid");
        if (!std::is_sorted(thresholds->begin(), thresholds->end())) {
            throw ConfigError("cv grid: thresholds must be ascending");
        }
        if (thresholds->front() < 0.0) throw ConfigError("cv grid: thresholds must be nonnegative");
    } else if (threshold_count < 1) {
        throw ConfigError("cv grid: threshold_count must be positive");
    }
    if (k < 2 || k > n) {
        throw ConfigError("cv grid: fold count " + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
    }
}

std::vector<std::vector<Index>> kfold_split(Index n, int k, std::uint64_t seed)
{
    if (k < 2 || k > n) throw ConfigError("kfold_split: need 2 <= k <= n");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto gen = make_stream(seed);
    // Fisher-Yates with a fixed reduction, so the permutation does not depend on
    // the standard library's distribution implementation.
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(gen() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
    const Index base = n / k;
    const Index extra = n % k;
    std::size_t pos = 0;
    for (Index f = 0; f < k; ++f) {
        const Index size = base + (f < extra ? 1 : 0);
        auto& fold = folds[static_cast<std::size_t>(f)];
        fold.assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(size)));
        std::sort(fold.begin(), fold.end());
        pos += static_cast<std::size_t>(size);
    }
    return folds;
}

std::vector<Index> training_indices(Index n, const std::vector<Index>& fold)
{
    std::vector<bool> held(static_cast<std::size_t>(n), false);
    for (Index i : fold) held[static_cast<std::size_t>(i)] = true;
    std::vector<Index> train;
    train.reserve(static_cast<std::size_t>(n) - fold.size());
    for (Index i = 0; i < n; ++i) {
        if (!held[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    return train;
}

double cv_rmse(const Dataset& data, const std::vector<std::vector<Index>>& folds,
               const std::vector<Matrix>& B_per_fold)
{
    if (folds.size() != B_per_fold.size()) throw ConfigError("cv_rmse: one estimate per fold required");
    double sse = 0.0;
    Index total = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Dataset held = data.subset(folds[f]);
        if (B_per_fold[f].rows() != data.p() || B_per_fold[f].cols() != data.q()) {
            throw ConfigError("cv_rmse: estimate " + std::to_string(f) + " has the wrong shape");
        }
        sse += (held.Y - held.X * B_per_fold[f]).squaredNorm();
        total += static_cast<Index>(folds[f].size());
    }
    return std::sqrt(sse) / (static_cast<double>(total) * static_cast<double>(data.q()));
}

CvResult cross_validate_with(const Dataset& data, const Fitter& fitter, const CvGrid& grid,
                             const CvOptions& options)
{
    data.validate();
    grid.validate(data.n());
    const std::vector<double> lambdas = grid.resolved_lambdas(data.n());
    const int jobs = std::max(1, options.jobs);
    const auto n_lambda = static_cast<Index>(lambdas.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    CvResult out;
    out.lambdas = lambdas;
    out.folds = kfold_split(data.n(), grid.k, grid.seed);
    out.thresholds.resize(lambdas.size());
    std::vector<bool> lambda_failed(lambdas.size(), false);

    // Threshold grids per lambda.
    if (!options.thresholded) {
        for (auto& t : out.thresholds) t = {0.0};
    } else if (grid.thresholds) {
        for (auto& t : out.thresholds) t = *grid.thresholds;
    } else {
        auto reference = [&](Index i) {
            const auto ui = static_cast<std::size_t>(i);
            try {
                const Matrix B = fitter(data, lambdas[ui]);
                out.thresholds[ui] = default_threshold_grid(B.cwiseAbs().maxCoeff(), grid.threshold_count);
            } catch (const std::exception&) {
                out.thresholds[ui] = default_threshold_grid(0.0, grid.threshold_count);
                lambda_failed[ui] = true;
            }
        };
        if (jobs == 1) {
            for (Index i = 0; i < n_lambda; ++i) reference(i);
        } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
            for (Index i = 0; i < n_lambda; ++i) reference(i);
        }
        out.reference_fits = n_lambda;
    }

    const auto n_thresh = static_cast<Index>(out.thresholds.front().size());
    out.fold_sse.assign(static_cast<std::size_t>(grid.k), Matrix::Zero(n_lambda, n_thresh));
    std::vector<Dataset> train(static_cast<std::size_t>(grid.k));
    std::vector<Dataset> held(static_cast<std::size_t>(grid.k));
    for (int f = 0; f < grid.k; ++f) {
        const auto& fold = out.folds[static_cast<std::size_t>(f)];
        train[static_cast<std::size_t>(f)] = data.subset(training_indices(data.n(), fold));
        held[static_cast<std::size_t>(f)] = data.subset(fold);
    }

    std::atomic<long> fits{0};
    const Index cells = n_lambda * grid.k;
    auto run_cell = [&](Index cell) {
        const auto i = static_cast<std::size_t>(cell / grid.k);
        const auto f = static_cast<std::size_t>(cell % grid.k);
        auto sse_row = out.fold_sse[f].row(static_cast<Index>(i));
        fits.fetch_add(1, std::memory_order_relaxed);
        if (lambda_failed[i]) {
            sse_row.setConstant(inf);
            return;
        }
        try {
            const Matrix B = fitter(train[f], lambdas[i]);
            const Dataset& h = held[f];
            for (Index t = 0; t < n_thresh; ++t) {
                const double thr = out.thresholds[i][static_cast<std::size_t>(t)];
                const double sse = (h.Y - h.X * apply_threshold(B, thr)).squaredNorm();
                sse_row[t] = std::isfinite(sse) ? sse : inf;
            }
        } catch (const std::exception&) {
            sse_row.setConstant(inf);
        }
    };
    if (jobs == 1) {
        for (Index c = 0; c < cells; ++c) run_cell(c);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (Index c = 0; c < cells; ++c) run_cell(c);
    }
    out.fold_fits = fits.load();

    Matrix total = Matrix::Zero(n_lambda, n_thresh);
    for (const Matrix& m : out.fold_sse) total += m;
    const double scale = static_cast<double>(data.n()) * static_cast<double>(data.q());
    out.cv_rmse = total.unaryExpr([&](double s) { return std::isfinite(s) ? std::sqrt(s) / scale : inf; });

    out.best_error = inf;
    bool found = false;
    for (Index i = 0; i < n_lambda; ++i) {
        for (Index t = 0; t < n_thresh; ++t) {
            const double e = out.cv_rmse(i, t);
            if (std::isfinite(e) && (!found || e <= out.best_error)) {
                found = true;
                out.best_error = e;
                out.best_lambda_index = i;
                out.best_threshold_index = t;
            }
        }
    }
    if (!found) throw SolverError("cross-validation: every (lambda, fold) cell failed");
    out.best_lambda = out.lambdas[static_cast<std::size_t>(out.best_lambda_index)];
    out.best_threshold = out.thresholds[static_cast<std::size_t>(out.best_lambda_index)]
                                       [static_cast<std::size_t>(out.best_threshold_index)];
    return out;
}

CvResult cross_validate(const Dataset& data, const LarnConfig& config, const CvGrid& grid,
                        const CvOptions& options)
{
    config.validate();
    Fitter fitter = [&config](const Dataset& train, double lambda) {
        return larn_fit(train, config, lambda).B_one_step;
    };
    return cross_validate_with(data, fitter, grid, options);
}

FitResult refit_best(const Dataset& data, const LarnConfig& config, const CvResult& cv)
{
    FitResult fit = larn_fit(data, config, cv.best_lambda);
    fit.threshold = cv.best_threshold;
    fit.B_hat = apply_threshold(fit.B_one_step, cv.best_threshold);
    return fit;
}

} // namespace larn
