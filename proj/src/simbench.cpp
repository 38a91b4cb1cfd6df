#include "larn/simbench.hpp"

#include "larn/csv.hpp"
#include "larn/errors.hpp"
#include "larn/random.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace larn {

void SimConfig::validate() const
{
    auto prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("sim config: ") + name + " must lie in [0, 1]");
    };
    auto ar = [](double v, const char* name) {
        if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string("sim config: ") + name + " must lie in [0, 1)");
    };
    if (n < 1 || p < 1 || q < 1) throw ConfigError("sim config: n, p, q must be positive");
    prob(within_row_prob, "within_row_prob");
    prob(row_prob, "row_prob");
    ar(rho, "rho");
    ar(design_ar, "design_ar");
    if (!(signal_sd >= 0.0) || !std::isfinite(signal_mean)) throw ConfigError("sim config: bad signal parameters");
    if (replications < 1) throw ConfigError("sim config: replications must be positive");
}

Matrix ar1_covariance(Index dim, double rho)
{
    if (dim < 1) throw ConfigError("ar1_covariance: dim must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("ar1_covariance: rho must lie in [0, 1)");
    Matrix cov(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) cov(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
    return cov;
}

Matrix sample_gaussian_rows(Index n, const Matrix& cov, std::mt19937_64& gen)
{
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw SolverError("sample_gaussian_rows: covariance is not positive definite");
    std::normal_distribution<double> normal;
    Matrix Z(n, cov.rows());
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < Z.cols(); ++j) Z(i, j) = normal(gen);
    }
    return Z * llt.matrixL().transpose();
}

Matrix sample_gaussian_rows(Index n, const Matrix& cov, std::uint64_t seed)
{
    auto gen = make_stream(seed);
    return sample_gaussian_rows(n, cov, gen);
}

SimInstance generate_instance(const SimConfig& cfg, std::uint64_t stream)
{
    cfg.validate();
    auto gen = make_stream(cfg.seed, stream);
    SimInstance inst;
    inst.data.X = sample_gaussian_rows(cfg.n, ar1_covariance(cfg.p, cfg.design_ar), gen);
    const Matrix E = sample_gaussian_rows(cfg.n, ar1_covariance(cfg.q, cfg.rho), gen);

    std::normal_distribution<double> signal(cfg.signal_mean, cfg.signal_sd);
    std::bernoulli_distribution within(cfg.within_row_prob);
    std::bernoulli_distribution row_on(cfg.row_prob);
    inst.B0 = Matrix::Zero(cfg.p, cfg.q);
    for (Index j = 0; j < cfg.p; ++j) {
        for (Index k = 0; k < cfg.q; ++k) {
            const double w = signal(gen);
            inst.B0(j, k) = within(gen) ? w : 0.0;
        }
    }
    for (Index j = 0; j < cfg.p; ++j) {
        if (!row_on(gen)) inst.B0.row(j).setZero();
    }
    inst.data.Y = inst.data.X * inst.B0 + E;
    return inst;
}

MetricsRow metrics(const Matrix& B_hat, const Matrix& B0, double cv_rmse)
{
    if (B_hat.rows() != B0.rows() || B_hat.cols() != B0.cols()) throw ConfigError("metrics: shape mismatch");
    MetricsRow row;
    row.cv_rmse = cv_rmse;
    row.mae = (B_hat - B0).cwiseAbs().mean();
    long pos = 0, tp = 0, neg = 0, tn = 0;
    for (Index j = 0; j < B0.rows(); ++j) {
        for (Index k = 0; k < B0.cols(); ++k) {
            if (B0(j, k) != 0.0) {
                ++pos;
                if (B_hat(j, k) != 0.0) ++tp;
            } else {
                ++neg;
                if (B_hat(j, k) == 0.0) ++tn;
            }
        }
    }
    row.tp = pos == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pos);
    row.tn = neg == 0 ? 1.0 : static_cast<double>(tn) / static_cast<double>(neg);
    return row;
}

Matrix separate_lasso(const Dataset& data, double lambda, double tol, int max_sweeps)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("separate_lasso: lambda must be finite and >= 0");
    const Matrix& X = data.X;
    const Vector col_sq = X.colwise().squaredNorm().transpose();
    for (Index j = 0; j < data.p(); ++j) {
        if (col_sq[j] == 0.0) throw SolverError("design column is identically zero", static_cast<std::size_t>(j));
    }
    const double half = 0.5 * lambda;
    Matrix B = Matrix::Zero(data.p(), data.q());
    for (Index k = 0; k < data.q(); ++k) {
        Vector resid = data.Y.col(k);
        const double scale = std::max(1.0, resid.norm());
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double max_step = 0.0;
            for (Index j = 0; j < data.p(); ++j) {
                const double old = B(j, k);
                const double g = X.col(j).dot(resid) + col_sq[j] * old;
                const double mag = std::fabs(g) - half;
                const double next = mag > 0.0 ? std::copysign(mag, g) / col_sq[j] : 0.0;
                if (next != old) {
                    resid.noalias() -= (next - old) * X.col(j);
                    B(j, k) = next;
                    max_step = std::max(max_step, std::fabs(next - old) * std::sqrt(col_sq[j]));
                }
            }
            if (!std::isfinite(max_step)) throw SolverError("separate_lasso: non-finite update");
            if (max_step <= tol * scale) break;
        }
    }
    return B;
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::Larn: return "LARN";
    case Method::Tgl: return "TGL";
    case Method::SepLasso: return "SepLasso";
    }
    return "?";
}

Method parse_method(const std::string& name)
{
    if (name == "LARN" || name == "larn") return Method::Larn;
    if (name == "TGL" || name == "tgl") return Method::Tgl;
    if (name == "SepLasso" || name == "seplasso") return Method::SepLasso;
    throw ConfigError("unknown method '" + name + "' (expected LARN, TGL or SepLasso)");
}

MetricsRow evaluate_method(const SimInstance& inst, Method method, const BenchmarkOptions& options,
                           std::uint64_t cv_seed)
{
    CvGrid grid = options.grid;
    grid.seed = cv_seed;
    CvOptions cv_opts;
    cv_opts.jobs = 1;

    Matrix B_hat;
    double err = 0.0;
    if (method == Method::SepLasso) {
        cv_opts.thresholded = false;
        grid.thresholds.reset();
        Fitter fitter = [](const Dataset& train, double lambda) { return separate_lasso(train, lambda); };
        const CvResult cv = cross_validate_with(inst.data, fitter, grid, cv_opts);
        B_hat = separate_lasso(inst.data, cv.best_lambda);
        err = cv.best_error;
    } else {
        LarnConfig config = options.larn;
        config.weights = method == Method::Tgl ? WeightScheme::Unit : WeightScheme::Depth;
        const CvResult cv = cross_validate(inst.data, config, grid, cv_opts);
        B_hat = refit_best(inst.data, config, cv).B_hat;
        err = cv.best_error;
    }
    MetricsRow row = metrics(B_hat, inst.B0, err);
    row.method = to_string(method);
    return row;
}

std::vector<MetricsRow> run_benchmark(const SimConfig& cfg, const BenchmarkOptions& options,
                                      const std::function<void(const MetricsRow&)>& sink,
                                      const std::function<void(const std::string&)>& progress)
{
    cfg.validate();
    if (options.methods.empty()) throw ConfigError("benchmark: no methods selected");
    const std::string setting =
        options.setting.empty() ? "p" + std::to_string(cfg.p) + "q" + std::to_string(cfg.q) : options.setting;
    const int reps = cfg.replications;
    const auto n_methods = options.methods.size();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::vector<MetricsRow>> per_rep(static_cast<std::size_t>(reps));
    std::vector<bool> done(static_cast<std::size_t>(reps), false);
    int next_emit = 0;

    auto run_rep = [&](int r) {
        auto& rows = per_rep[static_cast<std::size_t>(r)];
        rows.reserve(n_methods);
        const auto stream = static_cast<std::uint64_t>(r);
        SimInstance inst;
        std::string failure;
        try {
            inst = generate_instance(cfg, stream);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        // Fold assignment comes from a separate stream so it is independent of the data.
        const std::uint64_t cv_seed = make_stream(cfg.seed, stream | (std::uint64_t{1} << 63))();
        for (Method m : options.methods) {
            MetricsRow row;
            if (failure.empty()) {
                try {
                    row = evaluate_method(inst, m, options, cv_seed);
                } catch (const std::exception& e) {
                    row.cv_rmse = row.mae = row.tp = row.tn = nan;
                    if (progress) progress("replication " + std::to_string(r) + " " + to_string(m) + " failed: " + e.what());
                }
            } else {
                row.cv_rmse = row.mae = row.tp = row.tn = nan;
            }
            row.setting = setting;
            row.rho = cfg.rho;
            row.replication = r;
            row.method = to_string(m);
            rows.push_back(std::move(row));
        }
#pragma omp critical(larn_benchmark_emit)
        {
            done[static_cast<std::size_t>(r)] = true;
            if (!failure.empty() && progress) progress("replication " + std::to_string(r) + " failed: " + failure);
            while (next_emit < reps && done[static_cast<std::size_t>(next_emit)]) {
                if (sink) {
                    for (const MetricsRow& row : per_rep[static_cast<std::size_t>(next_emit)]) sink(row);
                }
                if (progress) progress(setting + " replication " + std::to_string(next_emit + 1) + "/" + std::to_string(reps) + " done");
                ++next_emit;
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (int r = 0; r < reps; ++r) run_rep(r);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (int r = 0; r < reps; ++r) run_rep(r);
    }

    std::vector<MetricsRow> all;
    all.reserve(static_cast<std::size_t>(reps) * n_methods);
    for (auto& rows : per_rep) all.insert(all.end(), rows.begin(), rows.end());
    return all;
}

std::string metrics_csv_header()
{
    return "setting,rho,replication,method,cv_rmse,mae,tp,tn";
}

std::string metrics_csv_line(const MetricsRow& row)
{
    return row.setting + "," + format_double(row.rho) + "," + std::to_string(row.replication) + "," + row.method + ","
         + format_double(row.cv_rmse) + "," + format_double(row.mae) + "," + format_double(row.tp) + ","
         + format_double(row.tn);
}

} // namespace larn
