#include "larn/larn_estimator.hpp"

#include "larn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace larn {

void LarnConfig::validate() const
{
    penalty.validate();
    solver.validate();
    if (max_outer_iters < 1) throw ConfigError("larn: max_outer_iters must be positive");
    if (!(outer_tol > 0.0)) throw ConfigError("larn: outer_tol must be positive");
}

Matrix initial_estimate(const Dataset& data, const LarnConfig& config, std::vector<std::string>* warnings)
{
    const Matrix& X = data.X;
    switch (config.init.kind) {
    case InitKind::Provided:
        if (config.init.provided.rows() != data.p() || config.init.provided.cols() != data.q()) {
            throw ConfigError("provided initial estimate has the wrong shape");
        }
        return config.init.provided;
    case InitKind::Ridge: {
        const Matrix gram = X.transpose() * X;
        double eps = config.init.ridge_eps;
        if (eps < 0.0) eps = 1e-3 * gram.trace() / static_cast<double>(data.p());
        Matrix reg = gram;
        reg.diagonal().array() += eps;
        return reg.ldlt().solve(X.transpose() * data.Y);
    }
    case InitKind::LeastSquares:
        break;
    }

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(X);
    if (cod.rank() < data.p() && warnings) {
        warnings->push_back("X'X is rank deficient (rank " + std::to_string(cod.rank()) + " < p = "
                            + std::to_string(data.p()) + "); using the minimum-norm least-squares start");
    }
    return cod.solve(data.Y);
}

double true_objective(const Dataset& data, const Matrix& B, const PenaltySpec& penalty)
{
    if (B.rows() != data.p() || B.cols() != data.q()) throw ConfigError("true_objective: shape mismatch");
    if (!B.allFinite()) throw DomainError("true_objective: non-finite coefficients");
    return (data.Y - data.X * B).squaredNorm() + row_penalty(B, penalty);
}

double majorizer(const Dataset& data, const Matrix& B, const Matrix& anchor, const PenaltySpec& penalty)
{
    if (B.rows() != anchor.rows() || B.cols() != anchor.cols()) throw ConfigError("majorizer: shape mismatch");
    double pen = 0.0;
    for (Index j = 0; j < B.rows(); ++j) {
        const double r_star = anchor.row(j).norm();
        pen += inverse_depth(r_star, penalty) + penalty_weight(r_star, penalty) * (B.row(j).norm() - r_star);
    }
    return (data.Y - data.X * B).squaredNorm() + penalty.lambda * pen;
}

FitResult larn_fit(const Dataset& data, const LarnConfig& config, double lambda)
{
    config.validate();
    data.validate();
    std::vector<std::string> warnings;
    Matrix start = initial_estimate(data, config, &warnings);
    FitResult fit = larn_fit_from(data, config, lambda, start);
    fit.warnings.insert(fit.warnings.begin(), warnings.begin(), warnings.end());
    return fit;
}

FitResult larn_fit_from(const Dataset& data, const LarnConfig& config, double lambda, const Matrix& start)
{
    config.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("larn_fit: lambda must be finite and >= 0");

    PenaltySpec penalty = config.penalty;
    penalty.lambda = lambda;

    FitResult fit;
    fit.lambda = lambda;
    if (config.weights == WeightScheme::Depth && !penalty.concave()) {
        fit.warnings.push_back("exp inverse-depth transform may give a non-concave penalty; "
                               "the MM descent guarantee does not apply");
    }

    Matrix current = start;
    fit.q_trace.push_back(true_objective(data, current, penalty));

    const bool single_solve = config.one_step || config.weights == WeightScheme::Unit || lambda == 0.0;
    const int max_iters = single_solve ? 1 : config.max_outer_iters;
    GroupWeights weights;
    for (int k = 0; k < max_iters; ++k) {
        weights = config.weights == WeightScheme::Unit ? GroupWeights(GroupWeights::Ones(data.p()))
                                                       : penalty_weights(current, penalty);
        SolveResult solved = bcd_solve(data, weights, lambda, current, config.solver);
        ++fit.inner_solves;
        fit.outer_iters = k + 1;
        fit.converged = solved.converged;
        fit.objective_trace = std::move(solved.objective_trace);
        current = std::move(solved.B);

        const double q_prev = fit.q_trace.back();
        const double q_new = true_objective(data, current, penalty);
        fit.q_trace.push_back(q_new);
        if (std::fabs(q_prev - q_new) / std::max(1.0, std::fabs(q_prev)) < config.outer_tol) break;
    }
    if (!fit.converged) {
        fit.warnings.push_back("inner solver stopped at max_sweeps before meeting its tolerances");
    }

    fit.kkt_residuals = kkt_residual(data, current, weights, lambda);
    fit.B_one_step = current;
    fit.B_hat = std::move(current);
    return fit;
}

ThresholdRule ThresholdRule::theory_formula(double c_min, Index n, Index q, std::optional<Index> s_hat)
{
    ThresholdRule rule;
    rule.mode = Mode::TheoryFormula;
    rule.theory = {c_min, n, q, s_hat};
    return rule;
}

ThresholdRule ThresholdRule::fixed_value(double t)
{
    ThresholdRule rule;
    rule.mode = Mode::Fixed;
    rule.fixed.value = t;
    return rule;
}

double theory_threshold(double c_min, Index n, Index q, Index s_hat_size)
{
    if (!(c_min > 0.0)) throw ConfigError("threshold: C_min must be positive");
    if (n < 1) throw ConfigError("threshold: n must be positive");
    const double count = static_cast<double>(q) * static_cast<double>(s_hat_size);
    if (count <= 1.0) throw ConfigError("threshold: q * |S| must be at least 2");
    return std::sqrt(8.0 * std::log(count) / (c_min * static_cast<double>(n)));
}

double threshold_value(const Matrix& B, const ThresholdRule& rule)
{
    if (rule.mode == ThresholdRule::Mode::Fixed) {
        if (!(rule.fixed.value >= 0.0)) throw ConfigError("threshold must be nonnegative");
        return rule.fixed.value;
    }
    const TheoryThreshold& th = rule.theory;
    const Index s_hat = th.s_hat_size ? *th.s_hat_size : static_cast<Index>(row_support(B).size());
    return theory_threshold(th.c_min, th.n, th.q, s_hat);
}

Matrix apply_threshold(const Matrix& B, double t)
{
    if (!(t >= 0.0)) throw ConfigError("threshold must be nonnegative");
    Matrix out = B;
    for (Index j = 0; j < out.rows(); ++j) {
        for (Index k = 0; k < out.cols(); ++k) {
            if (std::fabs(out(j, k)) <= t) out(j, k) = 0.0;
        }
    }
    return out;
}

Matrix within_row_threshold(const Matrix& B_one_step, const ThresholdRule& rule)
{
    return apply_threshold(B_one_step, threshold_value(B_one_step, rule));
}

} // namespace larn
