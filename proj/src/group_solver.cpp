#include "larn/group_solver.hpp"

#include "larn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace larn {

namespace {

void check_shapes(const Dataset& data, const Matrix& B, const GroupWeights& weights, double lambda)
{
    if (data.X.rows() != data.Y.rows()) throw ConfigError("X and Y row counts differ");
    if (B.rows() != data.p() || B.cols() != data.q()) {
        throw ConfigError("coefficient matrix is " + std::to_string(B.rows()) + "x"
                          + std::to_string(B.cols()) + ", expected " + std::to_string(data.p())
                          + "x" + std::to_string(data.q()));
    }
    if (weights.size() != data.p()) throw ConfigError("weight vector length differs from p");
    if (!weights.allFinite() || (weights.array() < 0.0).any()) {
        throw DomainError("group weights must be finite and nonnegative");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
}

double penalty_sum(const Matrix& B, const GroupWeights& weights)
{
    double s = 0.0;
    for (Index j = 0; j < B.rows(); ++j) {
        if (weights[j] != 0.0) s += weights[j] * B.row(j).norm();
    }
    return s;
}

Vector kkt_from_gradient(const Matrix& B, const Matrix& XtR, const GroupWeights& weights, double lambda)
{
    Vector res(B.rows());
    for (Index j = 0; j < B.rows(); ++j) {
        const double rj = B.row(j).norm();
        if (rj > 0.0) {
            res[j] = (2.0 * XtR.row(j) - (lambda * weights[j] / rj) * B.row(j)).norm();
        } else {
            res[j] = std::max(0.0, XtR.row(j).norm() - 0.5 * lambda * weights[j]);
        }
    }
    return res;
}

} // namespace

void SolverSettings::validate() const
{
    if (max_sweeps < 1) throw ConfigError("solver: max_sweeps must be positive");
    if (!(tol > 0.0) || !(kkt_tol > 0.0)) throw ConfigError("solver: tolerances must be positive");
}

double objective(const Dataset& data, const Matrix& B, const GroupWeights& weights, double lambda)
{
    check_shapes(data, B, weights, lambda);
    if (!B.allFinite()) throw DomainError("objective: non-finite coefficients");
    const double loss = (data.Y - data.X * B).squaredNorm();
    return lambda == 0.0 ? loss : loss + lambda * penalty_sum(B, weights);
}

Vector kkt_residual(const Dataset& data, const Matrix& B, const GroupWeights& weights, double lambda)
{
    check_shapes(data, B, weights, lambda);
    const Matrix XtR = data.X.transpose() * (data.Y - data.X * B);
    return kkt_from_gradient(B, XtR, weights, lambda);
}

SolveResult bcd_solve(const Dataset& data, const GroupWeights& weights, double lambda,
                      const Matrix& init, const SolverSettings& settings)
{
    settings.validate();
    check_shapes(data, init, weights, lambda);
    if (!init.allFinite()) throw DomainError("bcd_solve: non-finite initial coefficients");

    const Matrix& X = data.X;
    const Index p = data.p();
    const Vector col_sq = X.colwise().squaredNorm().transpose();
    for (Index j = 0; j < p; ++j) {
        if (col_sq[j] == 0.0) throw SolverError("design column is identically zero", static_cast<std::size_t>(j));
    }

    SolveResult out;
    out.B = init;
    Matrix& B = out.B;
    Matrix resid = data.Y - X * B;
    out.objective_trace.push_back(resid.squaredNorm() + lambda * penalty_sum(B, weights));

    Eigen::RowVectorXd g(data.q());
    Eigen::RowVectorXd delta(data.q());
    for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
        for (Index j = 0; j < p; ++j) {
            const double s = col_sq[j];
            g.noalias() = X.col(j).transpose() * resid;
            g += s * B.row(j);
            const double gnorm = g.norm();
            if (!std::isfinite(gnorm)) throw SolverError("non-finite block gradient", static_cast<std::size_t>(j));

            const double shrink = 0.5 * lambda * weights[j];
            delta = -B.row(j);
            if (gnorm > shrink) {
                B.row(j) = ((1.0 - shrink / gnorm) / s) * g;
            } else {
                B.row(j).setZero();
            }
            delta += B.row(j);
            if ((delta.array() != 0.0).any()) resid.noalias() -= X.col(j) * delta;
        }

        // Refresh the residual so rounding drift does not accumulate across sweeps.
        resid = data.Y - X * B;
        const double obj = resid.squaredNorm() + lambda * penalty_sum(B, weights);
        if (!std::isfinite(obj)) throw SolverError("objective became non-finite");
        const double prev = out.objective_trace.back();
        out.objective_trace.push_back(obj);
        out.sweeps = sweep;

        const double rel = std::fabs(prev - obj) / std::max(1.0, std::fabs(prev));
        if (rel < settings.tol) {
            const Matrix XtR = X.transpose() * resid;
            out.max_kkt = kkt_from_gradient(B, XtR, weights, lambda).maxCoeff();
            if (out.max_kkt < settings.kkt_tol) {
                out.converged = true;
                return out;
            }
        }
    }
    out.max_kkt = kkt_from_gradient(B, X.transpose() * resid, weights, lambda).maxCoeff();
    out.converged = out.max_kkt < settings.kkt_tol;
    return out;
}

} // namespace larn
