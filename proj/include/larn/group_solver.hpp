#pragma once

#include "larn/types.hpp"

#include <vector>

namespace larn {

/// Per-row weights w_j of the penalty lambda * sum_j w_j ||b_j||.
using GroupWeights = Vector;

struct SolverSettings {
    int max_sweeps = 20000;
    double tol = 1e-8;     // relative objective change between sweeps
    double kkt_tol = 1e-6; // max row KKT residual

    void validate() const;
};

struct SolveResult {
    Matrix B;
    std::vector<double> objective_trace; // entry 0 is the objective at the initial point
    int sweeps = 0;
    bool converged = false;
    double max_kkt = 0.0;
};

/// Weighted group-lasso objective ||Y - XB||_F^2 + lambda * sum_j w_j ||b_j||.
double objective(const Dataset& data, const Matrix& B, const GroupWeights& weights, double lambda);

/// Row-wise optimality residuals. For b_j != 0 the stationarity residual
/// || 2 x_j'(Y - XB) - lambda w_j b_j / ||b_j|| ||; for b_j = 0 the excess
/// max(0, ||x_j'(Y - XB)|| - lambda w_j / 2). All zero iff B is a minimizer.
Vector kkt_residual(const Dataset& data, const Matrix& B, const GroupWeights& weights, double lambda);

/// Cyclic block coordinate descent over the rows of B, starting from `init`.
///
/// Row update with g_j = x_j'(Y - X B_{-j}) and s_j = ||x_j||^2:
///   b_j <- (1 - lambda w_j / (2 ||g_j||))_+ g_j / s_j
///
/// Stops once the relative objective change drops below settings.tol and the
/// largest KKT residual is below settings.kkt_tol, or after max_sweeps.
/// Throws SolverError (carrying the row index) on a zero design column or a
/// non-finite update.
SolveResult bcd_solve(const Dataset& data, const GroupWeights& weights, double lambda,
                      const Matrix& init, const SolverSettings& settings = {});

} // namespace larn
