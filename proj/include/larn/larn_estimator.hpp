#pragma once

#include "larn/depth_penalty.hpp"
#include "larn/group_solver.hpp"
#include "larn/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace larn {

enum class InitKind { LeastSquares, Ridge, Provided };

struct InitSpec {
    InitKind kind = InitKind::LeastSquares;
    /// Ridge strength; a negative value selects 1e-3 * trace(X'X) / p.
    double ridge_eps = -1.0;
    Matrix provided;
};

/// Depth: w_j = p'_F(||b_j^(k)||). Unit: w_j = 1 (thresholded group lasso).
enum class WeightScheme { Depth, Unit };

struct LarnConfig {
    PenaltySpec penalty;
    bool one_step = true;
    int max_outer_iters = 100;
    double outer_tol = 1e-10;
    InitSpec init;
    WeightScheme weights = WeightScheme::Depth;
    SolverSettings solver;

    void validate() const;
};

struct FitResult {
    Matrix B_hat;      // after within-row thresholding
    Matrix B_one_step; // before thresholding
    double lambda = 0.0;
    double threshold = 0.0;
    std::vector<double> objective_trace; // inner solver trace of the last solve
    std::vector<double> q_trace;         // true objective Q at B^(0), B^(1), ...
    Vector kkt_residuals;
    int outer_iters = 0;
    int inner_solves = 0;
    bool converged = true;
    std::vector<std::string> warnings;
};

/// Starting point B^(0). LeastSquares is the minimum-norm solution of
/// min ||Y - XB||, defined for any rank; rank deficiency adds a warning.
Matrix initial_estimate(const Dataset& data, const LarnConfig& config,
                        std::vector<std::string>* warnings = nullptr);

/// Q(B) = ||Y - XB||_F^2 + lambda * sum_j p_F(||b_j||).
double true_objective(const Dataset& data, const Matrix& B, const PenaltySpec& penalty);

/// R(B | B*) = ||Y - XB||_F^2 + lambda * sum_j [p_F(r*_j) + p'_F(r*_j)(r_j - r*_j)],
/// the local linear majorizer of Q at B*.
double majorizer(const Dataset& data, const Matrix& B, const Matrix& anchor, const PenaltySpec& penalty);

/// LARN fit at `lambda` (overrides config.penalty.lambda). One weighted
/// group-lasso solve in one-step mode; otherwise reweight-and-solve until the
/// relative change in Q falls below outer_tol. No thresholding is applied:
/// B_hat == B_one_step and threshold == 0.
FitResult larn_fit(const Dataset& data, const LarnConfig& config, double lambda);

/// Same, from a precomputed starting point.
FitResult larn_fit_from(const Dataset& data, const LarnConfig& config, double lambda, const Matrix& start);

/// Within-row threshold value sqrt(8 log(q |S|) / (C_min n)).
struct TheoryThreshold {
    double c_min = 1.0;
    Index n = 0;
    Index q = 0;
    /// Estimated nonzero-row count |S|; unset means "count the nonzero rows of B".
    std::optional<Index> s_hat_size;
};

struct FixedThreshold {
    double value = 0.0;
};

struct ThresholdRule {
    enum class Mode { TheoryFormula, Fixed } mode = Mode::Fixed;
    TheoryThreshold theory;
    FixedThreshold fixed;

    static ThresholdRule theory_formula(double c_min, Index n, Index q, std::optional<Index> s_hat = {});
    static ThresholdRule fixed_value(double t);
};

double theory_threshold(double c_min, Index n, Index q, Index s_hat_size);

/// Threshold value implied by `rule` for the one-step estimate B.
double threshold_value(const Matrix& B, const ThresholdRule& rule);

/// Zero every entry of a nonzero row with |b_jk| <= t; keep the rest unchanged.
Matrix apply_threshold(const Matrix& B, double t);

Matrix within_row_threshold(const Matrix& B_one_step, const ThresholdRule& rule);

} // namespace larn
