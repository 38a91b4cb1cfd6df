#pragma once

#include "larn/depth_penalty.hpp"
#include "larn/types.hpp"

#include <cstdint>
#include <vector>

namespace larn {

/// Derivative D^-_1(theta, F) of a univariate penalty, for the orthogonal-design
/// thresholding rule. SCAD and MCP carry their own lambda (shape parameter);
/// the rule's lambda multiplies the derivative.
struct ScalarPenalty {
    enum class Kind { DepthBased, Scad, Mcp } kind = Kind::DepthBased;
    PenaltySpec depth;     // DepthBased
    double a = 3.7;        // Scad
    double shape_lambda = 1.0; // Scad, Mcp

    static ScalarPenalty depth_based(const PenaltySpec& spec);
    static ScalarPenalty scad(double a, double lambda);
    static ScalarPenalty mcp(double lambda);

    /// D^-_1(|theta|); nonnegative.
    double derivative(double theta) const;

    /// Right-limit of the derivative at 0.
    double p0() const;

    /// sup over theta > 0 of the derivative (analytic where known, else a grid
    /// maximum over (0, 50]).
    double sup_derivative() const;

    /// sup over theta > 0 of |d/dtheta D^-_1| by central differences on (0, 50].
    double sup_second_derivative() const;

    void validate() const;
};

enum class RuleVariant {
    /// sign(z) (|z| - lambda D^-_1(z))_+ : derivative evaluated at z.
    Approximate,
    /// Largest t in [0, |z|] with t = (|z| - lambda D^-_1(t))_+, by monotone
    /// fixed-point iteration from t = |z|.
    FixedPoint,
};

double soft_threshold_depth(double z, double lambda, const ScalarPenalty& pen,
                            RuleVariant variant = RuleVariant::Approximate);

/// Coordinate-wise rule applied to X'Y for orthonormal X. `lambda` is on the
/// scale of the multitask objective ||Y - XB||^2 + lambda * penalty, which is
/// twice the scalar loss (z - theta)^2 / 2, so the rule runs at lambda / 2.
/// Throws ConfigError unless X'X = I to 1e-10.
Matrix equivalence_orthogonal(const Dataset& data, double lambda, const ScalarPenalty& pen);

struct RiskReport {
    Index n = 0;
    std::vector<double> theta;
    double lambda = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double p0 = 0.0;
    double monte_carlo_risk = 0.0;
    double monte_carlo_se = 0.0;
    double ideal_risk = 0.0;
    double bound = 0.0;
    int replications = 0;
    bool within_bound = false;        // monte_carlo_risk <= bound
    bool within_bound_2se = false;    // monte_carlo_risk <= bound + 2 se
};

/// sum_i min(theta_i^2, 1).
double ideal_risk(const std::vector<double>& theta);

/// (2 log n - 3) [ideal + c1 / (p0 (sqrt(log(n) / 2) - 1))].
double minimax_bound(Index n, double ideal, double c1, double p0);

/// lambda = (sqrt(log(n) / 2) - 1) / c1.
double minimax_lambda(Index n, double c1);

/// Monte Carlo risk of the approximate rule on z_i = theta_i + N(0, 1) at the
/// minimax lambda. Replication r draws from its own stream seeded by (seed, r),
/// so the result is independent of `jobs`. Requires n >= 64.
RiskReport minimax_check(const std::vector<double>& theta, const ScalarPenalty& pen, int replications,
                         std::uint64_t seed, int jobs = 1);

} // namespace larn
