#include "larn/scalar_rule.hpp"

#include "larn/errors.hpp"
#include "larn/random.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace larn {

ScalarPenalty ScalarPenalty::depth_based(const PenaltySpec& spec)
{
    ScalarPenalty pen;
    pen.kind = Kind::DepthBased;
    pen.depth = spec;
    return pen;
}

ScalarPenalty ScalarPenalty::scad(double a, double lambda)
{
    ScalarPenalty pen;
    pen.kind = Kind::Scad;
    pen.a = a;
    pen.shape_lambda = lambda;
    return pen;
}

ScalarPenalty ScalarPenalty::mcp(double lambda)
{
    ScalarPenalty pen;
    pen.kind = Kind::Mcp;
    pen.shape_lambda = lambda;
    return pen;
}

void ScalarPenalty::validate() const
{
    switch (kind) {
    case Kind::DepthBased:
        depth.validate();
        if (!(p0() > 0.0)) throw ConfigError("depth-based scalar penalty needs a positive derivative at 0");
        break;
    case Kind::Scad:
        if (!(a > 2.0)) throw ConfigError("SCAD requires a > 2");
        [[fallthrough]];
    case Kind::Mcp:
        if (!(shape_lambda > 0.0)) throw ConfigError("SCAD/MCP lambda must be positive");
        break;
    }
}

double ScalarPenalty::derivative(double theta) const
{
    const double t = std::fabs(theta);
    switch (kind) {
    case Kind::DepthBased:
        return penalty_weight(t, depth);
    case Kind::Scad: {
        const double lam = shape_lambda;
        const double c = 1.0 / (2.0 * lam * lam * (a + 2.0));
        if (t < 2.0 * lam) return c * lam;
        if (t < a * lam) return c / (a - 2.0) * (a * lam - t);
        return 0.0;
    }
    case Kind::Mcp:
        return t < shape_lambda ? t : 0.0;
    }
    return 0.0;
}

double ScalarPenalty::p0() const
{
    return derivative(0.0);
}

double ScalarPenalty::sup_derivative() const
{
    switch (kind) {
    case Kind::DepthBased:
        if (depth.transform == InverseTransform::MaxMinus) return derivative(0.0);
        break;
    case Kind::Scad:
        return 1.0 / (2.0 * shape_lambda * (a + 2.0));
    case Kind::Mcp:
        return shape_lambda;
    }
    double best = derivative(0.0);
    for (int i = 1; i <= 500000; ++i) best = std::max(best, derivative(50.0 * i / 500000.0));
    return best;
}

double ScalarPenalty::sup_second_derivative() const
{
    const double h = 1e-5;
    double best = 0.0;
    for (int i = 1; i <= 50000; ++i) {
        const double t = 50.0 * i / 50000.0;
        if (t <= h) continue;
        best = std::max(best, std::fabs(derivative(t + h) - derivative(t - h)) / (2.0 * h));
    }
    return best;
}

double soft_threshold_depth(double z, double lambda, const ScalarPenalty& pen, RuleVariant variant)
{
    if (!std::isfinite(z)) throw DomainError("soft_threshold_depth: non-finite z");
    if (!(lambda >= 0.0)) throw DomainError("soft_threshold_depth: lambda must be >= 0");
    const double az = std::fabs(z);
    double t;
    if (variant == RuleVariant::Approximate) {
        t = std::max(0.0, az - lambda * pen.derivative(az));
    } else {
        t = az;
        for (int it = 0; it < 10000; ++it) {
            const double next = std::max(0.0, az - lambda * pen.derivative(t));
            const bool done = std::fabs(next - t) <= 1e-15 * std::max(1.0, az);
            t = next;
            if (done || t == 0.0) break;
        }
    }
    return z < 0.0 ? -t : t;
}

Matrix equivalence_orthogonal(const Dataset& data, double lambda, const ScalarPenalty& pen)
{
    const Matrix gram = data.X.transpose() * data.X;
    if ((gram - Matrix::Identity(data.p(), data.p())).cwiseAbs().maxCoeff() > 1e-10) {
        throw ConfigError("equivalence_orthogonal: X'X differs from the identity");
    }
    const Matrix z = data.X.transpose() * data.Y;
    return z.unaryExpr([&](double v) { return soft_threshold_depth(v, 0.5 * lambda, pen); });
}

double ideal_risk(const std::vector<double>& theta)
{
    double s = 0.0;
    for (double t : theta) s += std::min(t * t, 1.0);
    return s;
}

double minimax_lambda(Index n, double c1)
{
    return (std::sqrt(0.5 * std::log(static_cast<double>(n))) - 1.0) / c1;
}

double minimax_bound(Index n, double ideal, double c1, double p0)
{
    const double ln = std::log(static_cast<double>(n));
    return (2.0 * ln - 3.0) * (ideal + c1 / (p0 * (std::sqrt(0.5 * ln) - 1.0)));
}

RiskReport minimax_check(const std::vector<double>& theta, const ScalarPenalty& pen, int replications,
                         std::uint64_t seed, int jobs)
{
    pen.validate();
    const Index n = static_cast<Index>(theta.size());
    if (n < 64) throw ConfigError("minimax_check: n must be at least 64");
    if (replications < 2) throw ConfigError("minimax_check: need at least 2 replications");

    RiskReport rep;
    rep.n = n;
    rep.theta = theta;
    rep.replications = replications;
    rep.c1 = pen.sup_derivative();
    rep.c2 = pen.sup_second_derivative();
    rep.p0 = pen.p0();
    if (!(rep.p0 > 0.0)) throw ConfigError("minimax_check: penalty has zero derivative at the origin");
    rep.lambda = minimax_lambda(n, rep.c1);
    rep.ideal_risk = ideal_risk(theta);
    rep.bound = minimax_bound(n, rep.ideal_risk, rep.c1, rep.p0);

    std::vector<double> losses(static_cast<std::size_t>(replications));
    const double lambda = rep.lambda;
#pragma omp parallel for schedule(static) num_threads(std::max(1, jobs))
    for (int r = 0; r < replications; ++r) {
        auto gen = make_stream(seed, static_cast<std::uint64_t>(r));
        std::normal_distribution<double> noise;
        double loss = 0.0;
        for (double th : theta) {
            const double est = soft_threshold_depth(th + noise(gen), lambda, pen);
            loss += (est - th) * (est - th);
        }
        losses[static_cast<std::size_t>(r)] = loss;
    }

    const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / replications;
    double ss = 0.0;
    for (double l : losses) ss += (l - mean) * (l - mean);
    rep.monte_carlo_risk = mean;
    rep.monte_carlo_se = std::sqrt(ss / (replications - 1) / replications);
    rep.within_bound = rep.monte_carlo_risk <= rep.bound;
    rep.within_bound_2se = rep.monte_carlo_risk <= rep.bound + 2.0 * rep.monte_carlo_se;
    return rep;
}

} // namespace larn
