#include "larn/errors.hpp"
#include "larn/larn_estimator.hpp"
#include "larn/scalar_rule.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace larn;

namespace {

const ScalarPenalty halfspace = ScalarPenalty::depth_based(PenaltySpec{});

} // namespace

TEST_CASE("scalar rule values")
{
    CHECK(soft_threshold_depth(0.0, 1.0, halfspace) == 0.0);

    const double expected = 10.0 - static_cast<double>(oracle::normal_pdf(10.0L));
    CHECK(soft_threshold_depth(10.0, 1.0, halfspace) == expected);
    CHECK(std::fabs(soft_threshold_depth(10.0, 1.0, halfspace) - 10.0) < 1e-20);

    const ScalarPenalty mcp = ScalarPenalty::mcp(0.5);
    CHECK(soft_threshold_depth(0.4, 0.5, mcp) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(soft_threshold_depth(-0.4, 0.5, mcp) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(soft_threshold_depth(2.0, 0.5, mcp) == 2.0);

    CHECK_THROWS_AS(soft_threshold_depth(std::nan(""), 1.0, halfspace), DomainError);
}

TEST_CASE("rule shape: odd, shrinking, continuous, asymptotically unbiased")
{
    for (const ScalarPenalty& pen : {halfspace, ScalarPenalty::depth_based([] {
                                         PenaltySpec s;
                                         s.family.kind = DepthKind::Projection;
                                         return s;
                                     }())}) {
        const double lambda = 1.5;
        const double step = 1e-3;
        // D^-_1 is at most p0, so the rule is (1 + lambda * c2)-Lipschitz.
        const double lipschitz = 1.0 + lambda * pen.sup_second_derivative();
        double prev = soft_threshold_depth(-8.0, lambda, pen);
        for (int i = -8000; i <= 8000; ++i) {
            const double z = i * step;
            const double t = soft_threshold_depth(z, lambda, pen);
            CHECK(soft_threshold_depth(-z, lambda, pen) == -t);
            CHECK(std::fabs(t) <= std::fabs(z));
            CHECK((t == 0.0 || std::signbit(t) == std::signbit(z)));
            CHECK(std::fabs(z - t) <= lambda * pen.derivative(z) + 1e-15);
            if (i > -8000) CHECK(std::fabs(t - prev) <= step * lipschitz * 1.001);
            prev = t;
        }
        CHECK(std::fabs(soft_threshold_depth(40.0, lambda, pen) - 40.0) < std::fabs(soft_threshold_depth(4.0, lambda, pen) - 4.0));
    }
}

TEST_CASE("SCAD and MCP geometry")
{
    const double a = 3.7, lam = 0.8, rule_lambda = 2.0;
    const ScalarPenalty scad = ScalarPenalty::scad(a, lam);
    const double c = 1.0 / (2.0 * lam * lam * (a + 2.0));
    CHECK(scad.p0() == doctest::Approx(c * lam));
    CHECK(scad.sup_derivative() == doctest::Approx(c * lam));

    auto second_diff = [&](double z, double h) {
        return soft_threshold_depth(z + h, rule_lambda, scad) - 2.0 * soft_threshold_depth(z, rule_lambda, scad)
             + soft_threshold_depth(z - h, rule_lambda, scad);
    };
    const double h = 1e-3;
    for (double z = 0.5; z < 2.0 * lam - h; z += 0.01) CHECK(std::fabs(second_diff(z, h)) < 1e-12); // soft region
    for (double z = 2.0 * lam + h; z < a * lam - h; z += 0.01) CHECK(std::fabs(second_diff(z, h)) < 1e-12); // linear
    for (double z = a * lam + 1e-9; z < 10.0; z += 0.01) CHECK(soft_threshold_depth(z, rule_lambda, scad) == z);

    const ScalarPenalty mcp = ScalarPenalty::mcp(lam);
    for (double z = lam; z < 10.0; z += 0.01) CHECK(soft_threshold_depth(-z, rule_lambda, mcp) == -z);
    CHECK_THROWS_AS(ScalarPenalty::scad(1.5, 1.0).validate(), ConfigError);
}

TEST_CASE("fixed-point variant solves its own equation")
{
    for (double z = -6.0; z <= 6.0; z += 0.37) {
        const double t = soft_threshold_depth(z, 1.2, halfspace, RuleVariant::FixedPoint);
        CHECK(std::fabs(t) <= std::fabs(z));
        if (t != 0.0) {
            CHECK(std::fabs(std::fabs(t) - (std::fabs(z) - 1.2 * halfspace.derivative(t))) < 1e-12);
        }
    }
}

TEST_CASE("orthogonal design: coordinate-wise rule")
{
    std::mt19937_64 gen(4);
    Dataset d;
    d.X = oracle::random_orthonormal(8, gen);
    d.Y = oracle::random_matrix(8, 3, gen, 2.0);
    CHECK((equivalence_orthogonal(d, 0.0, halfspace) - d.X.transpose() * d.Y).cwiseAbs().maxCoeff() < 1e-14);

    Dataset small = d;
    small.Y = d.X * Matrix::Constant(8, 3, 0.1); // every |z| below the zero region
    CHECK(equivalence_orthogonal(small, 2.0, halfspace).isZero(0.0));

    // One-step LARN fit per response column is the oracle.
    const double lambda = 0.5;
    const Matrix rule = equivalence_orthogonal(d, lambda, halfspace);
    for (Index k = 0; k < 3; ++k) {
        Dataset col{d.X, d.Y.col(k)};
        const FitResult fit = larn_fit(col, LarnConfig{}, lambda);
        CHECK((fit.B_one_step - rule.col(k)).cwiseAbs().maxCoeff() < 1e-4);
    }

    Dataset skew = d;
    skew.X *= 1.01;
    CHECK_THROWS_AS(equivalence_orthogonal(skew, 1.0, halfspace), ConfigError);
}

TEST_CASE("minimax bound formula and ideal risk")
{
    const double c1 = static_cast<double>(oracle::normal_pdf(0.0L));
    CHECK(halfspace.sup_derivative() == c1);
    CHECK(halfspace.p0() == c1);

    const std::vector<double> zeros(1024, 0.0);
    const RiskReport zero = minimax_check(zeros, halfspace, 50, 1);
    CHECK(zero.ideal_risk == 0.0);
    const double ln = std::log(1024.0);
    CHECK(zero.bound == doctest::Approx((2.0 * ln - 3.0) * c1 / (c1 * (std::sqrt(0.5 * ln) - 1.0))).epsilon(1e-14));
    CHECK(zero.lambda == doctest::Approx((std::sqrt(0.5 * ln) - 1.0) / c1).epsilon(1e-15));
    // The finite-n bound does not cover the all-null configuration: the rule
    // shrinks by at most lambda * c1 = sqrt(log(n)/2) - 1, far short of the
    // universal threshold.
    CHECK_FALSE(zero.within_bound_2se);

    CHECK(ideal_risk(std::vector<double>(256, 1.0)) == 256.0);
    CHECK_THROWS_AS(minimax_check(std::vector<double>(32, 0.0), halfspace, 10, 1), ConfigError);
}

TEST_CASE("minimax check on a half-sparse configuration")
{
    std::vector<double> theta(1024, 0.0);
    for (std::size_t i = 512; i < 1024; ++i) theta[i] = 3.0;
    const RiskReport r = minimax_check(theta, halfspace, 2000, 7, 1);
    CHECK(r.ideal_risk == 512.0);
    CHECK(r.within_bound);
    CHECK(r.monte_carlo_risk > 0.0);

    const RiskReport parallel = minimax_check(theta, halfspace, 2000, 7, 4);
    CHECK(parallel.monte_carlo_risk == r.monte_carlo_risk);
    CHECK(parallel.monte_carlo_se == r.monte_carlo_se);
}
