#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's numerical paths.

#include "larn/types.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

/// Phi(x) = 1/2 + integral_0^x phi(t) dt by composite Simpson in long double.
inline long double normal_cdf(long double x)
{
    const int intervals = 20000;
    const long double a = 0.0L, b = x;
    const long double h = (b - a) / intervals;
    const long double c = 1.0L / std::sqrt(2.0L * 3.141592653589793238462643383279502884L);
    auto f = [&](long double t) { return c * std::exp(-0.5L * t * t); };
    long double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0L : 2.0L);
    return 0.5L + s * h / 3.0L;
}

inline long double normal_pdf(long double x)
{
    return std::exp(-0.5L * x * x) / std::sqrt(2.0L * 3.141592653589793238462643383279502884L);
}

/// Quantile by bisection on the quadrature CDF.
inline long double normal_quantile(long double p)
{
    long double lo = -40.0L, hi = 40.0L;
    for (int i = 0; i < 90; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

inline larn::Matrix random_matrix(larn::Index rows, larn::Index cols, std::mt19937_64& gen, double sd = 1.0)
{
    std::normal_distribution<double> d(0.0, sd);
    larn::Matrix m(rows, cols);
    for (larn::Index i = 0; i < rows; ++i)
        for (larn::Index j = 0; j < cols; ++j) m(i, j) = d(gen);
    return m;
}

/// ||Y - XB||_F^2 by explicit loops.
inline double naive_loss(const larn::Matrix& X, const larn::Matrix& Y, const larn::Matrix& B)
{
    double s = 0.0;
    for (larn::Index i = 0; i < Y.rows(); ++i) {
        for (larn::Index k = 0; k < Y.cols(); ++k) {
            double fit = 0.0;
            for (larn::Index j = 0; j < X.cols(); ++j) fit += X(i, j) * B(j, k);
            s += (Y(i, k) - fit) * (Y(i, k) - fit);
        }
    }
    return s;
}

inline double naive_row_norm(const larn::Matrix& B, larn::Index j)
{
    double s = 0.0;
    for (larn::Index k = 0; k < B.cols(); ++k) s += B(j, k) * B(j, k);
    return std::sqrt(s);
}

/// Q-matrix with orthonormal columns from a QR of a Gaussian matrix.
inline larn::Matrix random_orthonormal(larn::Index n, std::mt19937_64& gen)
{
    const larn::Matrix a = random_matrix(n, n, gen);
    Eigen::HouseholderQR<larn::Matrix> qr(a);
    return qr.householderQ() * larn::Matrix::Identity(n, n);
}

} // namespace oracle

namespace oracle {

struct GridMin {
    double value = 0.0;
    larn::Matrix argmin;
};

/// Minimum of ||Y - XB||^2 + lambda sum_j w_j ||b_j|| over 2x2 matrices B whose
/// entries lie on the grid {i * step} within [lo, hi]^4 around `center`
/// (entrywise box [center - radius, center + radius] clipped to [-3, 3]).
/// Enumerates every grid point in the box.
inline GridMin grid_search_2x2(const larn::Matrix& X, const larn::Matrix& Y, const larn::Vector& w,
                               double lambda, double step, const larn::Matrix& center, double radius)
{
    const larn::Matrix G = X.transpose() * X;
    const larn::Matrix C = X.transpose() * Y;
    const double T = Y.squaredNorm();

    auto axis = [&](double c) {
        std::vector<double> pts;
        const long lo = std::lround(std::ceil(std::max(-3.0, c - radius) / step - 1e-9));
        const long hi = std::lround(std::floor(std::min(3.0, c + radius) / step + 1e-9));
        for (long i = lo; i <= hi; ++i) pts.push_back(static_cast<double>(i) * step);
        return pts;
    };
    const auto a00 = axis(center(0, 0)), a01 = axis(center(0, 1));
    const auto a10 = axis(center(1, 0)), a11 = axis(center(1, 1));

    // Inner row (b_1) terms that do not depend on b_0.
    struct Row1 { double u, v, own; };
    std::vector<Row1> row1;
    for (double u : a10)
        for (double v : a11)
            row1.push_back({u, v, G(1, 1) * (u * u + v * v) - 2.0 * (C(1, 0) * u + C(1, 1) * v)
                                      + lambda * w[1] * std::sqrt(u * u + v * v)});

    GridMin best;
    best.value = std::numeric_limits<double>::infinity();
    best.argmin = larn::Matrix::Zero(2, 2);
    for (double s : a00) {
        for (double t : a01) {
            const double own = T + G(0, 0) * (s * s + t * t) - 2.0 * (C(0, 0) * s + C(0, 1) * t)
                             + lambda * w[0] * std::sqrt(s * s + t * t);
            const double cs = 2.0 * G(0, 1) * s, ct = 2.0 * G(0, 1) * t;
            for (const Row1& r : row1) {
                const double val = own + r.own + cs * r.u + ct * r.v;
                if (val < best.value) {
                    best.value = val;
                    best.argmin << s, t, r.u, r.v;
                }
            }
        }
    }
    return best;
}

/// Coarse pass at step 0.1 over [-3, 3]^4, then every 0.01 grid point within
/// 0.2 of the coarse minimizer. Valid for convex objectives.
inline GridMin dense_grid_min_2x2(const larn::Matrix& X, const larn::Matrix& Y, const larn::Vector& w, double lambda)
{
    const GridMin coarse = grid_search_2x2(X, Y, w, lambda, 0.1, larn::Matrix::Zero(2, 2), 3.0);
    return grid_search_2x2(X, Y, w, lambda, 0.01, coarse.argmin, 0.2);
}

} // namespace oracle
