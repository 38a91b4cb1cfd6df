#pragma once

namespace larn::normal {

inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;

/// Standard normal density.
double pdf(double x);

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt 2) / 2. Accurate in both tails.
double cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double ccdf(double x);

/// Inverse CDF by Wichura's AS 241 (PPND16), relative accuracy about 1e-16.
/// Throws DomainError unless 0 < prob < 1.
double quantile(double prob);

} // namespace larn::normal
