#pragma once

// Log-space combinatorics shared by the tilt engine and the sweeps.
// Binomial coefficients come from log-gamma and Gamma-weighted sums are
// accumulated with log-sum-exp, so stratum sizes in the millions and
// Gamma^n_1 magnitudes never materialize as finite-width overflow.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace sensweep {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log C(n, k); -inf outside the support.
inline double lchoose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return neg_inf;
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log(exp(a) + exp(b))
inline double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// log sum exp of a sequence
inline double log_sum_exp(std::span<const double> logs) {
    double m = neg_inf;
    for (double v : logs) m = std::max(m, v);
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

// Standard normal CDF via erfc; accurate to well below 1e-12 over the range
// used by the tests.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace sensweep
