#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "heraldlab/errors.hpp"

namespace heraldlab {

using cplx = std::complex<double>;

// Hard ceiling on polynomial orders / photon numbers accepted anywhere.
inline constexpr int kMaxOrder = 200;

namespace detail {

inline void require_order(int n, const char* who) {
    if (n < 0)
        throw ValidationError(std::string(who) + ": order must be nonnegative");
    if (n > kMaxOrder)
        throw SizeError(std::string(who) + ": order " + std::to_string(n) +
                        " exceeds the supported maximum " + std::to_string(kMaxOrder));
}

inline bool nonpositive_integer(double v) {
    return v <= 0.0 && v == std::floor(v);
}

}  // namespace detail

// Dense polynomial, real coefficients in ascending power order.
// Invariant: coefficients.size() == degree + 1, leading coefficient nonzero
// unless the polynomial is identically the constant 0-degree one.
struct PolySeries {
    int degree = 0;
    std::vector<double> coefficients{1.0};

    double eval(double u) const {
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
            acc = acc * u + *it;
        return acc;
    }
};

// Physicists' Hermite polynomial H_n at a complex point, by the three-term
// recurrence H_{k+1} = 2 u H_k - 2 k H_{k-1}. Coefficient expansion is not
// used here: it loses precision to cancellation long before n = 200.
inline cplx hermite_eval(int n, cplx u) {
    detail::require_order(n, "hermite_eval");
    if (n == 0) return {1.0, 0.0};
    cplx hm1 = {1.0, 0.0};
    cplx h = 2.0 * u;
    for (int k = 1; k < n; ++k) {
        const cplx hp1 = 2.0 * u * h - 2.0 * static_cast<double>(k) * hm1;
        hm1 = h;
        h = hp1;
    }
    return h;
}

// Associated Laguerre L_n^{(alpha)} for integer alpha >= 0 (the Wigner
// cross-kernel needs the off-diagonal orders).
inline double assoc_laguerre_eval(int n, int alpha, double x) {
    detail::require_order(n, "assoc_laguerre_eval");
    if (alpha < 0)
        throw ValidationError("assoc_laguerre_eval: alpha must be nonnegative");
    double lm1 = 1.0;
    if (n == 0) return lm1;
    double l = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

inline double laguerre_eval(int n, double x) { return assoc_laguerre_eval(n, 0, x); }

// ln(n!). lgamma is correctly rounded to a few ulp over this range, far
// inside the 1e-13 relative contract.
inline double log_factorial(int n) {
    if (n < 0) throw ValidationError("log_factorial: n must be nonnegative");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// Gauss hypergeometric 2F1(alpha, beta; gamma; t) restricted to terminating
// series: alpha or beta must be a nonpositive integer so the sum is finite.
// Every use in this library has all-positive terms, so no cancellation.
inline double terminating_2f1(double alpha, double beta, double gamma, double t) {
    const bool a_term = detail::nonpositive_integer(alpha);
    const bool b_term = detail::nonpositive_integer(beta);
    if (!a_term && !b_term)
        throw InfeasibleError(
            "terminating_2f1: series does not terminate "
            "(neither upper parameter is a nonpositive integer)");
    if (detail::nonpositive_integer(gamma))
        throw InfeasibleError("terminating_2f1: gamma must not be a nonpositive integer");
    long kmax = -1;
    if (a_term) kmax = static_cast<long>(-alpha);
    if (b_term) {
        const long kb = static_cast<long>(-beta);
        kmax = (kmax < 0) ? kb : std::min(kmax, kb);
    }
    if (kmax > 4L * kMaxOrder)
        throw SizeError("terminating_2f1: series length exceeds the supported maximum");
    double term = 1.0;
    double sum = 1.0;
    for (long k = 0; k < kmax; ++k) {
        const double kk = static_cast<double>(k);
        term *= (alpha + kk) * (beta + kk) / ((gamma + kk) * (kk + 1.0)) * t;
        sum += term;
    }
    return sum;
}

// Coefficient forms, for callers that need the polynomial itself. Exact in
// integer arithmetic until the coefficients exceed 2^53; fine for the n <= 30
// uses and representable (with rounding) up to the order guard.

inline PolySeries hermite_series(int n) {
    detail::require_order(n, "hermite_series");
    std::vector<double> prev{1.0};
    if (n == 0) return {0, std::move(prev)};
    std::vector<double> cur{0.0, 2.0};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(static_cast<size_t>(k) + 2, 0.0);
        for (size_t j = 0; j < cur.size(); ++j) next[j + 1] += 2.0 * cur[j];
        for (size_t j = 0; j < prev.size(); ++j) next[j] -= 2.0 * k * prev[j];
        prev.swap(cur);
        cur.swap(next);
    }
    return {n, std::move(cur)};
}

inline PolySeries laguerre_series(int n) {
    detail::require_order(n, "laguerre_series");
    // L_n(x) = sum_j (-1)^j C(n,j) x^j / j!
    std::vector<double> c(static_cast<size_t>(n) + 1);
    c[0] = 1.0;
    double binom = 1.0;
    double invfact = 1.0;
    for (int j = 1; j <= n; ++j) {
        binom *= static_cast<double>(n - j + 1) / j;
        invfact /= j;
        c[static_cast<size_t>(j)] = ((j % 2) ? -1.0 : 1.0) * binom * invfact;
    }
    return {n, std::move(c)};
}

}  // namespace heraldlab
