#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"

namespace zerocast {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + exp(z)) without overflow or catastrophic rounding anywhere on the
// real line.
inline double log1pexp(double z) {
    if (z <= -37.0) return std::exp(z);
    if (z <= 18.0) return std::log1p(std::exp(z));
    if (z <= 33.3) return z + std::exp(-z);
    return z;
}

inline double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(sigmoid(z)), exact for large |z| where sigmoid itself rounds to 0 or 1.
inline double log_sigmoid(double z) { return -log1pexp(-z); }

inline double softplus(double z) { return log1pexp(z); }

// Inverse of softplus on (0, inf).
inline double softplus_inv(double y) {
    if (!(y > 0.0)) throw NumericsError("softplus_inv: argument must be positive");
    if (y > 33.3) return y;
    return std::log(std::expm1(y));
}

inline double logsumexp(const std::vector<double>& v) {
    if (v.empty()) throw NumericsError("logsumexp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/**
 * @brief Digamma function for positive arguments.
 *
 * Small arguments are shifted up by the recurrence psi(x) = psi(x+1) - 1/x,
 * then the asymptotic expansion is applied. Absolute error is below 1e-12
 * over the range used here.
 */
inline double digamma(double x) {
    if (!(x > 0.0)) throw NumericsError("digamma: argument must be positive");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv;
    // Bernoulli-number tail of the asymptotic expansion.
    series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result + series;
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const int max_iter = 500 + 8 * static_cast<int>(a);
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < max_iter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericsError("gamma_p: series did not converge for a=" + std::to_string(a));
}

inline double gamma_q_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const int max_iter = 500 + 8 * static_cast<int>(a);
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
        }
    }
    throw NumericsError("gamma_q: continued fraction did not converge for a=" + std::to_string(a));
}

} // namespace detail

/**
 * @brief Regularized lower incomplete gamma P(a, x).
 */
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw NumericsError("gamma_p: requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw NumericsError("gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

namespace detail {

inline double betacf(double a, double b, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const int max_iter = 500;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) return h;
    }
    throw NumericsError("beta_inc: continued fraction did not converge");
}

} // namespace detail

/**
 * @brief Regularized incomplete beta function I_x(a, b).
 */
inline double beta_inc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw NumericsError("beta_inc: requires a > 0 and b > 0");
    if (x < 0.0 || x > 1.0) throw NumericsError("beta_inc: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a t statistic with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw NumericsError("student_t_two_sided_p: df must be positive");
    if (std::isinf(t)) return 0.0;
    return beta_inc(0.5 * df, 0.5, df / (df + t * t));
}

} // namespace zerocast
