#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "zerocast/errors.hpp"
#include "zerocast/math.hpp"
#include "zerocast/rng.hpp"

namespace zerocast {

/**
 * @brief Negative binomial with pmf Gamma(y+r)/(Gamma(r) y!) p^r (1-p)^y.
 *
 * Mean is r(1-p)/p and variance mean/p, so the distribution is always
 * overdispersed. The unconstrained-scale parameter logit = log((1-p)/p)
 * makes the mean r*exp(logit), which is what the per-series scaling shifts.
 */
struct NegBinParams {
    double r;
    double p;

    double logit() const { return std::log1p(-p) - std::log(p); }
};

namespace detail {

inline void check_count_support(double y, const char* who) {
    if (!(y >= 0.0) || y != std::floor(y) || !std::isfinite(y)) {
        throw DomainError(std::string(who) + ": observation must be a non-negative integer, got " + std::to_string(y));
    }
}

} // namespace detail

inline double nb_logpmf(const NegBinParams& params, double y) {
    detail::check_count_support(y, "nb_logpmf");
    return std::lgamma(y + params.r) - std::lgamma(params.r) - std::lgamma(y + 1.0) +
           params.r * std::log(params.p) + y * std::log1p(-params.p);
}

inline double nb_mean(const NegBinParams& params) {
    return params.r * (1.0 - params.p) / params.p;
}

inline double nb_var(const NegBinParams& params) { return nb_mean(params) / params.p; }

// Shifts logit by log(s), i.e. p -> p / (p + s(1-p)); r is untouched.
inline NegBinParams nb_scale(const NegBinParams& params, double s) {
    if (!(s > 0.0)) throw DomainError("nb_scale: scale must be positive");
    return NegBinParams{params.r, params.p / (params.p + s * (1.0 - params.p))};
}

// Gamma-Poisson mixture draw.
inline double nb_sample(const NegBinParams& params, Rng& rng) {
    const double lambda = rng.gamma(params.r, (1.0 - params.p) / params.p);
    if (!(lambda > 0.0)) return 0.0;
    return static_cast<double>(rng.poisson(lambda));
}

/**
 * @brief Smallest y with CDF(y) >= q, by pmf accumulation.
 *
 * The pmf walks up through the ratio recurrence; it is re-anchored on the
 * exact log pmf periodically so rounding cannot drift over long supports.
 */
inline double nb_quantile(const NegBinParams& params, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainError("nb_quantile: level must lie in (0,1)");
    double pmf = std::exp(params.r * std::log(params.p));
    double cum = pmf;
    double y = 0.0;
    const double one_minus_p = 1.0 - params.p;
    while (cum < q) {
        pmf *= (y + params.r) / (y + 1.0) * one_minus_p;
        y += 1.0;
        if (std::fmod(y, 4096.0) == 0.0) pmf = std::exp(nb_logpmf(params, y));
        cum += pmf;
        if (y > 1e8) throw NumericsError("nb_quantile: accumulation exceeded 1e8 terms");
    }
    return y;
}

/**
 * @brief Negative log-likelihood and gradient in unconstrained space.
 *
 * r = softplus(z_r), p = sigmoid(z_p - log_s); the shift by log_s realises
 * the per-series scaling on the unconstrained scale.
 */
inline double nb_nll_grad(double z_r, double z_p, double y, double log_s, double* dz) {
    detail::check_count_support(y, "nb_nll_grad");
    const double zeta = z_p - log_s;
    const double r = softplus(z_r);
    const double log_p = log_sigmoid(zeta);
    const double log_1mp = log_sigmoid(-zeta);
    const double p = sigmoid(zeta);

    const double nll = -(std::lgamma(y + r) - std::lgamma(r) - std::lgamma(y + 1.0) + r * log_p + y * log_1mp);
    const double dnll_dr = -(digamma(y + r) - digamma(r) + log_p);
    dz[0] = dnll_dr * sigmoid(z_r);
    dz[1] = -(r * (1.0 - p) - y * p);
    return nll;
}

} // namespace zerocast
