#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/math.hpp"
#include "zerocast/rng.hpp"

namespace zerocast {

/**
 * @brief Tweedie compound Poisson-gamma distribution with 1 < rho < 2.
 *
 * Mean mu, variance phi * mu^rho; a point mass exp(-lambda) sits at zero and
 * a continuous density covers y > 0. The density series is evaluated in log
 * space around its dominating index.
 */
struct TweedieParams {
    double mu;
    double phi;
    double rho;
};

namespace detail {

struct TweedieSeriesSums {
    double log_sum;      // log sum of series terms
    double mean_j;       // series-weighted mean of the index j
    double mean_dw_rho;  // series-weighted mean of dW_j/drho
};

// Terms W_j = j log z - lgamma(1+j) - lgamma(j alpha), summed outward from
// the dominating index until they fall below 1e-10 of the peak.
inline TweedieSeriesSums tweedie_series(double y, const TweedieParams& params) {
    const double L = params.rho - 1.0;
    const double R = 2.0 - params.rho;
    const double alpha = R / L;
    const double d_alpha = -1.0 / (L * L);
    const double log_z = alpha * (std::log(y) - std::log(L)) - (1.0 + alpha) * std::log(params.phi) - std::log(R);
    const double dlogz_rho = d_alpha * (std::log(y) - std::log(L)) - alpha / L - d_alpha * std::log(params.phi) + 1.0 / R;

    const double j_center = std::pow(y, R) / (params.phi * R);
    const long long j0 = std::max<long long>(1, std::llround(j_center));
    constexpr double kLogTol = -23.025850929940457; // log(1e-10)
    constexpr std::size_t kMaxTerms = 100000;

    std::vector<std::pair<double, double>> terms; // (j, W_j)
    double w_max = -kInf;
    auto eval = [&](long long j) {
        const double jd = static_cast<double>(j);
        const double w = jd * log_z - std::lgamma(1.0 + jd) - std::lgamma(jd * alpha);
        terms.emplace_back(jd, w);
        if (w > w_max) w_max = w;
        return w;
    };

    eval(j0);
    for (long long j = j0 - 1; j >= 1; --j) {
        if (eval(j) < w_max + kLogTol) break;
    }
    for (long long j = j0 + 1;; ++j) {
        if (terms.size() >= kMaxTerms) {
            throw NumericsError("tweedie_logpdf: series needed more than 1e5 terms at y=" + std::to_string(y));
        }
        if (eval(j) < w_max + kLogTol) break;
    }

    double s0 = 0.0;
    double sj = 0.0;
    double sd = 0.0;
    for (const auto& [jd, w] : terms) {
        const double weight = std::exp(w - w_max);
        const double dw_rho = jd * dlogz_rho - jd * d_alpha * digamma(jd * alpha);
        s0 += weight;
        sj += jd * weight;
        sd += dw_rho * weight;
    }
    return TweedieSeriesSums{w_max + std::log(s0), sj / s0, sd / s0};
}

} // namespace detail

inline double tweedie_lambda(const TweedieParams& params) {
    const double R = 2.0 - params.rho;
    return std::pow(params.mu, R) / (params.phi * R);
}

inline double tweedie_logpdf(const TweedieParams& params, double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("tweedie_logpdf: observation must be a non-negative real");
    const double lambda = tweedie_lambda(params);
    if (y == 0.0) return -lambda;
    const double L = params.rho - 1.0;
    const auto sums = detail::tweedie_series(y, params);
    return sums.log_sum - y / (params.phi * L * std::pow(params.mu, L)) - lambda - std::log(y);
}

inline double tweedie_mean(const TweedieParams& params) { return params.mu; }

inline double tweedie_var(const TweedieParams& params) {
    return params.phi * std::pow(params.mu, params.rho);
}

// Scale of the gamma component; each of the N Poisson events has shape
// alpha = (2-rho)/(rho-1) and this scale.
inline double tweedie_gamma_scale(const TweedieParams& params) {
    return params.phi * (params.rho - 1.0) * std::pow(params.mu, params.rho - 1.0);
}

inline double tweedie_sample(const TweedieParams& params, Rng& rng) {
    const double lambda = tweedie_lambda(params);
    const long long events = rng.poisson(lambda);
    if (events == 0) return 0.0;
    const double alpha = (2.0 - params.rho) / (params.rho - 1.0);
    return rng.gamma(static_cast<double>(events) * alpha, tweedie_gamma_scale(params));
}

/**
 * @brief Exact mixture CDF: Poisson weights times regularized gamma CDFs.
 */
inline double tweedie_cdf(const TweedieParams& params, double y) {
    if (y < 0.0) return 0.0;
    const double lambda = tweedie_lambda(params);
    const double alpha = (2.0 - params.rho) / (params.rho - 1.0);
    const double gscale = tweedie_gamma_scale(params);
    double pois = std::exp(-lambda);
    double total = pois;
    double covered = pois;
    const long long n_cap = static_cast<long long>(lambda + 40.0 * std::sqrt(lambda) + 200.0);
    for (long long n = 1; n <= n_cap; ++n) {
        pois *= lambda / static_cast<double>(n);
        covered += pois;
        if (pois > 0.0 && y > 0.0) total += pois * gamma_p(static_cast<double>(n) * alpha, y / gscale);
        if (1.0 - covered < 1e-13 && static_cast<double>(n) > lambda) break;
    }
    return total;
}

inline double tweedie_quantile(const TweedieParams& params, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw DomainError("tweedie_quantile: level must lie in (0,1)");
    const double p0 = std::exp(-tweedie_lambda(params));
    if (q <= p0) return 0.0;
    double lo = 0.0;
    double hi = std::max(1.0, params.mu);
    int expand = 0;
    while (tweedie_cdf(params, hi) < q) {
        hi *= 2.0;
        if (++expand > 200) throw NumericsError("tweedie_quantile: failed to bracket the level");
    }
    const double tol = 1e-6 * params.mu;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (tweedie_cdf(params, mid) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/**
 * @brief Negative log-likelihood and gradient in unconstrained space.
 *
 * mu = softplus(z_mu), phi = softplus(z_phi), rho = 1 + sigmoid(z_rho).
 * The observation is divided by exp(log_s); the constant Jacobian of that
 * change of variables is dropped, matching training on the scaled series.
 */
inline double tweedie_nll_grad(double z_mu, double z_phi, double z_rho, double y, double log_s, double* dz) {
    const double y_s = y * std::exp(-log_s);
    const TweedieParams params{softplus(z_mu), softplus(z_phi), 1.0 + sigmoid(z_rho)};
    const double mu = params.mu;
    const double phi = params.phi;
    const double rho = params.rho;
    const double L = rho - 1.0;
    const double R = 2.0 - rho;
    const double lambda = tweedie_lambda(params);
    const double dlambda_rho = lambda * (1.0 / R - std::log(mu));

    double logf;
    double d_mu;
    double d_phi;
    double d_rho;
    if (y_s == 0.0) {
        logf = -lambda;
        d_mu = -std::pow(mu, 1.0 - rho) / phi;
        d_phi = lambda / phi;
        d_rho = -dlambda_rho;
    } else {
        const auto sums = detail::tweedie_series(y_s, params);
        const double mu_L = std::pow(mu, L);
        logf = sums.log_sum - y_s / (phi * L * mu_L) - lambda - std::log(y_s);
        d_mu = (y_s - mu) * std::pow(mu, -rho) / phi;
        const double alpha = R / L;
        d_phi = y_s / (phi * phi * L * mu_L) + lambda / phi - (1.0 + alpha) / phi * sums.mean_j;
        const double d_exponent_rho = (y_s / phi) * (L * std::log(mu) + 1.0) / (L * L * mu_L);
        d_rho = sums.mean_dw_rho + d_exponent_rho - dlambda_rho;
    }

    const double sig_rho = sigmoid(z_rho);
    dz[0] = -d_mu * sigmoid(z_mu);
    dz[1] = -d_phi * sigmoid(z_phi);
    dz[2] = -d_rho * sig_rho * (1.0 - sig_rho);
    return -logf;
}

} // namespace zerocast
