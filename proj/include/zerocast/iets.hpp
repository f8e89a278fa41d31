#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/forecast.hpp"
#include "zerocast/isq.hpp"
#include "zerocast/math.hpp"
#include "zerocast/rng.hpp"
#include "zerocast/series.hpp"

namespace zerocast {

/// Candidate smoothing coefficients for the occurrence and demand levels.
inline constexpr std::array<double, 6> kSmoothingGrid{0.01, 0.05, 0.1, 0.2, 0.3, 0.5};

/**
 * @brief Croston-style state: smoothed occurrence probability and positive
 * demand level, plus the gamma shape of the size distribution.
 *
 * point_mass marks fits whose positive sizes showed no variance, so demand
 * draws collapse onto the level; degenerate marks series with no positive
 * training value at all.
 */
struct CrostonState {
    std::string id;
    double l_o = 0.0;
    double l_d = 0.0;
    double alpha_o = 0.0;
    double alpha_d = 0.0;
    double kappa = 0.0;
    bool point_mass = false;
    bool degenerate = false;
};

namespace detail {

inline double gamma_nll(double y, double shape, double scale) {
    return shape * std::log(scale) + std::lgamma(shape) - (shape - 1.0) * std::log(y) + y / scale;
}

struct SesReplay {
    double nll;
    double l_o;
    double l_d;
};

// One pass of simple exponential smoothing over the training values,
// scoring each step with the pre-update levels: Bernoulli for occurrence
// and, on positive steps, gamma for the size.
inline SesReplay ses_replay(const std::vector<double>& train, double l_o0, double l_d0, double a_o,
                            double a_d, double kappa, bool point_mass) {
    SesReplay out{0.0, l_o0, l_d0};
    for (double y : train) {
        const bool occ = y > 0.0;
        out.nll -= std::log(occ ? out.l_o : 1.0 - out.l_o);
        if (occ && !point_mass) out.nll += gamma_nll(y, kappa, out.l_d / kappa);
        out.l_o = a_o * (occ ? 1.0 : 0.0) + (1.0 - a_o) * out.l_o;
        if (occ) out.l_d = a_d * y + (1.0 - a_d) * out.l_d;
    }
    return out;
}

} // namespace detail

/**
 * @brief Fits occurrence and demand levels by SES, choosing the smoothing
 * pair from the grid that minimizes the one-step Bernoulli-gamma NLL.
 *
 * Levels start at the continuity-corrected occurrence rate and the mean
 * positive size; the gamma shape comes from the moments of the positive
 * sizes (population variance), degenerating to a point mass when they show
 * no spread.
 */
inline CrostonState iets_lite_fit(const TimeSeries& ts, const SplitView& split) {
    const int offset = split.test_last() - static_cast<int>(ts.values.size());
    std::vector<double> train;
    for (int t = std::max(1, offset + 1); t <= split.train_last(); ++t) {
        train.push_back(ts.values[static_cast<std::size_t>(t - offset - 1)]);
    }
    if (train.empty()) {
        throw ConfigError("iets_lite_fit: series '" + ts.id + "' has no observed training values");
    }

    CrostonState st;
    st.id = ts.id;
    double pos_sum = 0.0;
    double pos_sumsq = 0.0;
    double npos = 0.0;
    for (double y : train) {
        if (y > 0.0) {
            pos_sum += y;
            pos_sumsq += y * y;
            npos += 1.0;
        }
    }
    if (npos == 0.0) {
        st.degenerate = true;
        return st;
    }

    const double mean = pos_sum / npos;
    const double var = pos_sumsq / npos - mean * mean;
    st.point_mass = npos < 2.0 || var <= 1e-12 * mean * mean;
    st.kappa = st.point_mass ? kInf : mean * mean / var;

    const double l_o0 = (npos + 0.5) / (static_cast<double>(train.size()) + 1.0);
    const double l_d0 = mean;
    double best = kInf;
    for (double a_o : kSmoothingGrid) {
        for (double a_d : kSmoothingGrid) {
            const detail::SesReplay run =
                detail::ses_replay(train, l_o0, l_d0, a_o, a_d, st.kappa, st.point_mass);
            if (run.nll < best) {
                best = run.nll;
                st.alpha_o = a_o;
                st.alpha_d = a_d;
                st.l_o = run.l_o;
                st.l_d = run.l_d;
            }
        }
    }
    return st;
}

/**
 * @brief Simulation forecast: paths of Bernoulli occurrences and gamma
 * sizes, levels updated along each path, quantiles read off the per-step
 * samples with the right-continuous convention.
 */
inline QuantileForecast iets_lite_forecast(const CrostonState& st, int h,
                                           std::size_t n_samples = 10000,
                                           std::uint64_t seed = 1) {
    if (h < 1) throw ConfigError("iets_lite_forecast: horizon must be at least 1");
    QuantileForecast fc;
    fc.id = st.id;
    fc.degenerate = st.degenerate;
    if (st.degenerate) {
        fc.steps.assign(static_cast<std::size_t>(h), StepForecast{});
        return fc;
    }
    if (n_samples < 1) {
        throw ConfigError("iets_lite_forecast: need at least one sample path");
    }

    Rng rng(seed);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(h),
                                             std::vector<double>(n_samples, 0.0));
    for (std::size_t p = 0; p < n_samples; ++p) {
        double l_o = st.l_o;
        double l_d = st.l_d;
        for (int t = 0; t < h; ++t) {
            const bool occ = rng.bernoulli(l_o);
            double y = 0.0;
            if (occ) y = st.point_mass ? l_d : rng.gamma(st.kappa, l_d / st.kappa);
            samples[static_cast<std::size_t>(t)][p] = y;
            l_o = st.alpha_o * (occ ? 1.0 : 0.0) + (1.0 - st.alpha_o) * l_o;
            if (occ) l_d = st.alpha_d * y + (1.0 - st.alpha_d) * l_d;
        }
    }

    for (int t = 0; t < h; ++t) {
        auto& draws = samples[static_cast<std::size_t>(t)];
        StepForecast step;
        for (double v : draws) step.mean += v;
        step.mean /= static_cast<double>(draws.size());
        std::sort(draws.begin(), draws.end());
        for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
            step.q[j] = detail::sorted_quantile(draws, kQuantileLevels[j]);
        }
        fc.steps.push_back(step);
    }
    return fc;
}

} // namespace zerocast
