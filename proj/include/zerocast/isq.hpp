#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/forecast.hpp"
#include "zerocast/series.hpp"

namespace zerocast {

namespace detail {

// Right-continuous empirical quantile of a sorted sample: the smallest
// element whose cumulative fraction reaches q. The tiny slack keeps exact
// multiples of 1/n from rounding up to the next order statistic.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    const double n = static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    if (k < 1) k = 1;
    if (k > sorted.size()) k = sorted.size();
    return sorted[k - 1];
}

} // namespace detail

/**
 * @brief In-sample quantile forecast: every horizon step repeats the
 * empirical quantiles and mean of the observed training values.
 */
inline QuantileForecast isq_forecast(const TimeSeries& ts, const SplitView& split) {
    const int offset = split.test_last() - static_cast<int>(ts.values.size());
    std::vector<double> train;
    for (int t = std::max(1, offset + 1); t <= split.train_last(); ++t) {
        train.push_back(ts.values[static_cast<std::size_t>(t - offset - 1)]);
    }
    if (train.empty()) {
        throw ConfigError("isq_forecast: series '" + ts.id + "' has no observed training values");
    }

    std::vector<double> sorted(train);
    std::sort(sorted.begin(), sorted.end());
    StepForecast step;
    for (double y : train) step.mean += y;
    step.mean /= static_cast<double>(train.size());
    for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
        step.q[j] = detail::sorted_quantile(sorted, kQuantileLevels[j]);
    }

    QuantileForecast fc;
    fc.id = ts.id;
    fc.steps.assign(static_cast<std::size_t>(split.horizon), step);
    return fc;
}

} // namespace zerocast
