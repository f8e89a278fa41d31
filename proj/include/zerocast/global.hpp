#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/forecast.hpp"
#include "zerocast/heads.hpp"
#include "zerocast/nets.hpp"
#include "zerocast/series.hpp"
#include "zerocast/tape.hpp"

namespace zerocast {

/**
 * @brief One-pass forecast for a single series: scaled context in, h
 * distribution heads out, quantiles and mean computed analytically.
 *
 * Integer heads absorb the scale through their parameters; the continuous
 * head keeps unit-scale parameters and its quantiles and mean are
 * multiplied by the scale instead.
 */
inline QuantileForecast global_forecast_one(const Network& net, const Dataset& ds, std::size_t i) {
    const int c = net.spec.context;
    const int h = net.spec.horizon;
    const int P = head_param_count(net.spec.head);
    const double s = ds.stats(i).scale;

    std::vector<double> x(static_cast<std::size_t>(c));
    for (int j = 0; j < c; ++j) x[j] = ds.at(i, ds.train_end - c + 1 + j) / s;
    Tape tape(net.params);
    const int out = net.forward(tape, x);
    const auto z = tape.value(out);

    QuantileForecast fc;
    fc.id = ds.series[i].id;
    fc.padded = ds.offset(i) > ds.train_end - c;
    for (int t = 0; t < h; ++t) {
        const DistParams d = link(net.spec.head, z.data() + static_cast<std::size_t>(t) * P);
        StepForecast step;
        if (net.spec.head == HeadKind::tweedie) {
            step.mean = s * dist_mean(d);
            for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
                step.q[j] = s * quantile(d, kQuantileLevels[j]);
            }
        } else {
            const DistParams scaled = scale_params(d, s);
            step.mean = dist_mean(scaled);
            for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
                step.q[j] = quantile(scaled, kQuantileLevels[j]);
            }
        }
        for (std::size_t j = 0; j < step.q.size(); ++j) {
            step.q[j] = std::max(step.q[j], j == 0 ? 0.0 : step.q[j - 1]);
        }
        fc.steps.push_back(step);
    }
    return fc;
}

inline std::vector<QuantileForecast> global_forecast(const Network& net, const Dataset& ds) {
    ds.validate();
    if (!is_global(net.spec.kind)) {
        throw ConfigError("global_forecast: model '" + std::string(model_name(net.spec.kind)) +
                          "' has no network");
    }
    if (net.spec.context != ds.context) {
        throw ConfigError("global_forecast: checkpoint context " +
                          std::to_string(net.spec.context) + " does not match dataset context " +
                          std::to_string(ds.context));
    }
    if (net.spec.horizon != ds.horizon) {
        throw ConfigError("global_forecast: checkpoint horizon " +
                          std::to_string(net.spec.horizon) + " does not match dataset horizon " +
                          std::to_string(ds.horizon));
    }
    if (net.spec.context > ds.train_end) {
        throw ConfigError("global_forecast: context " + std::to_string(net.spec.context) +
                          " exceeds the training range " + std::to_string(ds.train_end));
    }

    std::vector<QuantileForecast> fcs;
    fcs.reserve(ds.series.size());
    for (std::size_t i = 0; i < ds.series.size(); ++i) {
        fcs.push_back(global_forecast_one(net, ds, i));
    }
    return fcs;
}

} // namespace zerocast
