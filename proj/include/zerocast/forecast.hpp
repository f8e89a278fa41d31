#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "zerocast/csv.hpp"
#include "zerocast/errors.hpp"

namespace zerocast {

/// Quantile levels reported by every forecaster, in ascending order.
inline constexpr std::array<double, 5> kQuantileLevels{0.5, 0.8, 0.9, 0.95, 0.99};

struct StepForecast {
    double mean = 0.0;
    std::array<double, 5> q{};
};

/**
 * @brief Per-series forecast: one quantile set and predictive mean per
 * horizon step.
 *
 * padded marks forecasts whose context window reached before the observed
 * history; degenerate marks local fits that never saw a positive value.
 */
struct QuantileForecast {
    std::string id;
    bool padded = false;
    bool degenerate = false;
    std::vector<StepForecast> steps;
};

inline void validate_forecast(const QuantileForecast& fc) {
    for (std::size_t t = 0; t < fc.steps.size(); ++t) {
        const StepForecast& step = fc.steps[t];
        const std::string where =
            "forecast for series '" + fc.id + "' at step " + std::to_string(t + 1);
        if (!(step.mean >= 0.0) || !std::isfinite(step.mean)) {
            throw DomainError(where + " has invalid mean " + std::to_string(step.mean));
        }
        double prev = 0.0;
        for (double v : step.q) {
            if (!std::isfinite(v) || !(v >= prev)) {
                throw DomainError(where + " has negative or non-monotone quantiles");
            }
            prev = v;
        }
    }
}

inline constexpr std::string_view kForecastHeader = "id,step,mean,q0.5,q0.8,q0.9,q0.95,q0.99";

inline void write_forecast_csv(std::ostream& out, const std::vector<QuantileForecast>& fcs) {
    out << kForecastHeader << '\n';
    for (const auto& fc : fcs) {
        for (std::size_t t = 0; t < fc.steps.size(); ++t) {
            const StepForecast& step = fc.steps[t];
            out << fc.id << ',' << (t + 1) << ',' << detail::format_double(step.mean);
            for (double v : step.q) out << ',' << detail::format_double(v);
            out << '\n';
        }
    }
}

inline void write_forecast_csv(const std::string& path, const std::vector<QuantileForecast>& fcs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    write_forecast_csv(out, fcs);
    if (!out) throw SchemaError("failed writing '" + path + "'");
}

inline std::vector<QuantileForecast> read_forecast_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("forecast file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kForecastHeader) {
        throw SchemaError("forecast header must be '" + std::string(kForecastHeader) + "', got '" +
                          line + "'");
    }

    std::vector<QuantileForecast> fcs;
    std::unordered_set<std::string> finished;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "at row " + std::to_string(row);

        std::array<std::string_view, 8> cells;
        std::string_view rest(line);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto comma = rest.find(',');
            if (c + 1 < cells.size()) {
                if (comma == std::string_view::npos) {
                    throw SchemaError("expected eight columns " + where);
                }
                cells[c] = rest.substr(0, comma);
                rest = rest.substr(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw SchemaError("expected eight columns " + where);
                }
                cells[c] = rest;
            }
        }

        const std::string id(cells[0]);
        if (id.empty()) throw SchemaError("empty id " + where);
        const long long step = detail::parse_int(cells[1], where);
        if (fcs.empty() || fcs.back().id != id) {
            if (!finished.insert(id).second) {
                throw SchemaError("forecast rows for id '" + id + "' are not contiguous " + where);
            }
            fcs.push_back(QuantileForecast{});
            fcs.back().id = id;
        }
        QuantileForecast& fc = fcs.back();
        if (step != static_cast<long long>(fc.steps.size()) + 1) {
            throw SchemaError("expected step " + std::to_string(fc.steps.size() + 1) + " for id '" +
                              id + "', got " + std::to_string(step) + " " + where);
        }
        StepForecast sf;
        sf.mean = detail::parse_double(cells[2], where);
        for (std::size_t j = 0; j < sf.q.size(); ++j) {
            sf.q[j] = detail::parse_double(cells[3 + j], where);
        }
        fc.steps.push_back(sf);
    }
    return fcs;
}

inline std::vector<QuantileForecast> read_forecast_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open forecast file '" + path + "'");
    return read_forecast_csv(in);
}

} // namespace zerocast
