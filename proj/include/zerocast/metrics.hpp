#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "zerocast/csv.hpp"
#include "zerocast/errors.hpp"
#include "zerocast/forecast.hpp"
#include "zerocast/isq.hpp"
#include "zerocast/series.hpp"

namespace zerocast {

/// Accuracy metrics reported per series and aggregated per dataset.
enum class Metric { sql050, sql080, sql090, sql095, sql099, rmsse };

inline constexpr std::array<Metric, 6> kMetrics{Metric::sql050, Metric::sql080, Metric::sql090,
                                                Metric::sql095, Metric::sql099, Metric::rmsse};

/// The quantile-loss metrics, aligned index-for-index with kQuantileLevels.
inline constexpr std::array<Metric, 5> kSqlMetrics{Metric::sql050, Metric::sql080, Metric::sql090,
                                                   Metric::sql095, Metric::sql099};

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::sql050: return "sQL0.5";
        case Metric::sql080: return "sQL0.8";
        case Metric::sql090: return "sQL0.9";
        case Metric::sql095: return "sQL0.95";
        case Metric::sql099: return "sQL0.99";
        case Metric::rmsse: return "RMSSE";
    }
    throw ConfigError("metric_name: unknown metric");
}

inline Metric parse_metric(std::string_view name) {
    for (Metric m : kMetrics) {
        if (name == metric_name(m)) return m;
    }
    throw SchemaError("unknown metric '" + std::string(name) + "'");
}

/// Quantile level scored by a sQL metric.
inline double metric_level(Metric m) {
    for (std::size_t j = 0; j < kSqlMetrics.size(); ++j) {
        if (m == kSqlMetrics[j]) return kQuantileLevels[j];
    }
    throw ConfigError("metric_level: RMSSE has no quantile level");
}

/**
 * @brief Pinball loss 2(1-q)(yhat-y) above the observation, 2q(y-yhat) at or
 * below it. Minimized in expectation by the q-quantile.
 */
inline double quantile_loss(double y, double yhat_q, double q) {
    return y < yhat_q ? 2.0 * (1.0 - q) * (yhat_q - y) : 2.0 * q * (y - yhat_q);
}

/**
 * @brief One per-series score; flagged means the scaling denominator was
 * degenerate and the value is NaN, to be excluded from aggregation.
 */
struct SeriesScore {
    double value = 0.0;
    bool flagged = false;
};

namespace detail {

inline SeriesScore flagged_score() {
    return SeriesScore{std::numeric_limits<double>::quiet_NaN(), true};
}

} // namespace detail

/**
 * @brief Scaled quantile loss: the mean pinball loss over the test steps
 * divided by the mean in-sample pinball loss of the training window's own
 * q-quantile. A vanishing denominator flags the series.
 */
inline SeriesScore sql_score(const std::vector<double>& train, const std::vector<double>& actual,
                             const std::vector<double>& yhat, double q) {
    if (actual.empty() || actual.size() != yhat.size()) {
        throw ShapeError("sql_score: forecast and actuals must align on a nonempty test window");
    }
    if (train.empty()) return detail::flagged_score();

    std::vector<double> sorted(train);
    std::sort(sorted.begin(), sorted.end());
    const double isq = detail::sorted_quantile(sorted, q);

    double denom = 0.0;
    for (double y : train) denom += quantile_loss(y, isq, q);
    denom /= static_cast<double>(train.size());
    if (denom == 0.0) return detail::flagged_score();

    double num = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) num += quantile_loss(actual[t], yhat[t], q);
    num /= static_cast<double>(actual.size());
    return SeriesScore{num / denom, false};
}

/**
 * @brief Root mean squared scaled error: test mean squared error of the
 * predictive mean divided by the training mean squared one-step naive error.
 */
inline SeriesScore rmsse_score(const std::vector<double>& train, const std::vector<double>& actual,
                               const std::vector<double>& means) {
    if (actual.empty() || actual.size() != means.size()) {
        throw ShapeError("rmsse_score: forecast and actuals must align on a nonempty test window");
    }
    if (train.size() < 2) return detail::flagged_score();

    double denom = 0.0;
    for (std::size_t t = 1; t < train.size(); ++t) {
        const double d = train[t] - train[t - 1];
        denom += d * d;
    }
    denom /= static_cast<double>(train.size() - 1);
    if (denom == 0.0) return detail::flagged_score();

    double num = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double e = actual[t] - means[t];
        num += e * e;
    }
    num /= static_cast<double>(actual.size());
    return SeriesScore{std::sqrt(num / denom), false};
}

namespace detail {

// Observed training values of a series under the split, mirroring the
// alignment rule that pads short series on the left.
inline std::vector<double> observed_train(const TimeSeries& ts, const SplitView& split) {
    const int offset = split.test_last() - static_cast<int>(ts.values.size());
    std::vector<double> train;
    for (int t = std::max(1, offset + 1); t <= split.train_last(); ++t) {
        train.push_back(ts.values[static_cast<std::size_t>(t - offset - 1)]);
    }
    return train;
}

inline std::vector<double> test_window(const TimeSeries& ts, const SplitView& split) {
    const int offset = split.test_last() - static_cast<int>(ts.values.size());
    if (offset > split.train_end_t) {
        throw ConfigError("series '" + ts.id + "' is shorter than the forecast horizon");
    }
    std::vector<double> actual;
    for (int t = split.test_first(); t <= split.test_last(); ++t) {
        actual.push_back(ts.values[static_cast<std::size_t>(t - offset - 1)]);
    }
    return actual;
}

} // namespace detail

inline SeriesScore sql(const TimeSeries& ts, const QuantileForecast& fc, const SplitView& split,
                       double q) {
    if (static_cast<int>(fc.steps.size()) != split.horizon) {
        throw ShapeError("sql: forecast for series '" + ts.id + "' has " +
                         std::to_string(fc.steps.size()) + " steps for horizon " +
                         std::to_string(split.horizon));
    }
    std::size_t column = kQuantileLevels.size();
    for (std::size_t j = 0; j < kQuantileLevels.size(); ++j) {
        if (kQuantileLevels[j] == q) column = j;
    }
    if (column == kQuantileLevels.size()) {
        throw ConfigError("sql: no forecast column for quantile level " + std::to_string(q));
    }

    std::vector<double> yhat;
    for (const auto& step : fc.steps) yhat.push_back(step.q[column]);
    return sql_score(detail::observed_train(ts, split), detail::test_window(ts, split), yhat, q);
}

inline SeriesScore rmsse(const TimeSeries& ts, const QuantileForecast& fc, const SplitView& split) {
    if (static_cast<int>(fc.steps.size()) != split.horizon) {
        throw ShapeError("rmsse: forecast for series '" + ts.id + "' has " +
                         std::to_string(fc.steps.size()) + " steps for horizon " +
                         std::to_string(split.horizon));
    }
    std::vector<double> means;
    for (const auto& step : fc.steps) means.push_back(step.mean);
    return rmsse_score(detail::observed_train(ts, split), detail::test_window(ts, split), means);
}

inline SeriesScore score_metric(const TimeSeries& ts, const QuantileForecast& fc,
                                const SplitView& split, Metric m) {
    if (m == Metric::rmsse) return rmsse(ts, fc, split);
    return sql(ts, fc, split, metric_level(m));
}

/**
 * @brief Unweighted mean over the unflagged series scores, with the flagged
 * count kept for the coverage report.
 */
struct AggregateResult {
    double value = 0.0;
    int used = 0;
    int skipped = 0;
};

inline AggregateResult aggregate(const std::vector<SeriesScore>& scores) {
    AggregateResult agg;
    double sum = 0.0;
    for (const auto& s : scores) {
        if (s.flagged) {
            ++agg.skipped;
        } else {
            sum += s.value;
            ++agg.used;
        }
    }
    if (agg.used == 0) throw EmptyAggregateError("aggregate: no unflagged series scores");
    agg.value = sum / static_cast<double>(agg.used);
    return agg;
}

/**
 * @brief One aggregated score: a (dataset, model, head, run, metric) cell.
 */
struct ScoreRecord {
    std::string dataset;
    std::string model;
    std::string head;
    int run = 0;
    Metric metric = Metric::sql050;
    double value = 0.0;
    bool flagged = false;
};

inline constexpr std::string_view kScoresHeader = "dataset,model,head,run,metric,value,flagged";

namespace detail {

inline void check_csv_field(const std::string& value, const char* field) {
    if (value.empty()) {
        throw SchemaError(std::string("score record has an empty ") + field + " field");
    }
    if (value.find_first_of(",\"\r\n") != std::string::npos) {
        throw SchemaError(std::string("score record ") + field + " '" + value +
                          "' contains a separator character");
    }
}

} // namespace detail

inline void write_scores_csv(std::ostream& out, const std::vector<ScoreRecord>& records) {
    out << kScoresHeader << '\n';
    for (const auto& r : records) {
        detail::check_csv_field(r.dataset, "dataset");
        detail::check_csv_field(r.model, "model");
        detail::check_csv_field(r.head, "head");
        out << r.dataset << ',' << r.model << ',' << r.head << ',' << r.run << ','
            << metric_name(r.metric) << ',' << (r.flagged ? "nan" : detail::format_double(r.value))
            << ',' << (r.flagged ? 1 : 0) << '\n';
    }
}

inline void write_scores_csv(const std::string& path, const std::vector<ScoreRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open '" + path + "' for writing");
    write_scores_csv(out, records);
    if (!out) throw SchemaError("failed writing '" + path + "'");
}

inline std::vector<ScoreRecord> read_scores_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("scores file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kScoresHeader) {
        throw SchemaError("scores header must be '" + std::string(kScoresHeader) + "', got '" +
                          line + "'");
    }

    std::vector<ScoreRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "at row " + std::to_string(row);

        std::array<std::string_view, 7> cells;
        std::string_view rest(line);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto comma = rest.find(',');
            if (c + 1 < cells.size()) {
                if (comma == std::string_view::npos) {
                    throw SchemaError("expected seven columns " + where);
                }
                cells[c] = rest.substr(0, comma);
                rest = rest.substr(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw SchemaError("expected seven columns " + where);
                }
                cells[c] = rest;
            }
        }

        ScoreRecord r;
        r.dataset = std::string(cells[0]);
        r.model = std::string(cells[1]);
        r.head = std::string(cells[2]);
        if (r.dataset.empty() || r.model.empty() || r.head.empty()) {
            throw SchemaError("empty name field " + where);
        }
        r.run = static_cast<int>(detail::parse_int(cells[3], where));
        r.metric = parse_metric(cells[4]);
        if (cells[6] == "0") {
            r.flagged = false;
        } else if (cells[6] == "1") {
            r.flagged = true;
        } else {
            throw SchemaError("flagged column must be 0 or 1 " + where);
        }
        if (r.flagged) {
            r.value = std::numeric_limits<double>::quiet_NaN();
        } else {
            r.value = detail::parse_double(cells[5], where);
            if (!std::isfinite(r.value) || r.value < 0.0) {
                throw SchemaError("score value must be finite and nonnegative " + where);
            }
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<ScoreRecord> read_scores_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open scores file '" + path + "'");
    return read_scores_csv(in);
}

} // namespace zerocast
