#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "zerocast/errors.hpp"
#include "zerocast/math.hpp"
#include "zerocast/metrics.hpp"

namespace zerocast {

struct AnovaCoef {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

/**
 * @brief OLS fit of aggregated scores on model/metric (or head x metric)
 * dummies, with per-coefficient t tests.
 */
struct AnovaResult {
    std::vector<AnovaCoef> coefficients;
    std::string reference_level;
    std::string reference_metric;
    double sigma2 = 0.0;
    int n_obs = 0;

    const AnovaCoef& coef(const std::string& name) const {
        for (const auto& c : coefficients) {
            if (c.name == name) return c;
        }
        throw ConfigError("anova: no coefficient named '" + name + "'");
    }
};

namespace detail {

inline int metric_index(Metric m) {
    for (std::size_t i = 0; i < kMetrics.size(); ++i) {
        if (kMetrics[i] == m) return static_cast<int>(i);
    }
    return -1;
}

} // namespace detail

/**
 * @brief Compares models (or distribution heads) across metrics by linear
 * regression on one-hot dummies.
 *
 * The additive form regresses scores on model and metric indicators against
 * the given reference levels. The interaction form instead groups by head:
 * metric main effects keep the reference metric, and every non-reference
 * head gets one interaction dummy per metric, reference metric included, so
 * head effects can be read off per metric.
 */
inline AnovaResult anova(const std::vector<ScoreRecord>& records,
                         const std::string& reference_level, const std::string& reference_metric,
                         bool interaction) {
    const Metric ref_metric = parse_metric(reference_metric);

    std::vector<ScoreRecord> rows;
    for (const auto& r : records) {
        if (r.flagged) continue;
        if (!std::isfinite(r.value)) {
            throw DomainError("anova: unflagged record for '" + r.model + "' has value " +
                              std::to_string(r.value));
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw DesignError("anova: no unflagged records to fit");

    auto factor = [interaction](const ScoreRecord& r) -> const std::string& {
        return interaction ? r.head : r.model;
    };

    std::sort(rows.begin(), rows.end(), [&](const ScoreRecord& a, const ScoreRecord& b) {
        if (a.dataset != b.dataset) return a.dataset < b.dataset;
        if (a.model != b.model) return a.model < b.model;
        if (a.head != b.head) return a.head < b.head;
        if (a.run != b.run) return a.run < b.run;
        if (a.metric != b.metric) return detail::metric_index(a.metric) < detail::metric_index(b.metric);
        return a.value < b.value;
    });

    std::vector<std::string> levels;
    bool ref_level_seen = false;
    bool ref_metric_seen = false;
    std::array<bool, kMetrics.size()> metric_seen{};
    for (const auto& r : rows) {
        const std::string& lv = factor(r);
        if (lv == reference_level) {
            ref_level_seen = true;
        } else if (std::find(levels.begin(), levels.end(), lv) == levels.end()) {
            levels.push_back(lv);
        }
        metric_seen[static_cast<std::size_t>(detail::metric_index(r.metric))] = true;
        if (r.metric == ref_metric) ref_metric_seen = true;
    }
    std::sort(levels.begin(), levels.end());
    if (!ref_level_seen) {
        throw ConfigError("anova: reference level '" + reference_level + "' has no records");
    }
    if (!ref_metric_seen) {
        throw ConfigError("anova: reference metric '" + reference_metric + "' has no records");
    }
    std::vector<Metric> metrics;
    for (std::size_t i = 0; i < kMetrics.size(); ++i) {
        if (metric_seen[i]) metrics.push_back(kMetrics[i]);
    }

    const char* level_tag = interaction ? "head[" : "model[";
    std::vector<std::string> names{"intercept"};
    if (interaction) {
        for (Metric m : metrics) {
            if (m != ref_metric) names.push_back("metric[" + std::string(metric_name(m)) + "]");
        }
        for (const auto& lv : levels) {
            for (Metric m : metrics) {
                names.push_back(level_tag + lv + "]:metric[" + metric_name(m) + "]");
            }
        }
    } else {
        for (const auto& lv : levels) names.push_back(level_tag + lv + "]");
        for (Metric m : metrics) {
            if (m != ref_metric) names.push_back("metric[" + std::string(metric_name(m)) + "]");
        }
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto k = static_cast<Eigen::Index>(names.size());
    if (n <= k) {
        throw DesignError("anova: " + std::to_string(n) + " records cannot estimate " +
                          std::to_string(k) + " coefficients");
    }

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        y[i] = r.value;
        X(i, 0) = 1.0;
        Eigen::Index col = 1;
        if (interaction) {
            for (Metric m : metrics) {
                if (m == ref_metric) continue;
                if (r.metric == m) X(i, col) = 1.0;
                ++col;
            }
            for (const auto& lv : levels) {
                for (Metric m : metrics) {
                    if (factor(r) == lv && r.metric == m) X(i, col) = 1.0;
                    ++col;
                }
            }
        } else {
            for (const auto& lv : levels) {
                if (factor(r) == lv) X(i, col) = 1.0;
                ++col;
            }
            for (Metric m : metrics) {
                if (m == ref_metric) continue;
                if (r.metric == m) X(i, col) = 1.0;
                ++col;
            }
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::Index rank = qr.rank();
    if (rank < k) {
        // A column is redundant when dropping it keeps the span, i.e. it is
        // a linear combination of the others.
        std::string offenders;
        for (Eigen::Index j = 0; j < k; ++j) {
            Eigen::MatrixXd sub(n, k - 1);
            sub << X.leftCols(j), X.rightCols(k - 1 - j);
            if (sub.colPivHouseholderQr().rank() == rank) {
                if (!offenders.empty()) offenders += ", ";
                offenders += names[static_cast<std::size_t>(j)];
            }
        }
        throw DesignError("anova: collinear design columns: " + offenders);
    }

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double df = static_cast<double>(n - k);
    const double sigma2 = resid.squaredNorm() / df;

    const Eigen::MatrixXd rinv = qr.matrixQR()
                                     .topLeftCorner(k, k)
                                     .triangularView<Eigen::Upper>()
                                     .solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd xtx_inv =
        qr.colsPermutation() * (rinv * rinv.transpose()) * qr.colsPermutation().transpose();

    AnovaResult res;
    res.reference_level = reference_level;
    res.reference_metric = reference_metric;
    res.sigma2 = sigma2;
    res.n_obs = static_cast<int>(n);
    for (Eigen::Index j = 0; j < k; ++j) {
        AnovaCoef c;
        c.name = names[static_cast<std::size_t>(j)];
        c.estimate = beta[j];
        c.std_error = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
        if (c.std_error == 0.0) {
            c.t_stat = c.estimate == 0.0 ? 0.0 : std::copysign(kInf, c.estimate);
        } else {
            c.t_stat = c.estimate / c.std_error;
        }
        c.p_value = student_t_two_sided_p(c.t_stat, df);
        res.coefficients.push_back(std::move(c));
    }
    return res;
}

namespace detail {

inline std::string format_fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

} // namespace detail

inline void write_anova_csv(std::ostream& out, const AnovaResult& res) {
    out << "name,estimate,std_error,t_stat,p_value,sig\n";
    for (const auto& c : res.coefficients) {
        out << c.name << ',' << detail::format_double(c.estimate) << ','
            << detail::format_double(c.std_error) << ',' << detail::format_double(c.t_stat) << ','
            << detail::format_double(c.p_value) << ',' << (c.p_value < 0.05 ? "*" : "") << '\n';
    }
}

/// Aligned text table with a trailing significance column (* when p<0.05).
inline std::string format_anova_table(const AnovaResult& res) {
    std::size_t name_w = std::string("coefficient").size();
    for (const auto& c : res.coefficients) name_w = std::max(name_w, c.name.size());

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_w)) << "coefficient" << std::right
        << std::setw(13) << "estimate" << std::setw(13) << "std_error" << std::setw(13) << "t_stat"
        << std::setw(13) << "p_value" << "  sig\n";
    for (const auto& c : res.coefficients) {
        out << std::left << std::setw(static_cast<int>(name_w)) << c.name << std::right
            << std::setw(13) << detail::format_fixed6(c.estimate) << std::setw(13)
            << detail::format_fixed6(c.std_error) << std::setw(13)
            << detail::format_fixed6(c.t_stat) << std::setw(13) << detail::format_fixed6(c.p_value)
            << (c.p_value < 0.05 ? "  *" : "") << '\n';
    }
    out << "n=" << res.n_obs << ", residual sigma2=" << detail::format_fixed6(res.sigma2) << '\n';
    out << "reference: " << res.reference_level << ", " << res.reference_metric << '\n';
    return out.str();
}

} // namespace zerocast
