#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zerocast/anova.hpp"
#include "zerocast/errors.hpp"
#include "zerocast/metrics.hpp"
#include "zerocast/rng.hpp"

using namespace zerocast;

namespace {

ScoreRecord rec(std::string model, std::string head, int run, Metric metric, double value) {
    return ScoreRecord{"synth", std::move(model), std::move(head), run, metric, value, false};
}

double normal_draw(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng.engine());
}

// Design matrix for the additive model/metric form, built independently of
// the implementation but in the same documented column order: intercept,
// model dummies sorted by name, metric dummies in declaration order.
struct MainDesign {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names;
};

MainDesign build_main_design(const std::vector<ScoreRecord>& records,
                             const std::string& ref_model, Metric ref_metric) {
    std::vector<std::string> models;
    for (const auto& r : records) {
        if (r.model != ref_model && std::find(models.begin(), models.end(), r.model) == models.end()) {
            models.push_back(r.model);
        }
    }
    std::sort(models.begin(), models.end());
    std::vector<Metric> metrics;
    for (Metric m : kMetrics) {
        if (m == ref_metric) continue;
        for (const auto& r : records) {
            if (r.metric == m) {
                metrics.push_back(m);
                break;
            }
        }
    }

    MainDesign d;
    d.names.push_back("intercept");
    for (const auto& m : models) d.names.push_back("model[" + m + "]");
    for (Metric m : metrics) d.names.push_back("metric[" + std::string(metric_name(m)) + "]");

    const auto n = static_cast<Eigen::Index>(records.size());
    const auto k = static_cast<Eigen::Index>(d.names.size());
    d.X = Eigen::MatrixXd::Zero(n, k);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[static_cast<std::size_t>(i)];
        d.y[i] = r.value;
        d.X(i, 0) = 1.0;
        for (std::size_t j = 0; j < models.size(); ++j) {
            if (r.model == models[j]) d.X(i, 1 + static_cast<Eigen::Index>(j)) = 1.0;
        }
        for (std::size_t j = 0; j < metrics.size(); ++j) {
            if (r.metric == metrics[j]) {
                d.X(i, 1 + static_cast<Eigen::Index>(models.size() + j)) = 1.0;
            }
        }
    }
    return d;
}

} // namespace

TEST_CASE("a balanced two-group design recovers the group difference") {
    std::vector<ScoreRecord> records;
    for (int run = 0; run < 4; ++run) {
        records.push_back(rec("isq", "none", run, Metric::sql050, 2.0));
        records.push_back(rec("dlinear", "negbin", run, Metric::sql050, 5.0));
    }

    const AnovaResult res = anova(records, "isq", "sQL0.5", false);
    REQUIRE(res.coefficients.size() == 2);
    REQUIRE(res.coefficients[0].name == "intercept");
    REQUIRE(res.coefficients[1].name == "model[dlinear]");
    REQUIRE_THAT(res.coefficients[0].estimate, Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(res.coefficients[1].estimate, Catch::Matchers::WithinAbs(3.0, 1e-12));
    REQUIRE(res.n_obs == 8);
    REQUIRE(res.reference_level == "isq");
    REQUIRE(res.reference_metric == "sQL0.5");
}

TEST_CASE("additive noise-free scores leave no residual variance") {
    std::vector<ScoreRecord> records;
    for (int run = 0; run < 3; ++run) {
        for (const char* model : {"a", "b"}) {
            for (Metric metric : {Metric::sql050, Metric::sql090}) {
                double v = 1.0;
                if (std::string(model) == "b") v += 0.5;
                if (metric == Metric::sql090) v += 0.25;
                records.push_back(rec(model, "none", run, metric, v));
            }
        }
    }

    const AnovaResult res = anova(records, "a", "sQL0.5", false);
    REQUIRE(res.sigma2 <= 1e-24);
    for (const auto& c : res.coefficients) REQUIRE(c.std_error <= 1e-12);
    REQUIRE_THAT(res.coef("intercept").estimate, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(res.coef("model[b]").estimate, Catch::Matchers::WithinAbs(0.5, 1e-12));
    REQUIRE_THAT(res.coef("metric[sQL0.9]").estimate, Catch::Matchers::WithinAbs(0.25, 1e-12));
    REQUIRE(res.coef("model[b]").p_value < 1e-9);
}

TEST_CASE("estimates match an explicit pseudoinverse solve") {
    Rng rng(430);
    std::vector<ScoreRecord> records;
    for (const char* model : {"dlinear", "fnn", "isq"}) {
        for (Metric metric : kMetrics) {
            for (int run = 0; run < 4; ++run) {
                records.push_back(rec(model, "negbin", run, metric, rng.uniform(0.5, 3.0)));
            }
        }
    }

    const AnovaResult res = anova(records, "dlinear", "sQL0.5", false);
    const MainDesign d = build_main_design(records, "dlinear", Metric::sql050);
    const auto n = d.X.rows();
    const auto k = d.X.cols();
    REQUIRE(res.coefficients.size() == static_cast<std::size_t>(k));
    REQUIRE(res.n_obs == static_cast<int>(n));

    const Eigen::VectorXd beta = d.X.completeOrthogonalDecomposition().pseudoInverse() * d.y;
    Eigen::VectorXd impl(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        REQUIRE(res.coefficients[static_cast<std::size_t>(j)].name == d.names[static_cast<std::size_t>(j)]);
        impl[j] = res.coefficients[static_cast<std::size_t>(j)].estimate;
        REQUIRE_THAT(impl[j], Catch::Matchers::WithinAbs(beta[j], 1e-10));
    }

    // Residuals of the reported fit reproduce the inputs and are orthogonal
    // to every design column.
    const Eigen::VectorXd resid = d.y - d.X * impl;
    for (Eigen::Index i = 0; i < n; ++i) {
        REQUIRE_THAT((d.X * impl)[i] + resid[i], Catch::Matchers::WithinRel(d.y[i], 1e-12));
    }
    REQUIRE((d.X.transpose() * resid).cwiseAbs().maxCoeff() < 1e-8);

    const double rss = resid.squaredNorm();
    REQUIRE_THAT(res.sigma2, Catch::Matchers::WithinRel(rss / static_cast<double>(n - k), 1e-10));

    // Standard errors, t statistics and p-values against textbook formulas,
    // with the p-value recomputed through an independent distribution.
    const Eigen::MatrixXd cov = res.sigma2 * (d.X.transpose() * d.X).inverse();
    const boost::math::students_t tdist(static_cast<double>(n - k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& c = res.coefficients[static_cast<std::size_t>(j)];
        REQUIRE_THAT(c.std_error, Catch::Matchers::WithinRel(std::sqrt(cov(j, j)), 1e-8));
        REQUIRE_THAT(c.t_stat, Catch::Matchers::WithinRel(c.estimate / c.std_error, 1e-10));
        const double p = 2.0 * boost::math::cdf(boost::math::complement(tdist, std::abs(c.t_stat)));
        REQUIRE_THAT(c.p_value,
                     Catch::Matchers::WithinRel(p, 1e-8) || Catch::Matchers::WithinAbs(p, 1e-12));
    }

    REQUIRE(res.coef("model[fnn]").estimate == impl[1]);
    REQUIRE_THROWS_AS(res.coef("model[nope]"), ConfigError);
}

TEST_CASE("interaction designs cross heads with every metric") {
    const std::vector<std::string> heads{"negbin", "hsnb", "tweedie"};
    const double c0 = 1.0;
    auto main_effect = [](Metric m) {
        switch (m) {
            case Metric::sql080: return 0.08;
            case Metric::sql090: return 0.16;
            case Metric::sql095: return -0.05;
            case Metric::sql099: return 0.30;
            case Metric::rmsse: return 0.12;
            default: return 0.0;
        }
    };
    auto interaction_effect = [](const std::string& head, Metric m) {
        if (head == "hsnb") {
            switch (m) {
                case Metric::sql050: return 0.05;
                case Metric::sql080: return 0.03;
                case Metric::sql090: return -0.07;
                case Metric::sql099: return 0.10;
                case Metric::rmsse: return -0.04;
                default: return 0.0;
            }
        }
        if (head == "tweedie") {
            switch (m) {
                case Metric::sql080: return 0.06;
                case Metric::sql090: return 0.09;
                case Metric::sql095: return -0.12;
                case Metric::rmsse: return 0.20;
                default: return 0.0;
            }
        }
        return 0.0;
    };

    Rng rng(431);
    std::vector<ScoreRecord> records;
    for (const auto& head : heads) {
        for (Metric metric : kMetrics) {
            for (int run = 0; run < 25; ++run) {
                double v = c0 + main_effect(metric) + interaction_effect(head, metric);
                v += 0.005 * normal_draw(rng);
                records.push_back(rec("dlinear", head, run, metric, v));
            }
        }
    }

    const AnovaResult res = anova(records, "negbin", "sQL0.5", true);

    std::vector<std::string> expected{"intercept"};
    for (Metric m : kMetrics) {
        if (m != Metric::sql050) expected.push_back("metric[" + std::string(metric_name(m)) + "]");
    }
    for (const char* head : {"hsnb", "tweedie"}) {
        for (Metric m : kMetrics) {
            expected.push_back("head[" + std::string(head) + "]:metric[" + metric_name(m) + "]");
        }
    }
    REQUIRE(res.coefficients.size() == expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j) {
        REQUIRE(res.coefficients[j].name == expected[j]);
    }

    REQUIRE_THAT(res.coef("intercept").estimate, Catch::Matchers::WithinAbs(c0, 0.01));
    for (Metric m : kMetrics) {
        if (m == Metric::sql050) continue;
        const std::string name = "metric[" + std::string(metric_name(m)) + "]";
        REQUIRE_THAT(res.coef(name).estimate, Catch::Matchers::WithinAbs(main_effect(m), 0.01));
    }
    for (const char* head : {"hsnb", "tweedie"}) {
        for (Metric m : kMetrics) {
            const std::string name =
                "head[" + std::string(head) + "]:metric[" + metric_name(m) + "]";
            REQUIRE_THAT(res.coef(name).estimate,
                         Catch::Matchers::WithinAbs(interaction_effect(head, m), 0.01));
        }
    }

    REQUIRE(res.coef("head[hsnb]:metric[sQL0.5]").p_value < 0.05);
    REQUIRE(res.coef("head[tweedie]:metric[RMSSE]").p_value < 0.05);
    REQUIRE(res.reference_level == "negbin");
}

TEST_CASE("record order never changes the estimates") {
    Rng rng(432);
    std::vector<ScoreRecord> records;
    for (const char* model : {"dlinear", "iets"}) {
        for (Metric metric : {Metric::sql050, Metric::sql090, Metric::rmsse}) {
            for (int run = 0; run < 3; ++run) {
                records.push_back(rec(model, "none", run, metric, rng.uniform(0.5, 2.0)));
            }
        }
    }
    const AnovaResult base = anova(records, "dlinear", "sQL0.5", false);

    std::vector<ScoreRecord> shuffled(records);
    std::mt19937 gen(7);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const AnovaResult res = anova(shuffled, "dlinear", "sQL0.5", false);
        REQUIRE(res.coefficients.size() == base.coefficients.size());
        for (std::size_t j = 0; j < base.coefficients.size(); ++j) {
            REQUIRE(res.coefficients[j].name == base.coefficients[j].name);
            REQUIRE(res.coefficients[j].estimate == base.coefficients[j].estimate);
            REQUIRE(res.coefficients[j].std_error == base.coefficients[j].std_error);
            REQUIRE(res.coefficients[j].t_stat == base.coefficients[j].t_stat);
            REQUIRE(res.coefficients[j].p_value == base.coefficients[j].p_value);
        }
    }
}

TEST_CASE("collinear designs are rejected with the offending columns") {
    // One model is only ever scored on one metric, so its dummy column
    // equals the metric dummy column.
    std::vector<ScoreRecord> records;
    for (int run = 0; run < 4; ++run) {
        records.push_back(rec("isq", "none", run, Metric::sql050, 1.0 + 0.1 * run));
        records.push_back(rec("iets", "none", run, Metric::sql090, 2.0 + 0.1 * run));
    }

    try {
        anova(records, "isq", "sQL0.5", false);
        FAIL("expected a DesignError");
    } catch (const DesignError& e) {
        const std::string msg = e.what();
        const bool names_column = msg.find("model[iets]") != std::string::npos ||
                                  msg.find("metric[sQL0.9]") != std::string::npos;
        REQUIRE(names_column);
    }
}

TEST_CASE("anova rejects designs it cannot estimate") {
    std::vector<ScoreRecord> one{rec("isq", "none", 0, Metric::sql050, 1.0)};
    REQUIRE_THROWS_AS(anova(one, "isq", "sQL0.5", false), DesignError);

    std::vector<ScoreRecord> records;
    for (int run = 0; run < 3; ++run) {
        records.push_back(rec("isq", "none", run, Metric::sql050, 1.0 + run));
        records.push_back(rec("iets", "iets", run, Metric::sql050, 2.0 + run));
    }
    REQUIRE_THROWS_AS(anova(records, "dlinear", "sQL0.5", false), ConfigError);
    REQUIRE_THROWS_AS(anova(records, "isq", "sQL0.9", false), ConfigError);
    REQUIRE_THROWS_AS(anova(records, "sQL0.banana", "sQL0.5", false), ConfigError);
    // The interaction form groups by head, and neither head matches.
    REQUIRE_THROWS_AS(anova(records, "negbin", "sQL0.5", true), ConfigError);

    std::vector<ScoreRecord> flagged_only{
        {"synth", "isq", "none", 0, Metric::sql050, std::nan(""), true}};
    REQUIRE_THROWS_AS(anova(flagged_only, "isq", "sQL0.5", false), DesignError);
}

TEST_CASE("flagged records never enter the fit") {
    Rng rng(433);
    std::vector<ScoreRecord> records;
    for (const char* model : {"dlinear", "fnn"}) {
        for (Metric metric : {Metric::sql050, Metric::rmsse}) {
            for (int run = 0; run < 3; ++run) {
                records.push_back(rec(model, "negbin", run, metric, rng.uniform(0.5, 2.0)));
            }
        }
    }
    const AnovaResult base = anova(records, "dlinear", "sQL0.5", false);

    std::vector<ScoreRecord> noisy(records);
    noisy.insert(noisy.begin() + 3, {"synth", "fnn", "negbin", 9, Metric::sql050, std::nan(""), true});
    noisy.push_back({"synth", "dlinear", "negbin", 9, Metric::rmsse, 1e9, true});
    const AnovaResult res = anova(noisy, "dlinear", "sQL0.5", false);

    REQUIRE(res.n_obs == base.n_obs);
    for (std::size_t j = 0; j < base.coefficients.size(); ++j) {
        REQUIRE(res.coefficients[j].estimate == base.coefficients[j].estimate);
        REQUIRE(res.coefficients[j].std_error == base.coefficients[j].std_error);
    }
}

TEST_CASE("comparison tables mark significant coefficients") {
    std::vector<ScoreRecord> records;
    Rng rng(434);
    for (int run = 0; run < 6; ++run) {
        records.push_back(rec("isq", "none", run, Metric::sql050, 1.0 + 0.001 * normal_draw(rng)));
        records.push_back(rec("dlinear", "negbin", run, Metric::sql050, 1.0005 + 0.001 * normal_draw(rng)));
        records.push_back(rec("fnn", "negbin", run, Metric::sql050, 3.0 + 0.001 * normal_draw(rng)));
    }
    const AnovaResult res = anova(records, "isq", "sQL0.5", false);
    REQUIRE(res.coef("model[fnn]").p_value < 0.05);

    std::ostringstream csv;
    write_anova_csv(csv, res);
    std::istringstream lines(csv.str());
    std::string line;
    REQUIRE(std::getline(lines, line));
    REQUIRE(line == "name,estimate,std_error,t_stat,p_value,sig");
    std::size_t rows = 0;
    bool fnn_starred = false;
    while (std::getline(lines, line)) {
        const auto& c = res.coefficients[rows];
        REQUIRE(line.rfind(c.name + ",", 0) == 0);
        const bool starred = line.size() >= 2 && line.substr(line.size() - 2) == ",*";
        REQUIRE(starred == (c.p_value < 0.05));
        if (c.name == "model[fnn]") fnn_starred = starred;
        ++rows;
    }
    REQUIRE(rows == res.coefficients.size());
    REQUIRE(fnn_starred);

    const std::string table = format_anova_table(res);
    REQUIRE(table.find("coefficient") != std::string::npos);
    REQUIRE(table.find("sig") != std::string::npos);
    for (const auto& c : res.coefficients) {
        REQUIRE(table.find(c.name) != std::string::npos);
    }
    REQUIRE(table.find("reference: isq, sQL0.5") != std::string::npos);
    REQUIRE(table.find('*') != std::string::npos);
}
