#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zerocast/series.hpp"
#include "zerocast/synthetic.hpp"

using namespace zerocast;

TEST_CASE("synthetic negbin corpus matches the target moments", "[synthetic]") {
    const auto series = gen_synthetic(DistParams{NegBinParams{0.75, 0.2}}, 200, 5000, 3);
    REQUIRE(series.size() == 200);
    double sum = 0.0;
    double sumsq = 0.0;
    double count = 0.0;
    for (const auto& s : series) {
        REQUIRE(s.values.size() == 5000);
        REQUIRE(s.is_integer());
        for (double v : s.values) {
            REQUIRE(v >= 0.0);
            sum += v;
            sumsq += v * v;
            count += 1.0;
        }
    }
    const double m = sum / count;
    const double v = sumsq / count - m * m;
    const double se = std::sqrt(15.0 / count);
    REQUIRE_THAT(m, Catch::Matchers::WithinAbs(3.0, 4.0 * se));
    REQUIRE_THAT(v, Catch::Matchers::WithinRel(15.0, 0.02));
}

TEST_CASE("synthetic hsnb with a closed gate is all zero", "[synthetic]") {
    const auto series = gen_synthetic(DistParams{HsnbParams{0.0, 2.0, 0.4}}, 20, 300, 5);
    for (const auto& s : series) {
        for (double v : s.values) REQUIRE(v == 0.0);
    }
}

TEST_CASE("synthetic tweedie matches compound simulation moments", "[synthetic][oracle]") {
    const TweedieParams p{3.0, 1.0, 1.5};
    const auto series = gen_synthetic(DistParams{p}, 100, 10000, 9);
    double sum = 0.0;
    double sumsq = 0.0;
    double count = 0.0;
    bool any_fractional = false;
    for (const auto& s : series) {
        for (double v : s.values) {
            sum += v;
            sumsq += v * v;
            count += 1.0;
            if (v != std::floor(v)) any_fractional = true;
        }
    }
    const double var = p.phi * std::pow(p.mu, p.rho);
    const double m = sum / count;
    REQUIRE_THAT(m, Catch::Matchers::WithinAbs(p.mu, 4.0 * std::sqrt(var / count)));
    // Fourth-moment-free guard band for the variance z-test.
    REQUIRE_THAT(sumsq / count - m * m, Catch::Matchers::WithinRel(var, 0.03));
    REQUIRE(any_fractional);
}

TEST_CASE("synthetic generation is reproducible and seed-sensitive", "[synthetic]") {
    const DistParams p{NegBinParams{2.0, 0.4}};
    const auto a = gen_synthetic(p, 10, 100, 77);
    const auto b = gen_synthetic(p, 10, 100, 77);
    const auto c = gen_synthetic(p, 10, 100, 78);
    REQUIRE(a.size() == b.size());
    bool all_equal = true;
    bool any_diff_seed = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].id == b[i].id);
        if (a[i].values != b[i].values) all_equal = false;
        if (a[i].values != c[i].values) any_diff_seed = true;
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff_seed);

    SECTION("ids are unique and stable") {
        REQUIRE(a[0].id != a[1].id);
        REQUIRE(a[0].id == "s00000");
        REQUIRE(a[9].id == "s00009");
    }
}

TEST_CASE("seasonal occurrence modulation plants a learnable cycle", "[synthetic]") {
    const HsnbParams base{0.3, 2.0, 0.4};
    SeasonalSpec seasonal;
    seasonal.period = 6;
    seasonal.amplitude = 0.9;
    const auto series = gen_synthetic(DistParams{base}, 400, 600, 21, seasonal);

    // Bucket occurrence rates by phase within the cycle; the planted
    // sinusoid must separate the most and least active phases clearly.
    for (int i = 0; i < 3; ++i) {
        const auto& s = series[i * 100];
        double rate[6] = {0, 0, 0, 0, 0, 0};
        int cnt[6] = {0, 0, 0, 0, 0, 0};
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            rate[t % 6] += s.values[t] > 0.0 ? 1.0 : 0.0;
            ++cnt[t % 6];
        }
        double hi = 0.0;
        double lo = 1.0;
        for (int k = 0; k < 6; ++k) {
            hi = std::max(hi, rate[k] / cnt[k]);
            lo = std::min(lo, rate[k] / cnt[k]);
        }
        REQUIRE(hi - lo > 0.2);
    }

    SECTION("zero period reproduces the unmodulated stream") {
        const auto plain = gen_synthetic(DistParams{base}, 5, 100, 77);
        const auto with_default = gen_synthetic(DistParams{base}, 5, 100, 77, SeasonalSpec{});
        for (std::size_t i = 0; i < plain.size(); ++i) REQUIRE(plain[i].values == with_default[i].values);
    }
}

TEST_CASE("seasonal mean modulation applies to count and continuous kinds", "[synthetic]") {
    SeasonalSpec seasonal;
    seasonal.period = 12;
    seasonal.amplitude = 0.8;

    // Phases are random per series, so the modulation is visible per series:
    // the series' best phase bucket clearly beats its worst one.
    auto clearly_modulated = [](const std::vector<TimeSeries>& corpus) {
        int clear = 0;
        for (const auto& s : corpus) {
            double bucket[12] = {0};
            int cnt[12] = {0};
            for (std::size_t t = 0; t < s.values.size(); ++t) {
                bucket[t % 12] += s.values[t];
                ++cnt[t % 12];
            }
            double hi = 0.0;
            double lo = 1e18;
            for (int k = 0; k < 12; ++k) {
                hi = std::max(hi, bucket[k] / cnt[k]);
                lo = std::min(lo, bucket[k] / cnt[k]);
            }
            if (hi > 1.5 * (lo + 0.1)) ++clear;
        }
        return clear;
    };

    const auto nb = gen_synthetic(DistParams{NegBinParams{2.0, 0.4}}, 50, 1200, 4, seasonal);
    const auto tw = gen_synthetic(DistParams{TweedieParams{3.0, 1.0, 1.5}}, 50, 1200, 4, seasonal);
    REQUIRE(clearly_modulated(nb) >= 45);
    REQUIRE(clearly_modulated(tw) >= 45);
}
