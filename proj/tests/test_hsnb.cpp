#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "zerocast/heads.hpp"
#include "zerocast/rng.hpp"

using namespace zerocast;

namespace {

double hsnb_cdf_oracle(const HsnbParams& params, long long y) {
    double cum = 0.0;
    for (long long k = 0; k <= y; ++k) cum += std::exp(hsnb_logpmf(params, static_cast<double>(k)));
    return cum;
}

bool grad_close(double got, double want) {
    return std::abs(got - want) <= 1e-6 + 1e-4 * std::max(std::abs(got), std::abs(want));
}

} // namespace

TEST_CASE("hsnb pmf combines hurdle mass and shifted negbin", "[hsnb]") {
    HsnbParams params{0.5, 1.0, 0.5};
    REQUIRE_THAT(hsnb_logpmf(params, 0.0), Catch::Matchers::WithinAbs(std::log(0.5), 1e-14));
    REQUIRE_THAT(hsnb_logpmf(params, 1.0), Catch::Matchers::WithinAbs(std::log(0.25), 1e-13));
    for (int y = 1; y <= 10; ++y) {
        const double expect = std::log(0.5) + nb_logpmf(NegBinParams{1.0, 0.5}, y - 1.0);
        REQUIRE_THAT(hsnb_logpmf(params, y), Catch::Matchers::WithinAbs(expect, 1e-13));
    }

    SECTION("impossible observations return -inf sentinels") {
        REQUIRE(hsnb_logpmf(HsnbParams{1.0, 2.0, 0.4}, 0.0) == -kInf);
        REQUIRE(hsnb_logpmf(HsnbParams{0.0, 2.0, 0.4}, 3.0) == -kInf);
        REQUIRE(hsnb_logpmf(HsnbParams{0.0, 2.0, 0.4}, 0.0) == 0.0);
    }

    SECTION("support checks") {
        REQUIRE_THROWS_AS(hsnb_logpmf(params, 0.5), DomainError);
        REQUIRE_THROWS_AS(hsnb_logpmf(params, -2.0), DomainError);
    }

    SECTION("normalization by summation") {
        double total = 0.0;
        for (int y = 0; y <= 2000; ++y) total += std::exp(hsnb_logpmf(HsnbParams{0.6, 2.0, 0.4}, y));
        REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
}

TEST_CASE("hsnb closed-form moments match simulation of the gated shift", "[hsnb][oracle]") {
    HsnbParams params{0.6, 2.0, 0.4};
    // Independent simulation: Bernoulli gate times one plus a negbin draw.
    Rng rng(12345);
    const int n = 200000;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double y = 0.0;
        if (rng.bernoulli(params.pi)) y = 1.0 + static_cast<double>(nb_sample(NegBinParams{params.r, params.p}, rng));
        sum += y;
        sumsq += y * y;
    }
    const double m = sum / n;
    const double v = sumsq / n - m * m;

    const double m_z = 2.0 * 0.6 / 0.4;
    REQUIRE_THAT(hsnb_mean(params), Catch::Matchers::WithinRel(0.6 * (1.0 + m_z), 1e-14));
    const double se_mean = std::sqrt(hsnb_var(params) / n);
    REQUIRE_THAT(m, Catch::Matchers::WithinAbs(hsnb_mean(params), 4.0 * se_mean));
    REQUIRE_THAT(v, Catch::Matchers::WithinRel(hsnb_var(params), 0.05));

    SECTION("library sampler agrees with the same moments") {
        Rng rng2(54321);
        double s2 = 0.0;
        for (int i = 0; i < n; ++i) s2 += hsnb_sample(params, rng2);
        REQUIRE_THAT(s2 / n, Catch::Matchers::WithinAbs(hsnb_mean(params), 4.0 * se_mean));
    }
}

TEST_CASE("hsnb link and sampling edge cases", "[hsnb]") {
    const double z0[3] = {0.0, 0.0, 0.0};
    const auto p = std::get<HsnbParams>(link(HeadKind::hsnb, z0));
    REQUIRE_THAT(p.pi, Catch::Matchers::WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(p.r, Catch::Matchers::WithinAbs(std::log(2.0), 1e-15));
    REQUIRE_THAT(p.p, Catch::Matchers::WithinAbs(0.5, 1e-15));

    Rng rng(3);
    HsnbParams gate_closed{0.0, 2.0, 0.4};
    for (int i = 0; i < 1000; ++i) REQUIRE(hsnb_sample(gate_closed, rng) == 0.0);
    HsnbParams gate_open{1.0, 2.0, 0.4};
    for (int i = 0; i < 1000; ++i) REQUIRE(hsnb_sample(gate_open, rng) >= 1.0);
}

TEST_CASE("hsnb nll gradient matches central finite differences", "[hsnb][oracle]") {
    Rng rng(777);
    int checked = 0;
    while (checked < 250) {
        const double z[3] = {rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
        const double log_s = rng.uniform(std::log(0.2), std::log(5.0));
        const auto params = std::get<HsnbParams>(link(HeadKind::hsnb, z));
        const double y = hsnb_sample(params, rng);
        if (y > 500) continue;

        double dz[3];
        const double nll = grad_nll(HeadKind::hsnb, z, y, log_s, dz);
        REQUIRE(std::isfinite(nll));

        const double h = 1e-5;
        for (int k = 0; k < 3; ++k) {
            double zp[3] = {z[0], z[1], z[2]};
            double zm[3] = {z[0], z[1], z[2]};
            zp[k] += h;
            zm[k] -= h;
            double tmp[3];
            const double fd = (grad_nll(HeadKind::hsnb, zp, y, log_s, tmp) -
                               grad_nll(HeadKind::hsnb, zm, y, log_s, tmp)) / (2.0 * h);
            INFO("k=" << k << " y=" << y);
            REQUIRE(grad_close(dz[k], fd));
        }
        ++checked;
    }
}

TEST_CASE("hsnb quantile accumulates the hurdle mass first", "[hsnb]") {
    HsnbParams sparse{0.3, 2.0, 0.4};
    REQUIRE(hsnb_cdf_oracle(sparse, 0) >= 0.5);
    REQUIRE(quantile(DistParams{sparse}, 0.5) == 0.0);

    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        HsnbParams p{rng.uniform(0.2, 0.95), std::exp(rng.uniform(-1.0, 2.0)), rng.uniform(0.15, 0.9)};
        const double q = rng.uniform(0.05, 0.99);
        const long long yq = static_cast<long long>(quantile(DistParams{p}, q));
        REQUIRE(hsnb_cdf_oracle(p, yq) >= q);
        if (yq > 0) REQUIRE(hsnb_cdf_oracle(p, yq - 1) < q);
    }
}

TEST_CASE("hsnb scaling shifts only the embedded negbin", "[hsnb]") {
    Rng rng(53);
    for (int i = 0; i < 200; ++i) {
        HsnbParams params{rng.uniform(0.05, 0.95), std::exp(rng.uniform(-1.0, 2.0)), rng.uniform(0.1, 0.9)};
        const double s = rng.uniform(0.1, 50.0);
        const auto scaled = std::get<HsnbParams>(scale_params(DistParams{params}, s));

        REQUIRE(scaled.pi == params.pi);
        REQUIRE(scaled.r == params.r);

        // The gate and the unit shift are scale-invariant, so the exact
        // identity concerns the excess over the occurrence probability.
        const double excess = hsnb_mean(params) - params.pi;
        const double scaled_excess = hsnb_mean(scaled) - params.pi;
        REQUIRE_THAT(scaled_excess, Catch::Matchers::WithinRel(s * excess, 1e-12));

        const double e_logit = (1.0 - params.p) / params.p;
        REQUIRE_THAT(hsnb_mean(scaled),
                     Catch::Matchers::WithinRel(params.pi * (1.0 + s * params.r * e_logit), 1e-12));
    }
}
