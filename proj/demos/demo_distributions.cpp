// Console tour of the three predictive distributions: linked parameters,
// closed-form moments, quantiles, and the per-series scale transform.

#include <array>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <string>

#include "zerocast/forecast.hpp"
#include "zerocast/heads.hpp"

using namespace zerocast;

namespace {

void print_moments(const std::string& label, const DistParams& params) {
    std::cout << "  " << std::left << std::setw(26) << label << " mean " << std::setw(9)
              << dist_mean(params) << " variance " << std::setw(9) << dist_var(params)
              << " quantiles";
    for (double q : kQuantileLevels) {
        std::cout << " " << quantile(params, q);
    }
    std::cout << "\n";
}

void print_pmf_head(const DistParams& params, int upto) {
    std::cout << "  y:   ";
    for (int y = 0; y <= upto; ++y) std::cout << std::setw(7) << y;
    std::cout << "\n  pmf: ";
    for (int y = 0; y <= upto; ++y) {
        std::cout << std::setw(7) << std::setprecision(3) << std::exp(log_density(params, y));
    }
    std::cout << std::setprecision(6) << "\n";
}

} // namespace

int main() {
    std::cout << std::setprecision(6);

    std::cout << "negative binomial, overdispersed counts\n";
    const DistParams nb{NegBinParams{0.75, 0.2}};
    print_moments("negbin(r=0.75, p=0.2)", nb);
    print_pmf_head(nb, 8);

    std::cout << "\nhurdle-shifted negative binomial, a zero gate in front of 1+size\n";
    const DistParams hs{HsnbParams{0.3, 2.0, 0.4}};
    print_moments("hsnb(pi=0.3, r=2, p=0.4)", hs);
    print_pmf_head(hs, 8);

    std::cout << "\ntweedie, point mass at zero plus a continuous positive branch\n";
    const DistParams tw{TweedieParams{2.0, 1.0, 1.5}};
    print_moments("tweedie(mu=2, phi=1)", tw);
    std::cout << "  P(Y=0) = " << std::exp(log_density(tw, 0.0)) << ", density at 1.0 = "
              << std::exp(log_density(tw, 1.0)) << "\n";

    std::cout << "\nthe link layer maps unconstrained head outputs to parameters\n";
    const std::array<double, 3> z{0.4, -0.2, 1.1};
    const auto linked = std::get<HsnbParams>(link(HeadKind::hsnb, z.data()));
    std::cout << "  z = (0.4, -0.2, 1.1) -> hsnb(pi=" << linked.pi << ", r=" << linked.r
              << ", p=" << linked.p << ")\n";

    std::cout << "\nscaling by s multiplies the negbin mean and the hsnb excess over pi\n";
    for (double s : {0.5, 2.0, 10.0}) {
        const DistParams scaled = scale_params(nb, s);
        std::cout << "  s=" << std::setw(4) << s << " negbin mean " << std::setw(9)
                  << dist_mean(scaled) << " variance " << dist_var(scaled) << "\n";
    }

    std::cout << "\nsampling agrees with the closed forms\n";
    for (const auto& [label, params] :
         {std::pair<std::string, DistParams>{"negbin", nb}, {"hsnb", hs}, {"tweedie", tw}}) {
        const auto draws = sample(params, 200000, 17);
        double acc = 0.0;
        for (double v : draws) acc += v;
        std::cout << "  " << std::setw(8) << label << " sample mean " << acc / draws.size()
                  << " vs " << dist_mean(params) << "\n";
    }
    return 0;
}
