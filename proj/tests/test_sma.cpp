#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/sma.hpp"

using stableq::aggregate_params;
using stableq::SmaModel;
using stableq::StableDist;
using stableq::StableParams;

namespace {
SmaModel sma1(double alpha, double beta0, double theta1,
              double gamma0 = 2.0, double delta0 = 1.0) {
    return SmaModel{{1.0, theta1}, StableParams{alpha, beta0, gamma0, delta0}};
}
}  // namespace

TEST_CASE("validation") {
    SmaModel bad{{0.5}, StableParams{1.5, 0.0, 1.0, 0.0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SmaModel one{{1.0}, StableParams{1.0, 0.3, 1.0, 0.0}};
    CHECK_THROWS_AS(aggregate_params(one), std::invalid_argument);  // alpha = 1 branch not built
    CHECK_NOTHROW(stableq::simulate(one, 16, 1u));                  // but simulation works
}

TEST_CASE("identity filter passes the innovation law through") {
    SmaModel m{{1.0}, StableParams{1.7, -0.3, 2.5, -1.0}};
    auto agg = aggregate_params(m);
    CHECK(agg.alpha == m.innovation.alpha);
    CHECK(agg.beta == doctest::Approx(m.innovation.beta).epsilon(1e-15));
    CHECK(agg.gamma == doctest::Approx(m.innovation.gamma).epsilon(1e-15));
    CHECK(agg.delta == doctest::Approx(m.innovation.delta).epsilon(1e-12));
}

TEST_CASE("aggregate gamma and delta reproduce the reference grid") {
    // gamma for theta1 = 0.4 by alpha row; delta by (alpha, beta0)
    struct Row { double alpha, beta0, gamma, delta; };
    const Row rows[] = {
        {1.2, 0.0, 2.541, 1.400}, {1.2, 0.2, 2.541, 1.559}, {1.2, 0.5, 2.541, 1.798},
        {1.5, 0.0, 2.325, 1.400}, {1.5, 0.2, 2.325, 1.495}, {1.5, 0.5, 2.325, 1.638},
        {1.8, 0.0, 2.205, 1.400}, {1.8, 0.2, 2.205, 1.439}, {1.8, 0.5, 2.205, 1.497},
    };
    for (const auto& r : rows) {
        auto agg = aggregate_params(sma1(r.alpha, r.beta0, 0.4));
        CAPTURE(r.alpha); CAPTURE(r.beta0);
        CHECK(std::abs(agg.gamma - r.gamma) < 1e-3);
        CHECK(std::abs(agg.delta - r.delta) < 1e-3);
        // theta1 = 0 columns: plain passthrough
        auto agg0 = aggregate_params(sma1(r.alpha, r.beta0, 0.0));
        CHECK(agg0.gamma == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(agg0.delta == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scale aggregation identity and zero-beta closure") {
    for (double a : {0.8, 1.3, 1.9}) {
        for (double th : {-0.7, 0.2, 1.5}) {
            SmaModel m{{1.0, th}, StableParams{a, 0.4, 1.5, 0.3}};
            auto agg = aggregate_params(m);
            double expect = std::pow(1.0 + std::pow(std::abs(th), a), 1.0 / a) * 1.5;
            CHECK(agg.gamma == doctest::Approx(expect).epsilon(1e-13));
            SmaModel sym{{1.0, th}, StableParams{a, 0.0, 1.5, 0.3}};
            CHECK(aggregate_params(sym).beta == 0.0);
        }
    }
}

TEST_CASE("negative theta flips the beta contribution") {
    auto plus = aggregate_params(sma1(1.5, 0.6, 0.4));
    auto minus = aggregate_params(sma1(1.5, 0.6, -0.4));
    CHECK(plus.gamma == doctest::Approx(minus.gamma).epsilon(1e-14));
    CHECK(plus.beta > minus.beta);
    double s = std::pow(0.4, 1.5);
    CHECK(minus.beta == doctest::Approx(0.6 * (1.0 - s) / (1.0 + s)).epsilon(1e-13));
}

TEST_CASE("degenerate filter simulation equals plain sampling") {
    SmaModel m{{1.0}, StableParams{1.3, 0.2, 2.0, 1.0}};
    auto xs = stableq::simulate(m, 512, 77u);
    auto ys = StableDist(m.innovation).sample(512, 77u);
    CHECK(xs == ys);
}

TEST_CASE("simulation determinism") {
    auto m = sma1(1.2, 0.2, 0.4);
    CHECK(stableq::simulate(m, 256, 5u) == stableq::simulate(m, 256, 5u));
    CHECK(stableq::simulate(m, 256, 5u) != stableq::simulate(m, 256, 6u));
}

TEST_CASE("simulated median matches the aggregate quantile") {
    auto m = sma1(1.2, 0.0, 0.4);
    auto agg = aggregate_params(m);
    auto xs = stableq::simulate(m, 1'000'000, 2024u);
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    double med = xs[xs.size() / 2];
    CHECK(std::abs(med - StableDist(agg).quantile(0.5)) < 0.01);
}

TEST_CASE("indicators are uncorrelated beyond lag q") {
    auto m = sma1(1.5, 0.2, 0.4);
    auto agg = aggregate_params(m);
    double med = StableDist(agg).quantile(0.5);
    const std::size_t n = 400'000;
    auto xs = stableq::simulate(m, n, 31u);
    const std::size_t lag = m.order() + 1;
    double joint = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t)
        joint += (xs[t] <= med && xs[t + lag] <= med) ? 1.0 : 0.0;
    joint /= static_cast<double>(n - lag);
    double se = std::sqrt(0.25 * 0.75 / static_cast<double>(n - lag)) + 0.25 / n;
    CHECK(std::abs(joint - 0.25) < 3.0 * se);
}

TEST_CASE("marginal law agreement (KS at 1e5)") {
    auto m = sma1(1.5, 0.5, 0.4);
    StableDist agg(aggregate_params(m));
    const std::size_t n = 100'000;
    auto xs = stableq::simulate(m, n, 99u);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    const std::size_t stride = 50;
    for (std::size_t i = 0; i < n; i += stride) {
        double f = agg.cdf(xs[i]);
        ks = std::max(ks, std::max(std::abs(f - static_cast<double>(i) / n),
                                   std::abs(static_cast<double>(i + 1) / n - f)));
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)) + static_cast<double>(stride) / n);
}
