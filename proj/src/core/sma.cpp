#include "sma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stableq {

void SmaModel::validate() const {
    innovation.validate();
    if (theta.empty() || theta.front() != 1.0)
        throw std::invalid_argument("sma: theta_0 must be exactly 1");
    for (double t : theta)
        if (!std::isfinite(t)) throw std::invalid_argument("sma: theta must be finite");
}

StableParams aggregate_params(const SmaModel& model) {
    model.validate();
    const StableParams& e = model.innovation;
    const double a = e.alpha;
    if (a == 1.0)
        throw std::invalid_argument(
            "sma: aggregate law at alpha = 1 is not supported (log-correction "
            "terms not implemented)");
    double sum_abs = 0.0;    // sum |theta_j|^alpha
    double sum_signed = 0.0; // sum sign(theta_j) |theta_j|^alpha
    double sum_theta = 0.0;
    for (double t : model.theta) {
        double p = std::pow(std::abs(t), a);
        sum_abs += p;
        sum_signed += t >= 0.0 ? p : -p;
        sum_theta += t;
    }
    StableParams out;
    out.alpha = a;
    out.gamma = e.gamma * std::pow(sum_abs, 1.0 / a);
    out.beta = e.beta * sum_signed / sum_abs;
    out.delta = e.delta * sum_theta +
                std::tan(std::numbers::pi * a / 2.0) *
                    (out.beta * out.gamma - e.beta * e.gamma * sum_theta);
    out.validate();
    return out;
}

std::vector<double> simulate(const SmaModel& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    if (n == 0) throw std::invalid_argument("sma: n must be >= 1");
    const std::size_t q = model.order();
    StableDist innov(model.innovation);
    std::vector<double> eps(n + q);
    SplitMix64 rng(seed);
    innov.sample(eps, rng);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= q; ++j) acc += model.theta[j] * eps[t + q - j];
        x[t] = acc;
    }
    return x;
}

}  // namespace stableq
