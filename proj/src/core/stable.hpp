#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"

namespace stableq {

/// Parameters of an alpha-stable law in the S0 parameterisation, in which
/// gamma and delta act as pure scale and location for every alpha.
/// alpha = 2 is Gaussian with mean delta and variance 2*gamma^2;
/// alpha = 1, beta = 0 is Cauchy.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double gamma = 1.0;
    double delta = 0.0;

    /// Throws std::invalid_argument unless
    /// 0 < alpha <= 2, |beta| <= 1, gamma > 0 and delta is finite.
    void validate() const;
};

/// Numerical engine for one stable law: density, distribution function,
/// quantile and random variate generation. Immutable after construction,
/// safe to use from concurrent threads.
///
/// Density and distribution function use single-integral representations in
/// the S0 parameterisation evaluated by adaptive Gauss-Kronrod quadrature
/// (absolute tolerance 1e-10, relative 1e-8), switching to the first-order
/// tail series far enough out that the two forms agree to about 1e-9.
/// Accuracy is supported for alpha in [0.5, 2]; smaller alpha is accepted
/// but without accuracy claims.
///
/// Inputs with 0 < |alpha - 1| < 1e-4 are nudged to alpha = 1 -/+ 1e-4: the
/// alpha != 1 integrand suffers catastrophic cancellation that close to the
/// branch point. alpha == 1 exactly uses the dedicated branch.
class StableDist {
public:
    explicit StableDist(StableParams p);

    const StableParams& params() const noexcept { return params_; }
    bool alpha_nudged() const noexcept { return nudged_; }

    double pdf(double x) const;
    double cdf(double x) const;

    /// Inverse of cdf on (0, 1); bracketed root find (TOMS 748).
    double quantile(double p) const;

    /// Chambers-Mallows-Stuck variates, S0-shifted. One uniform pair is
    /// consumed per variate, so output depends only on the rng stream.
    double draw(SplitMix64& rng) const;
    void sample(std::span<double> out, SplitMix64& rng) const;
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

private:
    enum class Kind { gaussian, cauchy, alpha_one, general };

    StableParams params_;
    Kind kind_;
    bool nudged_ = false;
    double tail_cut_ = 0.0;  // standardized |z - zeta| beyond which the series is used

    double std_pdf(double z) const;
    double std_cdf(double z) const;
    double std_quantile(double p) const;
    double std_draw(double theta, double w) const;
};

}  // namespace stableq
