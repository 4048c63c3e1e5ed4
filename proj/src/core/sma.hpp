#pragma once

#include <cstdint>
#include <vector>

#include "stable.hpp"

namespace stableq {

/// Moving-average process of order q driven by iid stable innovations:
///   X_t = sum_{j=0..q} theta_j eps_{t-j},   theta_0 = 1.
struct SmaModel {
    std::vector<double> theta{1.0};  // theta_0 .. theta_q
    StableParams innovation;

    std::size_t order() const noexcept { return theta.size() - 1; }

    /// Throws std::invalid_argument unless theta_0 == 1, all theta finite
    /// and the innovation parameters are valid.
    void validate() const;
};

/// Marginal stable law of X_t from the S0 closure rules:
///   gamma^alpha = gamma0^alpha sum |theta_j|^alpha
///   beta = beta0 sum sign(theta_j)|theta_j|^alpha / sum |theta_j|^alpha
///   delta = delta0 sum theta_j + tan(pi alpha/2) (beta gamma - beta0 gamma0 sum theta_j)
/// The alpha = 1 aggregation branch (log-correction terms) is not built;
/// such models are rejected here while simulate() still works.
StableParams aggregate_params(const SmaModel& model);

/// Simulates n observations. Exactly q extra innovations are consumed as
/// burn-in so X_1 is already stationary. Deterministic given the seed.
std::vector<double> simulate(const SmaModel& model, std::size_t n, std::uint64_t seed);

}  // namespace stableq
