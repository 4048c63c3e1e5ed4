#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "delta.hpp"
#include "mcculloch.hpp"
#include "sma.hpp"

namespace stableq {

/// Analytic asymptotic pipeline: quantile covariance of the five McCulloch
/// levels under the aggregate law, then the delta method.
struct AsymptoticResult {
    Eigen::MatrixXd sigma5;  // 5x5 quantile-level covariance
    Eigen::MatrixXd cov4;    // 4x4 parameter-level covariance
    Jacobian jacobian;
};

/// For q <= 1 the G_h terms are evaluated by quadrature; for higher order a
/// long simulated path of `empirical_length` observations estimates them.
AsymptoticResult asymptotic_covariance(const SmaModel& model, const LookupTables& tables,
                                       double c_divisor = 400.0,
                                       std::size_t empirical_length = 1'000'000,
                                       std::uint64_t empirical_seed = 0x5EBD
                                       );

struct SimulationConfig {
    SmaModel model;
    std::size_t realisations = 2000;
    std::size_t length = 720;
    std::uint64_t seed = 1;
    double c_divisor = 400.0;
    bool keep_estimates = false;  // retain the per-realisation estimates

    void validate() const;
};

struct ParamSummary {
    double true_value = 0.0;
    double mean = 0.0;
    double sd = 0.0;           // NaN when realisations == 1
    double n_variance = 0.0;   // sample variance times the series length
    double asymptotic_variance = 0.0;
};

struct SimulationReport {
    StableParams aggregate;                  // true marginal law
    std::array<ParamSummary, 4> params;      // alpha, beta, gamma, delta
    double alpha_clamp_rate = 0.0;
    double beta_clamp_rate = 0.0;
    std::size_t realisations = 0;
    std::size_t length = 0;
    std::vector<std::array<double, 4>> estimates;  // when keep_estimates
};

/// Simulate -> empirical quantiles -> estimate, fanned out over a worker
/// pool with per-realisation derived seeds; the aggregation is a fixed-order
/// reduction, so the report depends only on (config, tables).
SimulationReport run_study(const SimulationConfig& config, const LookupTables& tables);

}  // namespace stableq
