#pragma once

#include <Eigen/Dense>

#include "mcculloch.hpp"
#include "quantile_cov.hpp"

namespace stableq {

/// Central-difference Jacobian of (alpha, beta, gamma, delta) with respect
/// to the five McCulloch quantiles. Every perturbed evaluation re-runs the
/// full estimation pipeline, so the gamma and delta rows include the
/// dependence through (alpha, beta).
struct Jacobian {
    Eigen::Matrix<double, 4, 5> entries;
    double perturbation = 0.0;  // Delta xi actually used
    double c_divisor = 0.0;
    bool one_sided = false;  // a clamped side was replaced by a one-sided difference
};

/// Delta xi = (xi_.75 - xi_.25) / C, the same perturbation for all levels.
/// When one side of a central difference triggers an alpha clamp at the
/// table boundary, the difference for that column switches to the one-sided
/// form away from the clamp.
Jacobian numeric_jacobian(const QuantileSet& q, const LookupTables& tables,
                          double c_divisor = 400.0);

/// J Sigma_M J', eigenvalue-clipped to PSD like the quantile covariance.
Eigen::MatrixXd param_covariance(const Jacobian& jacobian, const Eigen::MatrixXd& sigma);

}  // namespace stableq
