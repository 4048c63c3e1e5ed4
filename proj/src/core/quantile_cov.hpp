#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "sma.hpp"
#include "stable.hpp"

namespace stableq {

/// Probability levels paired with the corresponding quantile values.
struct QuantileSet {
    enum class Kind { population, empirical };

    std::vector<double> levels;  // strictly increasing, in (0, 1)
    std::vector<double> values;  // nondecreasing
    Kind kind = Kind::population;

    std::size_t size() const noexcept { return levels.size(); }
    void validate() const;
};

/// The five McCulloch levels (0.05, 0.25, 0.50, 0.75, 0.95).
std::span<const double> mcculloch_levels();

/// Empirical quantiles: value at level p is the ceil(n p)-th order statistic,
/// the generalized inverse of the empirical distribution function.
QuantileSet empirical_quantiles(std::span<const double> series,
                                std::span<const double> levels);

/// Population quantiles of a stable law at the given levels.
QuantileSet population_quantiles(const StableDist& dist,
                                 std::span<const double> levels);

/// Lag-0 joint probability P(X <= xi_i, X <= xi_j) expressed in levels:
/// min(p_i, p_j).
double g0(double p_i, double p_j);

/// Lag-1 joint probability G_1(xi_i, xi_j) of an SMA(1) process by
/// quadrature over the innovation law:
///   Int F((xi_i - u)/theta_1) F(xi_j - theta_1 u) f(u) du    (theta_1 > 0)
/// with the first factor becoming a survival term for theta_1 < 0.
/// G_{-1}(xi_i, xi_j) is G_1(xi_j, xi_i) by reflection.
double g1_analytic(const StableDist& innovation, double theta1, double xi_i,
                   double xi_j);

/// Empirical estimator of G_h from a sample: (n-|h|)^-1 times the count of
/// t with x_t <= xi_i and x_{t+h} <= xi_j; negative h by reflection.
double g_h_empirical(std::span<const double> series, double xi_i, double xi_j,
                     long h);

/// Symmetric PSD repair: eigenvalues in (-clip_tol, 0) caused by quadrature
/// noise are clipped to zero; anything more negative is an error.
Eigen::MatrixXd enforce_psd(Eigen::MatrixXd m, double clip_tol = 1e-8);

/// Asymptotic covariance of the empirical quantiles at the given levels for
/// an SMA(q) process:
///   sigma_ij = sum_{h=-q..q} (G_h(xi_i, xi_j) - p_i p_j) / (f(xi_i) f(xi_j))
/// with xi and f from the aggregate marginal law. Analytic G_h requires
/// q <= 1; for higher order supply a sample (empirical mode), which only
/// replaces the G_h estimates, never the densities.
Eigen::MatrixXd sigma_quantiles(const SmaModel& model,
                                std::span<const double> levels);
Eigen::MatrixXd sigma_quantiles_empirical(const SmaModel& model,
                                          std::span<const double> levels,
                                          std::span<const double> series);

}  // namespace stableq
