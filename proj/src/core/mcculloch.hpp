#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "quantile_cov.hpp"
#include "spline.hpp"
#include "stable.hpp"

namespace stableq {

/// The two quantile-ratio statistics; both are invariant to affine maps of
/// the quantile values with positive scale, so they depend on (alpha, beta)
/// only.
struct VStats {
    double v_alpha;  // (xi_.95 - xi_.05) / (xi_.75 - xi_.25)
    double v_beta;   // (xi_.95 + xi_.05 - 2 xi_.50) / (xi_.95 - xi_.05)
};

/// Requires the five McCulloch levels and strictly spread quantiles.
VStats v_stats(const QuantileSet& q);

struct InversionResult {
    double alpha;
    double beta;
    bool alpha_clamped = false;  // hit the table boundary in alpha
    bool beta_clamped = false;   // |v_beta| beyond the table, beta at +/-1
};

/// Point estimates with diagnostics.
struct EstimationResult {
    StableParams params;
    QuantileSet quantiles_used;
    bool alpha_clamped = false;
    bool beta_clamped = false;
    std::optional<Eigen::MatrixXd> covariance;  // 4x4 asymptotic, when attached
};

/// Tables of phi1/phi2 over an (alpha, beta) grid with spline inversion.
/// beta < 0 is handled by the mirror symmetry (v_beta -> -v_beta), so grids
/// cover beta >= 0 only. Near alpha = 2 (>= 1.95) evaluation switches to
/// bilinear interpolation, where the spline surface is unreliable.
class LookupTables {
public:
    struct BuildOptions {
        /// Check round-trip interpolation error < 1e-3 at a subset of cell
        /// midpoints after building.
        bool verify_interpolation = true;
    };

    static std::vector<double> default_alpha_grid();
    static std::vector<double> default_beta_grid();

    /// Computes phi at every node from the stable quantile engine.
    /// Monotonicity (phi1 strictly decreasing in alpha, phi2 strictly
    /// increasing in beta away from alpha = 2) is verified; a violation
    /// aborts the build since it signals a quantile-accuracy failure.
    static LookupTables build(std::vector<double> alpha_grid,
                              std::vector<double> beta_grid,
                              const BuildOptions& options);
    static LookupTables build(std::vector<double> alpha_grid,
                              std::vector<double> beta_grid) {
        return build(std::move(alpha_grid), std::move(beta_grid), BuildOptions());
    }
    static LookupTables build_default(const BuildOptions& options);
    static LookupTables build_default() { return build_default(BuildOptions()); }

    /// Versioned flat CSV, bit-identical across rebuilds of the same grid.
    void save(const std::string& path) const;
    static LookupTables load(const std::string& path);

    /// Interpolated (v_alpha, v_beta) at (alpha, beta); beta may be negative.
    VStats phi(double alpha, double beta) const;

    /// Inverse map psi: 2-D Newton on the spline surfaces with a nested
    /// bisection fallback. Out-of-range v statistics clamp to the table
    /// boundary and set the corresponding flag.
    InversionResult invert(double v_alpha, double v_beta) const;

    const std::vector<double>& alpha_grid() const { return phi1_.xs(); }
    const std::vector<double>& beta_grid() const { return phi1_.ys(); }
    const std::vector<double>& phi1_values() const { return phi1_.values(); }
    const std::vector<double>& phi2_values() const { return phi2_.values(); }

private:
    LookupTables(GridSurface phi1, GridSurface phi2)
        : phi1_(std::move(phi1)), phi2_(std::move(phi2)) {}

    double eval(const GridSurface& s, double alpha, double beta, double* da = nullptr,
                double* db = nullptr) const;

    GridSurface phi1_;
    GridSurface phi2_;
};

/// Full quantile-based estimate: alpha/beta by table inversion, then gamma
/// and delta from the standardized quantiles of the estimated law
/// (pure scale/location in the S0 parameterisation).
EstimationResult estimate_params(const QuantileSet& q, const LookupTables& tables);

}  // namespace stableq
