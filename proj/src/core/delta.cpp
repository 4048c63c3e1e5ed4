#include "delta.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace stableq {

namespace {

std::array<double, 4> as_array(const EstimationResult& e) {
    return {e.params.alpha, e.params.beta, e.params.gamma, e.params.delta};
}

}  // namespace

Jacobian numeric_jacobian(const QuantileSet& q, const LookupTables& tables,
                          double c_divisor) {
    if (!(c_divisor > 0.0)) throw std::invalid_argument("jacobian: C must be positive");
    q.validate();
    const double dxi = (q.values[3] - q.values[1]) / c_divisor;
    if (!(dxi > 0.0)) throw std::invalid_argument("jacobian: degenerate quantile spacing");

    // The 10 perturbed evaluations are independent; run them in parallel.
    std::array<EstimationResult, 10> perturbed;
    parallel_for(10, [&](std::size_t idx) {
        std::size_t level = idx / 2;
        double sign = idx % 2 == 0 ? 1.0 : -1.0;
        QuantileSet p = q;
        p.values[level] += sign * dxi;
        for (std::size_t i = 0; i + 1 < p.values.size(); ++i)
            if (p.values[i] > p.values[i + 1])
                throw std::invalid_argument(
                    "jacobian: perturbed quantile set is non-monotone (degenerate "
                    "spacing for the chosen C)");
        perturbed[idx] = estimate_params(p, tables);
    });

    Jacobian out;
    out.perturbation = dxi;
    out.c_divisor = c_divisor;
    EstimationResult center;  // computed lazily, only clamped columns need it
    bool have_center = false;
    for (std::size_t level = 0; level < 5; ++level) {
        const EstimationResult& plus = perturbed[2 * level];
        const EstimationResult& minus = perturbed[2 * level + 1];
        auto hi = as_array(plus);
        auto lo = as_array(minus);
        double width = 2.0 * dxi;
        if (plus.alpha_clamped != minus.alpha_clamped) {
            if (!have_center) {
                center = estimate_params(q, tables);
                have_center = true;
            }
            // replace the clamped side by the centre point
            if (plus.alpha_clamped)
                hi = as_array(center);
            else
                lo = as_array(center);
            width = dxi;
            out.one_sided = true;
        }
        for (std::size_t r = 0; r < 4; ++r)
            out.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(level)) =
                (hi[r] - lo[r]) / width;
    }
    return out;
}

Eigen::MatrixXd param_covariance(const Jacobian& jacobian, const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != 5 || sigma.cols() != 5)
        throw std::invalid_argument("param_covariance: Sigma must be 5x5");
    Eigen::MatrixXd cov = jacobian.entries * sigma * jacobian.entries.transpose();
    cov = 0.5 * (cov + cov.transpose());
    return enforce_psd(std::move(cov));
}

}  // namespace stableq
