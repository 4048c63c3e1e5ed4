#include "study.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"

namespace stableq {

AsymptoticResult asymptotic_covariance(const SmaModel& model, const LookupTables& tables,
                                       double c_divisor, std::size_t empirical_length,
                                       std::uint64_t empirical_seed) {
    model.validate();
    AsymptoticResult out;
    if (model.order() <= 1) {
        out.sigma5 = sigma_quantiles(model, mcculloch_levels());
    } else {
        auto path = simulate(model, empirical_length, empirical_seed);
        out.sigma5 = sigma_quantiles_empirical(model, mcculloch_levels(), path);
    }
    StableDist aggregate(aggregate_params(model));
    QuantileSet q = population_quantiles(aggregate, mcculloch_levels());
    out.jacobian = numeric_jacobian(q, tables, c_divisor);
    out.cov4 = param_covariance(out.jacobian, out.sigma5);
    return out;
}

void SimulationConfig::validate() const {
    model.validate();
    if (realisations < 1) throw std::invalid_argument("study: realisations must be >= 1");
    if (length <= 2 * model.order())
        throw std::invalid_argument("study: length must exceed twice the MA order");
}

SimulationReport run_study(const SimulationConfig& config, const LookupTables& tables) {
    config.validate();
    const std::size_t r = config.realisations;

    std::vector<std::array<double, 4>> estimates(r);
    std::vector<unsigned char> aclamp(r, 0), bclamp(r, 0);
    parallel_for(r, [&](std::size_t i) {
        std::uint64_t seed_i = derive_stream_seed(config.seed, i);
        auto xs = simulate(config.model, config.length, seed_i);
        QuantileSet q = empirical_quantiles(xs, mcculloch_levels());
        EstimationResult est = estimate_params(q, tables);
        estimates[i] = {est.params.alpha, est.params.beta, est.params.gamma,
                        est.params.delta};
        aclamp[i] = est.alpha_clamped ? 1 : 0;
        bclamp[i] = est.beta_clamped ? 1 : 0;
    });

    AsymptoticResult asym =
        asymptotic_covariance(config.model, tables, config.c_divisor);

    SimulationReport report;
    report.aggregate = aggregate_params(config.model);
    report.realisations = r;
    report.length = config.length;
    const double truth[4] = {report.aggregate.alpha, report.aggregate.beta,
                             report.aggregate.gamma, report.aggregate.delta};
    for (std::size_t p = 0; p < 4; ++p) {
        double mean = 0.0;
        for (const auto& e : estimates) mean += e[p];
        mean /= static_cast<double>(r);
        double var = std::numeric_limits<double>::quiet_NaN();
        if (r > 1) {
            double acc = 0.0;
            for (const auto& e : estimates) acc += (e[p] - mean) * (e[p] - mean);
            var = acc / static_cast<double>(r - 1);
        }
        ParamSummary& s = report.params[p];
        s.true_value = truth[p];
        s.mean = mean;
        s.sd = std::sqrt(var);
        s.n_variance = var * static_cast<double>(config.length);
        s.asymptotic_variance = asym.cov4(static_cast<Eigen::Index>(p),
                                          static_cast<Eigen::Index>(p));
    }
    double ac = 0.0, bc = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        ac += aclamp[i];
        bc += bclamp[i];
    }
    report.alpha_clamp_rate = ac / static_cast<double>(r);
    report.beta_clamp_rate = bc / static_cast<double>(r);
    if (config.keep_estimates) report.estimates = std::move(estimates);
    return report;
}

}  // namespace stableq
