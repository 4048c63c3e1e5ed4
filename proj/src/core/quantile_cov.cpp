#include "quantile_cov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "quad.hpp"

namespace stableq {

namespace {

const std::array<double, 5> kMccullochLevels = {0.05, 0.25, 0.50, 0.75, 0.95};

// Mass left outside [L, R] when truncating the G_1 integral; the discarded
// contribution is bounded by it and corrected with a midpoint term.
constexpr double kTailMass = 1e-11;

}  // namespace

namespace detail {

// Spline-backed cdf/pdf of one stable law on a sinh-stretched grid, accurate
// to ~1e-9 inside the covered range with exact fallback outside. Amortizes
// the quadrature cost across the many integrand evaluations of the G_1
// entries; immutable after construction and shared across worker threads.
class FastStable {
public:
    explicit FastStable(const StableDist& dist, std::size_t knots = 3001)
        : dist_(dist),
          gamma_(dist.params().gamma),
          delta_(dist.params().delta) {
        double lo = dist.quantile(1e-11), hi = dist.quantile(1.0 - 1e-11);
        tmax_ = 1.05 * std::max(std::asinh((hi - delta_) / gamma_),
                                std::asinh((delta_ - lo) / gamma_));
        std::vector<double> ts(knots), cs(knots), ps(knots);
        for (std::size_t i = 0; i < knots; ++i) {
            ts[i] = -tmax_ + 2.0 * tmax_ * static_cast<double>(i) /
                                 static_cast<double>(knots - 1);
            double x = delta_ + gamma_ * std::sinh(ts[i]);
            cs[i] = dist.cdf(x);
            ps[i] = dist.pdf(x);
        }
        cdf_ = CubicSpline(ts, cs);
        pdf_ = CubicSpline(ts, ps);
    }

    double cdf(double x) const {
        double t = std::asinh((x - delta_) / gamma_);
        if (std::abs(t) > tmax_) return dist_.cdf(x);
        return std::clamp(cdf_(t), 0.0, 1.0);
    }

    double pdf(double x) const {
        double t = std::asinh((x - delta_) / gamma_);
        if (std::abs(t) > tmax_) return dist_.pdf(x);
        return std::max(pdf_(t), 0.0);
    }

    double quantile(double p) const { return dist_.quantile(p); }
    const StableParams& params() const { return dist_.params(); }

private:
    const StableDist& dist_;
    double gamma_, delta_, tmax_ = 0.0;
    CubicSpline cdf_, pdf_;
};

}  // namespace detail

void QuantileSet::validate() const {
    if (levels.empty() || levels.size() != values.size())
        throw std::invalid_argument("quantile set: levels/values size mismatch");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0) || !(levels[i] < 1.0))
            throw std::invalid_argument("quantile set: levels must be in (0, 1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw std::invalid_argument("quantile set: levels must be strictly increasing");
        if (i > 0 && values[i] < values[i - 1])
            throw std::invalid_argument("quantile set: values must be nondecreasing");
        if (!std::isfinite(values[i]))
            throw std::invalid_argument("quantile set: values must be finite");
    }
}

std::span<const double> mcculloch_levels() { return kMccullochLevels; }

QuantileSet empirical_quantiles(std::span<const double> series,
                                std::span<const double> levels) {
    if (series.empty()) throw std::invalid_argument("empirical quantiles: empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    QuantileSet out;
    out.kind = QuantileSet::Kind::empirical;
    out.levels.assign(levels.begin(), levels.end());
    out.values.reserve(levels.size());
    const double n = static_cast<double>(sorted.size());
    for (double p : levels) {
        auto k = static_cast<std::size_t>(std::ceil(n * p - 1e-9));
        k = std::clamp<std::size_t>(k, 1, sorted.size());
        out.values.push_back(sorted[k - 1]);
    }
    out.validate();
    return out;
}

QuantileSet population_quantiles(const StableDist& dist,
                                 std::span<const double> levels) {
    QuantileSet out;
    out.kind = QuantileSet::Kind::population;
    out.levels.assign(levels.begin(), levels.end());
    out.values.reserve(levels.size());
    for (double p : levels) out.values.push_back(dist.quantile(p));
    out.validate();
    return out;
}

double g0(double p_i, double p_j) {
    if (!(p_i > 0.0 && p_i < 1.0 && p_j > 0.0 && p_j < 1.0))
        throw std::invalid_argument("g0: levels must be in (0, 1)");
    return std::min(p_i, p_j);
}

namespace {

template <class Dist>
double g1_impl(const Dist& innovation, double theta1, double xi_i, double xi_j) {
    if (theta1 == 0.0)
        throw std::invalid_argument(
            "g1: theta1 = 0 is the independent case; use p_i * p_j");
    auto first = [&](double u) {
        double F = innovation.cdf((xi_i - u) / theta1);
        return theta1 > 0.0 ? F : 1.0 - F;
    };
    auto integrand = [&](double u) {
        return first(u) * innovation.cdf(xi_j - theta1 * u) * innovation.pdf(u);
    };

    const double L = innovation.quantile(kTailMass);
    const double R = innovation.quantile(1.0 - kTailMass);
    // Breakpoints where either distribution factor sweeps through its body;
    // the windows keep near-step factors (tiny |theta1|) resolvable.
    const StableParams& e = innovation.params();
    double spread = innovation.quantile(0.9999) - innovation.quantile(0.0001);
    double u1 = xi_i - theta1 * e.delta;
    double w1 = std::abs(theta1) * spread;
    double u2 = (xi_j - e.delta) / theta1;
    double w2 = spread / std::abs(theta1);
    std::vector<double> pts{L, R, e.delta};
    for (double c : {u1 - w1, u1, u1 + w1, u2 - w2, u2, u2 + w2})
        if (c > L && c < R) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate_de(integrand, pts[i], pts[i + 1], 1e-9, 1e-7, "g1", 1e-9);
    // Truncated tails: factors are monotone there, midpoint value bounds the
    // error by the discarded mass.
    total += kTailMass * first(L) * innovation.cdf(xi_j - theta1 * L);
    total += kTailMass * first(R) * innovation.cdf(xi_j - theta1 * R);
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double g1_analytic(const StableDist& innovation, double theta1, double xi_i,
                   double xi_j) {
    return g1_impl(innovation, theta1, xi_i, xi_j);
}

double g_h_empirical(std::span<const double> series, double xi_i, double xi_j,
                     long h) {
    const long n = static_cast<long>(series.size());
    if (n == 0) throw std::invalid_argument("g_h: empty series");
    if (std::abs(h) >= n) throw std::invalid_argument("g_h: |h| must be < n");
    if (h < 0) return g_h_empirical(series, xi_j, xi_i, -h);
    long count = 0;
    for (long t = 0; t + h < n; ++t)
        if (series[t] <= xi_i && series[t + h] <= xi_j) ++count;
    return static_cast<double>(count) / static_cast<double>(n - h);
}

Eigen::MatrixXd enforce_psd(Eigen::MatrixXd m, double clip_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    double min_ev = eig.eigenvalues().minCoeff();
    if (min_ev >= 0.0) return m;
    if (min_ev < -clip_tol)
        throw NumericError("covariance matrix is not positive semidefinite", -min_ev);
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

// Shared assembly: numerator(i, j) must return sum_h (G_h - p_i p_j).
template <class Numerator>
Eigen::MatrixXd assemble_sigma(const SmaModel& model,
                               std::span<const double> levels,
                               const Numerator& numerator) {
    StableDist aggregate(aggregate_params(model));
    QuantileSet xi = population_quantiles(aggregate, levels);
    const auto k = static_cast<Eigen::Index>(levels.size());
    std::vector<double> dens(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        dens[i] = aggregate.pdf(xi.values[i]);

    // Upper triangle entries are independent; symmetry of the numerator is
    // structural (g0 symmetric, the h = +/-1 pair swaps arguments).
    std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) entries.emplace_back(i, j);

    Eigen::MatrixXd sigma(k, k);
    parallel_for(entries.size(), [&](std::size_t e) {
        auto [i, j] = entries[e];
        double num = numerator(xi, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        double value = num / (dens[i] * dens[j]);
        sigma(i, j) = value;
        sigma(j, i) = value;
    });
    return enforce_psd(std::move(sigma));
}

}  // namespace

Eigen::MatrixXd sigma_quantiles(const SmaModel& model,
                                std::span<const double> levels) {
    model.validate();
    const std::size_t q = model.order();
    if (q > 1)
        throw std::invalid_argument(
            "sigma_quantiles: analytic G_h is built for q <= 1 only; use the "
            "empirical mode with a simulated sample");
    StableDist innovation(model.innovation);
    double theta1 = q == 1 ? model.theta[1] : 0.0;
    // The G_1 quadrature evaluates the innovation cdf thousands of times per
    // entry; a spline cache brings that to interpolation cost.
    std::optional<detail::FastStable> fast;
    if (q == 1 && theta1 != 0.0) fast.emplace(innovation);
    return assemble_sigma(
        model, levels, [&](const QuantileSet& xi, std::size_t i, std::size_t j) {
            double pi = xi.levels[i], pj = xi.levels[j];
            double num = g0(pi, pj) - pi * pj;
            if (fast) {
                num += g1_impl(*fast, theta1, xi.values[i], xi.values[j]) - pi * pj;
                num += g1_impl(*fast, theta1, xi.values[j], xi.values[i]) - pi * pj;
            }
            return num;
        });
}

Eigen::MatrixXd sigma_quantiles_empirical(const SmaModel& model,
                                          std::span<const double> levels,
                                          std::span<const double> series) {
    model.validate();
    const long q = static_cast<long>(model.order());
    if (series.size() <= model.order())
        throw std::invalid_argument("sigma_quantiles: series shorter than the MA order");
    return assemble_sigma(
        model, levels, [&](const QuantileSet& xi, std::size_t i, std::size_t j) {
            double pi = xi.levels[i], pj = xi.levels[j];
            double num = 0.0;
            for (long h = -q; h <= q; ++h)
                num += g_h_empirical(series, xi.values[i], xi.values[j], h) - pi * pj;
            return num;
        });
}

}  // namespace stableq
