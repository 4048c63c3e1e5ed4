#include "stable.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quad.hpp"

namespace stableq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphaNudge = 1e-4;
// Standardized distance from zeta below which the series expansion around
// x = zeta replaces the integral (the integrand develops a boundary layer).
constexpr double kZetaTol = 1e-7;

double sq(double x) { return x * x; }

// Tail coefficient: P(Z > z) ~ c_tail(a) * (1 + b) * z^-a for a < 2.
double tail_coeff(double a) {
    return std::sin(kPi * a / 2.0) * std::tgamma(a) / kPi;
}

// Standardized S0(a, b) core quantities for one tail orientation.
// Reflection z -> -z, b -> -b handles the other side.
struct Core {
    double a;
    double b;
    double zeta;           // -b tan(pi a / 2)
    double theta0;         // atan(b tan(pi a / 2)) / a
    double a_theta0;       // a * theta0
    double ln_cos_a_theta0;

    static Core make(double a, double b) {
        Core c;
        c.a = a;
        c.b = b;
        double t = std::tan(kPi * a / 2.0);
        c.zeta = -b * t;
        c.a_theta0 = std::atan(b * t);
        c.theta0 = c.a_theta0 / a;
        c.ln_cos_a_theta0 = std::log(std::cos(c.a_theta0));
        return c;
    }
};

// log V(theta) of the Nolan integral representation, a != 1.
double log_v(const Core& c, double theta) {
    const double r = c.a / (c.a - 1.0);
    double cos_t = std::cos(theta);
    double sin_at = std::sin(c.a * (c.theta0 + theta));
    double cos_shift = std::cos(c.a_theta0 + (c.a - 1.0) * theta);
    // Roundoff can push the boundary-zero factors fractionally negative.
    sin_at = std::max(sin_at, std::numeric_limits<double>::min());
    cos_shift = std::max(cos_shift, std::numeric_limits<double>::min());
    cos_t = std::max(cos_t, std::numeric_limits<double>::min());
    return c.ln_cos_a_theta0 / (c.a - 1.0) + r * (std::log(cos_t) - std::log(sin_at)) +
           std::log(cos_shift) - std::log(cos_t);
}

// log V(theta) for the a == 1, b != 0 branch.
double log_v1(double b, double theta) {
    double cos_t = std::max(std::cos(theta), std::numeric_limits<double>::min());
    double u = kPi / 2.0 + b * theta;  // > 0 for |b| <= 1 on the open interval
    u = std::max(u, std::numeric_limits<double>::min());
    return std::log(2.0 / (kPi * cos_t)) + std::log(u) + (u / b) * std::tan(theta);
}

// Integrates exp(-g) (distribution) or g exp(-g) (density) over (lo, hi),
// where log g is monotone in theta. The integrand only departs from its
// limiting values inside the layer where log g crosses [-20, 20]; that layer
// can be arbitrarily narrow far in the tails, so its edges and the g = 1
// point are located by bisection and used as explicit breakpoints.
template <class LogG>
double integrate_exp(const LogG& lng, double lo, double hi, bool density,
                     const char* what) {
    auto integrand = [&](double th) {
        double lg = lng(th);
        if (lg > 700.0) return 0.0;
        double g = std::exp(lg);
        return density ? std::exp(lg - g) : std::exp(-g);
    };
    const double pad = (hi - lo) * 1e-12;
    const double l = lo + pad, h = hi - pad;
    const double fl = lng(l), fh = lng(h);
    double pts[5];
    int npts = 0;
    pts[npts++] = lo;
    for (double level : {-20.0, 0.0, 20.0}) {
        double a = fl - level, b = fh - level;
        if (std::isfinite(a) && std::isfinite(b) && (a < 0.0) != (b < 0.0))
            pts[npts++] = bisect_monotone([&](double th) { return lng(th) - level; }, l, h);
    }
    pts[npts++] = hi;
    if (fl > fh) std::reverse(pts + 1, pts + npts - 1);
    double total = 0.0;
    for (int i = 0; i + 1 < npts; ++i)
        total += integrate_de(integrand, pts[i], pts[i + 1], 0.5e-10, 1e-8, what);
    return total;
}

// Density of standardized S0(a, b) at z >= zeta, a != 1.
double std_pdf_pos(const Core& c, double z) {
    double t = z - c.zeta;
    if (t < kZetaTol * (1.0 + std::abs(c.zeta))) {
        return std::tgamma(1.0 + 1.0 / c.a) * std::cos(c.theta0) /
               (kPi * std::pow(1.0 + sq(c.zeta), 0.5 / c.a));
    }
    const double r = c.a / (c.a - 1.0);
    const double ln_t = std::log(t);
    auto lng = [&](double th) { return r * ln_t + log_v(c, th); };
    double integral = integrate_exp(lng, -c.theta0, kPi / 2.0, true, "stable pdf");
    return std::max(0.0, c.a / (kPi * std::abs(c.a - 1.0) * t) * integral);
}

// Distribution function of standardized S0(a, b) at z >= zeta, a != 1.
double std_cdf_pos(const Core& c, double z) {
    double t = z - c.zeta;
    double f_at_zeta = 0.5 - c.theta0 / kPi;
    if (t < kZetaTol * (1.0 + std::abs(c.zeta)))
        return f_at_zeta + t * std_pdf_pos(c, c.zeta);
    const double r = c.a / (c.a - 1.0);
    const double ln_t = std::log(t);
    auto lng = [&](double th) { return r * ln_t + log_v(c, th); };
    double integral = integrate_exp(lng, -c.theta0, kPi / 2.0, false, "stable cdf");
    if (c.a > 1.0) return 1.0 - integral / kPi;
    return f_at_zeta + integral / kPi;
}

// a == 1, b > 0 branch; z unrestricted.
double std_pdf_one(double b, double z) {
    double ln_ze = -kPi * z / (2.0 * b);
    auto lng = [&](double th) { return ln_ze + log_v1(b, th); };
    double integral = integrate_exp(lng, -kPi / 2.0, kPi / 2.0, true, "stable pdf (alpha=1)");
    return std::max(0.0, integral / (2.0 * std::abs(b)));
}

double std_cdf_one(double b, double z) {
    double ln_ze = -kPi * z / (2.0 * b);
    auto lng = [&](double th) { return ln_ze + log_v1(b, th); };
    double integral = integrate_exp(lng, -kPi / 2.0, kPi / 2.0, false, "stable cdf (alpha=1)");
    return std::clamp(integral / kPi, 0.0, 1.0);
}

}  // namespace

void StableParams::validate() const {
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw std::invalid_argument("stable: alpha must be in (0, 2]");
    if (!(beta >= -1.0) || !(beta <= 1.0))
        throw std::invalid_argument("stable: beta must be in [-1, 1]");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("stable: gamma must be positive and finite");
    if (!std::isfinite(delta))
        throw std::invalid_argument("stable: delta must be finite");
}

StableDist::StableDist(StableParams p) : params_(p) {
    params_.validate();
    double da = params_.alpha - 1.0;
    if (da != 0.0 && std::abs(da) < kAlphaNudge) {
        params_.alpha = da > 0.0 ? 1.0 + kAlphaNudge : 1.0 - kAlphaNudge;
        nudged_ = true;
    }
    if (params_.alpha == 2.0)
        kind_ = Kind::gaussian;
    else if (params_.alpha == 1.0 && params_.beta == 0.0)
        kind_ = Kind::cauchy;
    else if (params_.alpha == 1.0)
        kind_ = Kind::alpha_one;
    else
        kind_ = Kind::general;
    // Switch point where first-order series error drops below ~1e-9 absolute.
    tail_cut_ = std::pow(3e10, 0.5 / params_.alpha);
}

double StableDist::std_pdf(double z) const {
    const double a = params_.alpha, b = params_.beta;
    switch (kind_) {
        case Kind::gaussian:
            return std::exp(-0.25 * sq(z)) / (2.0 * std::sqrt(kPi));
        case Kind::cauchy:
            return 1.0 / (kPi * (1.0 + sq(z)));
        case Kind::alpha_one: {
            double zz = b > 0.0 ? z : -z;
            double bb = std::abs(b);
            if (zz > tail_cut_) return (1.0 + bb) / kPi * 1.0 / sq(zz);
            if (zz < -tail_cut_) return std::max(0.0, (1.0 - bb) / kPi / sq(zz));
            return std_pdf_one(bb, zz);
        }
        case Kind::general:
        default: {
            double zeta = -b * std::tan(kPi * a / 2.0);
            bool reflect = z < zeta;
            Core c = Core::make(a, reflect ? -b : b);
            double zz = reflect ? -z : z;
            double t = zz - c.zeta;
            if (t > tail_cut_)
                return std::max(0.0, a * tail_coeff(a) * (1.0 + c.b) *
                                         std::pow(t, -a - 1.0));
            return std_pdf_pos(c, zz);
        }
    }
}

double StableDist::std_cdf(double z) const {
    const double a = params_.alpha, b = params_.beta;
    switch (kind_) {
        case Kind::gaussian:
            return 0.5 * std::erfc(-0.5 * z);
        case Kind::cauchy:
            return 0.5 + std::atan(z) / kPi;
        case Kind::alpha_one: {
            double zz = b > 0.0 ? z : -z;
            double bb = std::abs(b);
            double lower;
            if (zz > tail_cut_)
                lower = 1.0 - (1.0 + bb) / (kPi * zz);
            else if (zz < -tail_cut_)
                lower = (1.0 - bb) / (kPi * -zz);
            else
                lower = std_cdf_one(bb, zz);
            return b > 0.0 ? lower : 1.0 - lower;
        }
        case Kind::general:
        default: {
            double zeta = -b * std::tan(kPi * a / 2.0);
            bool reflect = z < zeta;
            Core c = Core::make(a, reflect ? -b : b);
            double zz = reflect ? -z : z;
            double t = zz - c.zeta;
            double lower;
            if (t > tail_cut_)
                lower = 1.0 - tail_coeff(a) * (1.0 + c.b) * std::pow(t, -a);
            else
                lower = std_cdf_pos(c, zz);
            lower = std::clamp(lower, 0.0, 1.0);
            return reflect ? 1.0 - lower : lower;
        }
    }
}

double StableDist::std_quantile(double p) const {
    switch (kind_) {
        case Kind::gaussian:
            return 2.0 * boost::math::erf_inv(2.0 * p - 1.0);
        case Kind::cauchy:
            return std::tan(kPi * (p - 0.5));
        default:
            break;
    }
    // Bracketed root find on the cdf; seed from a Cauchy/Gaussian blend.
    const double a = params_.alpha;
    double qc = std::tan(kPi * (p - 0.5));
    double guess;
    if (a >= 1.0) {
        double qg = 2.0 * boost::math::erf_inv(2.0 * p - 1.0);
        guess = (2.0 - a) * qc + (a - 1.0) * qg;
    } else {
        guess = (qc >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(qc), 1.0 / a);
    }
    double step = 1.0 + 0.25 * std::abs(guess);
    double lo = guess - step, hi = guess + step;
    for (int i = 0; i < 200 && std_cdf(lo) > p; ++i) {
        hi = lo;
        step *= 2.0;
        lo -= step;
    }
    for (int i = 0; i < 200 && std_cdf(hi) < p; ++i) {
        lo = std::max(lo, hi);
        step *= 2.0;
        hi += step;
    }
    if (!(std_cdf(lo) <= p && std_cdf(hi) >= p))
        throw NumericError("stable quantile: bracketing failed", std::abs(hi - lo));
    auto f = [&](double x) { return std_cdf(x) - p; };
    boost::math::tools::eps_tolerance<double> tol(47);
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

double StableDist::pdf(double x) const {
    return std_pdf((x - params_.delta) / params_.gamma) / params_.gamma;
}

double StableDist::cdf(double x) const {
    return std_cdf((x - params_.delta) / params_.gamma);
}

double StableDist::quantile(double p) const {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("stable quantile: p must be in (0, 1)");
    return params_.delta + params_.gamma * std_quantile(p);
}

double StableDist::std_draw(double theta, double w) const {
    const double a = params_.alpha, b = params_.beta;
    if (params_.alpha == 1.0) {
        double u = kPi / 2.0 + b * theta;
        return (2.0 / kPi) *
               (u * std::tan(theta) -
                b * std::log((kPi / 2.0) * w * std::cos(theta) / u));
    }
    double bt = b * std::tan(kPi * a / 2.0);
    double ath0 = std::atan(bt);
    double th0 = ath0 / a;
    double z1 = std::sin(a * (th0 + theta)) *
                std::pow(std::cos(ath0) * std::cos(theta), -1.0 / a) *
                std::pow(std::cos(ath0 + (a - 1.0) * theta) / w, (1.0 - a) / a);
    return z1 - bt;
}

double StableDist::draw(SplitMix64& rng) const {
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    double theta = kPi * (u1 - 0.5);
    double w = -std::log(u2);
    return params_.delta + params_.gamma * std_draw(theta, w);
}

void StableDist::sample(std::span<double> out, SplitMix64& rng) const {
    for (double& x : out) x = draw(rng);
}

std::vector<double> StableDist::sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw std::invalid_argument("stable sample: n must be >= 1");
    std::vector<double> out(n);
    SplitMix64 rng(seed);
    sample(std::span<double>(out), rng);
    return out;
}

}  // namespace stableq
