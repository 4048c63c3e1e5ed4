#pragma once

// Test-only oracles, kept independent of the library's evaluation path.
// The density/distribution oracle inverts the S0 characteristic function by
// direct quadrature on a fine (adaptive) grid; the library instead integrates
// the Nolan single-integral representation.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace oracles {

inline constexpr double kPi = std::numbers::pi;

// Phase of the standardized S0 characteristic function at frequency u > 0
// when multiplied by e^{-iuz}, sign-flipped so cos/sin below read naturally.
inline double cf_phase(double alpha, double beta, double z, double u) {
    if (alpha == 1.0)
        return z * u + beta * (2.0 / kPi) * u * std::log(u);
    double ua = std::pow(u, alpha);
    return z * u + beta * std::tan(kPi * alpha / 2.0) * (u - ua);
}

// Density of standardized S0(alpha, beta) by characteristic-function
// inversion: (1/pi) Int_0^inf e^{-u^a} cos(phase) du. For alpha < 1 the
// phase derivative blows up at u = 0, so integrate in v = u^alpha there.
inline double cf_pdf(double alpha, double beta, double z) {
    if (alpha >= 1.0) {
        auto f = [&](double u) {
            return std::exp(-std::pow(u, alpha)) * std::cos(cf_phase(alpha, beta, z, u));
        };
        const double upper = std::pow(42.0, 1.0 / alpha);
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                   f, 0.0, upper, 22, 1e-12) /
               kPi;
    }
    auto f = [&](double v) {
        double u = std::pow(v, 1.0 / alpha);
        return std::exp(-v) * std::cos(cf_phase(alpha, beta, z, u)) * u /
               (alpha * v);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
               f, 1e-300, 42.0, 22, 1e-12) /
           kPi;
}

// Distribution function by the Gil-Pelaez inversion formula.
inline double cf_cdf(double alpha, double beta, double z) {
    if (alpha >= 1.0) {
        auto f = [&](double u) {
            return std::exp(-std::pow(u, alpha)) * std::sin(cf_phase(alpha, beta, z, u)) / u;
        };
        const double upper = std::pow(42.0, 1.0 / alpha);
        return 0.5 + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                         f, 1e-300, upper, 22, 1e-12) /
                         kPi;
    }
    auto f = [&](double v) {
        double u = std::pow(v, 1.0 / alpha);
        return std::exp(-v) * std::sin(cf_phase(alpha, beta, z, u)) / (alpha * v);
    };
    return 0.5 + boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                     f, 1e-300, 42.0, 22, 1e-12) /
                     kPi;
}

}  // namespace oracles
