#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <string>

#include "errors.hpp"

namespace stableq {

/// Adaptive Gauss-Kronrod (15 point) on a finite interval. Throws
/// NumericError when the error estimate misses both tolerance targets.
template <class F>
double integrate(const F& f, double lo, double hi, double abs_tol, double rel_tol,
                 const char* what, int max_depth = 22) {
    if (!(lo < hi)) return 0.0;
    double err = 0.0;
    // Ask for more than the acceptance thresholds; the estimate is conservative.
    double inner_tol = std::min(rel_tol * 1e-2, 1e-11);
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, lo, hi, max_depth, inner_tol, &err);
    if (err > abs_tol && err > rel_tol * std::abs(value))
        throw NumericError(std::string(what) + ": quadrature did not converge", err);
    return value;
}

/// Double-exponential quadrature on a finite interval; robust to endpoint
/// derivative singularities, which the stable-density integrands have.
template <class F>
double integrate_de(const F& f, double lo, double hi, double abs_tol, double rel_tol,
                    const char* what) {
    if (!(lo < hi)) return 0.0;
    const double width = hi - lo;
    if (width < 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)))
        return f(0.5 * (lo + hi)) * width;
    static thread_local boost::math::quadrature::tanh_sinh<double> quadrature(13);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    // Integrate on [0, 1]: tanh_sinh computes abscissas near a "small" left
    // endpoint in complement form, which keeps deep refinement exact.
    auto g = [&](double s) { return f(lo + width * s); };
    double value = width * quadrature.integrate(g, 0.0, 1.0, 1e-10, &err, &l1, &levels);
    // err is the relative error estimate of the last refinement
    if (err * std::abs(value) > abs_tol && err > rel_tol)
        throw NumericError(std::string(what) + ": quadrature did not converge",
                           err * std::abs(value));
    return value;
}

/// Root of a monotone continuous function on [lo, hi] by bisection.
/// Assumes f(lo) and f(hi) have opposite signs (caller checks).
template <class F>
double bisect_monotone(const F& f, double lo, double hi, int iters = 48) {
    double flo = f(lo);
    for (int i = 0; i < iters && hi - lo > 1e-11 * (1.0 + std::abs(lo)); ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace stableq
