#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stableq {

/// Natural cubic spline on non-uniform knots. Linear extrapolation with the
/// boundary slope outside the knot range.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::span<const double> x, std::span<const double> y) {
        if (x.size() != y.size() || x.size() < 2)
            throw std::invalid_argument("spline: need at least two knots");
        x_.assign(x.begin(), x.end());
        y_.assign(y.begin(), y.end());
        const std::size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n == 2) return;
        // Thomas algorithm for the natural second-derivative system.
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = x_[i] - x_[i - 1];
            double h1 = x_[i + 1] - x_[i];
            if (!(h0 > 0.0) || !(h1 > 0.0))
                throw std::invalid_argument("spline: knots must be strictly increasing");
            double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for (std::size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
    }

    double operator()(double x) const { return eval(x, nullptr); }

    double derivative(double x) const {
        double dy = 0.0;
        eval(x, &dy);
        return dy;
    }

private:
    double eval(double x, double* dy) const {
        const std::size_t n = x_.size();
        std::size_t i = interval(x);
        double h = x_[i + 1] - x_[i];
        if ((x < x_.front()) || (x > x_.back())) {
            // linear continuation with the end slope
            std::size_t e = x < x_.front() ? 0 : n - 2;
            double he = x_[e + 1] - x_[e];
            double edge = x < x_.front() ? x_.front() : x_.back();
            double slope = (y_[e + 1] - y_[e]) / he -
                           (x < x_.front() ? he / 6.0 * (2.0 * m_[e] + m_[e + 1])
                                           : -he / 6.0 * (m_[e] + 2.0 * m_[e + 1]));
            double base = x < x_.front() ? y_.front() : y_.back();
            if (dy) *dy = slope;
            return base + slope * (x - edge);
        }
        double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
        double value = a * y_[i] + b * y_[i + 1] +
                       ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
        if (dy)
            *dy = (y_[i + 1] - y_[i]) / h +
                  ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
        return value;
    }

    std::size_t interval(double x) const {
        std::size_t lo = 0, hi = x_.size() - 1;
        if (x <= x_.front()) return 0;
        if (x >= x_.back()) return x_.size() - 2;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> x_, y_, m_;
};

/// Tensor-product interpolation surface on a rectangular grid, cubic-spline
/// based with an optional bilinear evaluation path.
class GridSurface {
public:
    GridSurface() = default;

    GridSurface(std::vector<double> xs, std::vector<double> ys,
                std::vector<double> z_row_major)
        : xs_(std::move(xs)), ys_(std::move(ys)), z_(std::move(z_row_major)) {
        if (z_.size() != xs_.size() * ys_.size())
            throw std::invalid_argument("surface: grid/value size mismatch");
        rows_.reserve(xs_.size());
        for (std::size_t i = 0; i < xs_.size(); ++i)
            rows_.emplace_back(std::span<const double>(ys_),
                               std::span<const double>(z_).subspan(i * ys_.size(), ys_.size()));
    }

    /// Spline value, and optionally the gradient, at (x, y).
    double spline(double x, double y, double* dx = nullptr, double* dy = nullptr) const {
        std::vector<double> col(xs_.size());
        for (std::size_t i = 0; i < xs_.size(); ++i) col[i] = rows_[i](y);
        CubicSpline along_x(xs_, col);
        if (dy) {
            for (std::size_t i = 0; i < xs_.size(); ++i) col[i] = rows_[i].derivative(y);
            *dy = CubicSpline(xs_, col)(x);
        }
        if (dx) *dx = along_x.derivative(x);
        return along_x(x);
    }

    double bilinear(double x, double y) const {
        std::size_t i = cell(xs_, x), j = cell(ys_, y);
        double tx = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
        double ty = (y - ys_[j]) / (ys_[j + 1] - ys_[j]);
        tx = std::clamp(tx, 0.0, 1.0);
        ty = std::clamp(ty, 0.0, 1.0);
        double z00 = at(i, j), z01 = at(i, j + 1), z10 = at(i + 1, j), z11 = at(i + 1, j + 1);
        return (1 - tx) * ((1 - ty) * z00 + ty * z01) + tx * ((1 - ty) * z10 + ty * z11);
    }

    double at(std::size_t i, std::size_t j) const { return z_[i * ys_.size() + j]; }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    const std::vector<double>& values() const { return z_; }

private:
    static std::size_t cell(const std::vector<double>& g, double v) {
        std::size_t lo = 0, hi = g.size() - 1;
        if (v <= g.front()) return 0;
        if (v >= g.back()) return g.size() - 2;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (g[mid] <= v ? lo : hi) = mid;
        }
        return lo;
    }

    std::vector<double> xs_, ys_, z_;
    std::vector<CubicSpline> rows_;
};

}  // namespace stableq
