//==============================================================================
// spline.hpp
// Natural cubic spline on a uniform abscissa. Used to evaluate the ground
// state and its derivative at off-grid arguments (pair energies, kernels).
//==============================================================================
#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "fgm/errors.hpp"

namespace fgm {

class CubicSpline {
  public:
    CubicSpline() = default;

    // uniform nodes x0 + i*dx, i = 0..m-1; natural end conditions
    CubicSpline(double x0, double dx, std::vector<double> y) : x0_(x0), dx_(dx), y_(std::move(y)) {
        const std::size_t m = y_.size();
        if (m < 4) throw invalid_input("CubicSpline: need at least 4 nodes");
        m2_.assign(m, 0.0);
        // M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2, M_0 = M_{m-1} = 0
        std::vector<double> c(m, 0.0);
        double beta = 4.0;
        m2_[1] = 6.0 * (y_[2] - 2.0 * y_[1] + y_[0]) / (dx_ * dx_) / beta;
        for (std::size_t i = 2; i + 1 < m; ++i) {
            c[i] = 1.0 / beta;
            beta = 4.0 - c[i];
            const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
            m2_[i] = (rhs - m2_[i - 1]) / beta;
        }
        for (std::size_t i = m - 3; i >= 1; --i) {
            m2_[i] -= c[i + 1] * m2_[i + 1];
            if (i == 1) break;
        }
    }

    double min_x() const { return x0_; }
    double max_x() const { return x0_ + dx_ * static_cast<double>(y_.size() - 1); }

    double eval(double x) const {
        const auto [i, t] = locate(x);
        const double h = dx_;
        const double u = 1.0 - t;
        return u * y_[i] + t * y_[i + 1] +
               h * h / 6.0 * ((u * u * u - u) * m2_[i] + (t * t * t - t) * m2_[i + 1]);
    }

    double derivative(double x) const {
        const auto [i, t] = locate(x);
        const double h = dx_;
        const double u = 1.0 - t;
        return (y_[i + 1] - y_[i]) / h +
               h / 6.0 * ((3.0 * t * t - 1.0) * m2_[i + 1] - (3.0 * u * u - 1.0) * m2_[i]);
    }

  private:
    std::pair<std::size_t, double> locate(double x) const {
        if (x < x0_ || x > max_x())
            throw domain_error("CubicSpline: argument outside node range");
        double r = (x - x0_) / dx_;
        auto i = static_cast<std::size_t>(r);
        if (i >= y_.size() - 1) i = y_.size() - 2;
        return {i, r - static_cast<double>(i)};
    }

    double x0_ = 0, dx_ = 1;
    std::vector<double> y_;
    std::vector<double> m2_; // second derivatives at nodes
};

} // namespace fgm
