//==============================================================================
// spectral.hpp
// Fourier-multiplier calculus on periodic grids: the fractional Laplacian,
// resolvents of (-Delta)^s + m, spectral derivative and shift, L2 inner
// products, and log-log decay fits. Wavenumbers are xi_j = pi j / L on the
// half spectrum; the zero mode of |xi|^{2s} is exactly 0 (no regularization).
//
// Real-field discipline: all real multipliers act on the r2c half spectrum,
// so conjugate symmetry is structural. The only complex multiplier is the
// shift; its Nyquist bin is mapped with cos(xi_N q), the unique choice that
// keeps a real field real.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "fgm/fft.hpp"
#include "fgm/grid.hpp"

namespace fgm {

namespace detail {

// apply a real multiplier mult(xi_j) bin-wise
inline Field apply_real_multiplier(const Field& f, const std::function<double(double)>& mult,
                                   const char* who) {
    f.require_finite(who);
    const std::size_t n = f.grid.n;
    RealFft fft(n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(f.values.data(), sp.data());
    for (std::size_t j = 0; j < sp.size(); ++j) sp[j] *= mult(f.grid.xi(j));
    Field out(f.grid);
    fft.backward(sp.data(), out.values.data());
    return out;
}

} // namespace detail

// (-Delta)^s f via the multiplier |xi|^(2s); the xi = 0 mode maps to 0.
inline Field fractional_laplacian(const Field& f, double s) {
    if (!(s > 0.0 && s < 1.0))
        throw invalid_parameter_error("fractional_laplacian: s must lie in (0,1)");
    return detail::apply_real_multiplier(
        f, [s](double xi) { return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), 2.0 * s); },
        "fractional_laplacian");
}

// ((-Delta)^s + m)^{-1} f via 1/(|xi|^(2s) + m), m > 0.
inline Field resolvent(const Field& f, double s, double m) {
    if (!(s > 0.0 && s < 1.0))
        throw invalid_parameter_error("resolvent: s must lie in (0,1)");
    if (!(m > 0.0))
        throw invalid_parameter_error("resolvent: m must be positive (multiplier singular at xi=0)");
    return detail::apply_real_multiplier(
        f, [s, m](double xi) { return 1.0 / (std::pow(std::abs(xi), 2.0 * s) + m); }, "resolvent");
}

// d/dx by i*xi; the Nyquist bin is zeroed (odd multiplier has no real
// counterpart there).
inline Field spectral_derivative(const Field& f) {
    f.require_finite("spectral_derivative");
    const std::size_t n = f.grid.n;
    RealFft fft(n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(f.values.data(), sp.data());
    for (std::size_t j = 0; j + 1 < sp.size(); ++j)
        sp[j] *= std::complex<double>(0.0, f.grid.xi(j));
    sp.back() = 0.0;
    Field out(f.grid);
    fft.backward(sp.data(), out.values.data());
    return out;
}

// f(x - q) by the phase e^{-i xi q}; Nyquist handled with cos(xi_N q).
inline Field spectral_shift(const Field& f, double q) {
    f.require_finite("spectral_shift");
    const std::size_t n = f.grid.n;
    RealFft fft(n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(f.values.data(), sp.data());
    for (std::size_t j = 0; j + 1 < sp.size(); ++j) {
        const double ph = -f.grid.xi(j) * q;
        sp[j] *= std::complex<double>(std::cos(ph), std::sin(ph));
    }
    sp.back() *= std::cos(f.grid.xi(n / 2) * q);
    Field out(f.grid);
    fft.backward(sp.data(), out.values.data());
    return out;
}

// rectangle rule h * sum f g (exact trapezoid on a periodic grid)
inline double inner_product(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner_product");
    double acc = 0;
    for (std::size_t j = 0; j < f.grid.n; ++j) acc += f.values[j] * g.values[j];
    return acc * f.grid.spacing();
}

inline double integral(const Field& f) {
    double acc = 0;
    for (double v : f.values) acc += v;
    return acc * f.grid.spacing();
}

inline double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

// pointwise helpers
inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b, "Field::operator+");
    Field r = a;
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += b[j];
    return r;
}
inline Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b, "Field::operator-");
    Field r = a;
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= b[j];
    return r;
}
inline Field operator*(double c, const Field& a) {
    Field r = a;
    for (auto& v : r.values) v *= c;
    return r;
}
inline Field pointwise(const Field& a, const Field& b) {
    require_same_grid(a, b, "pointwise");
    Field r = a;
    for (std::size_t j = 0; j < r.size(); ++j) r[j] *= b[j];
    return r;
}
inline Field squared(const Field& a) { return pointwise(a, a); }

struct DecayFit {
    double exponent = 0;    // p in f ~ coefficient * x^{-p}
    double coefficient = 0;
    std::size_t samples = 0;
};

// least squares of log f against log x on [x_lo, x_hi] (x > 0 side of the grid)
inline DecayFit fit_decay_exponent(const Field& f, double x_lo, double x_hi) {
    if (!(0 < x_lo && x_lo < x_hi && x_hi < f.grid.half_length))
        throw fit_domain_error("fit_decay_exponent: window must satisfy 0 < x_lo < x_hi < L");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t j = 0; j < f.grid.n; ++j) {
        const double x = f.grid.x(j);
        if (x < x_lo || x > x_hi) continue;
        if (!(f.values[j] > 0))
            throw fit_domain_error("fit_decay_exponent: non-positive sample inside window");
        const double lx = std::log(x), ly = std::log(f.values[j]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    if (m < 4) throw fit_domain_error("fit_decay_exponent: fewer than 4 samples in window");
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / static_cast<double>(m);
    return DecayFit{-slope, std::exp(inter), m};
}

// same fit for point samples (used by the Green far field)
inline DecayFit fit_decay_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t m = xs.size();
    if (m < 4 || ys.size() != m) throw fit_domain_error("fit_decay_exponent: need >= 4 samples");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(xs[i] > 0 && ys[i] > 0))
            throw fit_domain_error("fit_decay_exponent: non-positive sample");
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / static_cast<double>(m);
    return DecayFit{-slope, std::exp(inter), m};
}

} // namespace fgm
