//==============================================================================
// ground_state.hpp
// The ground state U of (-Delta)^s U + U - U^2 = 0 on the periodic grid:
//   * Petviashvili iteration with stabilizing exponent 2 for the quadratic
//     nonlinearity, even-symmetrized every step, followed by
//   * a spectral Newton polish on the fixed-point form u = K(u^2),
//     K = ((-Delta)^s + 1)^{-1}, solved matrix-free with GMRES.
// Also: the kernel direction U', direct convolution quadratures used by the
// interaction asymptotics, and a spline + algebraic-tail evaluator for U at
// arbitrary arguments.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fgm/gmres.hpp"
#include "fgm/grid.hpp"
#include "fgm/spectral.hpp"
#include "fgm/spline.hpp"

namespace fgm {

struct GroundStateOptions {
    int max_petviashvili = 4000;
    int max_newton = 12;
    double petviashvili_tol = 1e-13;  // sup change per step
    double residual_target = 1e-11;   // sup norm of the equation residual
    double init_peak = 1.5;           // sech^2 seed amplitude
};

struct GroundState {
    Field field;       // U
    double s = 0;
    double mass_u2 = 0;
    double mass_u3 = 0;
    double tail_coeff = 0;     // prefactor of the free log-log tail fit
    double tail_exponent = 0;  // fitted decay rate (should be near 1+2s)
    double peak = 0;
    double residual = 0;       // sup |(-Delta)^s U + U - U^2|
    double petviashvili_mult = 1.0; // M at the last fixed-point step
    int iterations = 0;

    // spline of U and U' on [0, x_max] with blending into the algebraic tail
    std::shared_ptr<const CubicSpline> spline_u;
    std::shared_ptr<const CubicSpline> spline_du;
    double splice_lo = 0, splice_hi = 0;

    // U(|r|): spline inside, tail_coeff * |r|^{-(1+2s)} outside, smooth blend
    double eval(double r) const {
        r = std::abs(r);
        if (r <= splice_lo) return spline_u->eval(r);
        const double tail = tail_coeff * std::pow(r, -(1.0 + 2.0 * s));
        if (r >= splice_hi) return tail;
        const double w = blend((r - splice_lo) / (splice_hi - splice_lo));
        return (1.0 - w) * spline_u->eval(r) + w * tail;
    }
    // dU/dr at signed r (odd function)
    double eval_derivative(double r) const {
        const double sg = r < 0 ? -1.0 : 1.0;
        r = std::abs(r);
        if (r <= splice_lo) return sg * spline_du->eval(r);
        const double e = 1.0 + 2.0 * s;
        const double tail = -e * tail_coeff * std::pow(r, -e - 1.0);
        if (r >= splice_hi) return sg * tail;
        const double t = (r - splice_lo) / (splice_hi - splice_lo);
        const double w = blend(t);
        const double dw = dblend(t) / (splice_hi - splice_lo);
        const double su = spline_u->eval(r);
        const double tl = tail_coeff * std::pow(r, -e);
        return sg * ((1.0 - w) * spline_du->eval(r) + w * tail + dw * (tl - su));
    }

  private:
    static double blend(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
    static double dblend(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
};

namespace detail {

inline Field ground_residual(const Field& u, double s) {
    Field r = fractional_laplacian(u, s) + u - squared(u);
    return r;
}

} // namespace detail

inline GroundState solve_ground_state(double s, const Grid1D& grid,
                                      const GroundStateOptions& opts = {}) {
    if (!(s > 0.0 && s < 1.0))
        throw invalid_parameter_error("solve_ground_state: s must lie in (0,1)");

    Field u(grid);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double c = std::cosh(std::min(std::abs(x), 600.0) * 0.5);
        u[j] = opts.init_peak / (c * c);
    }
    if (u.at_x(grid.half_length) > 1e-4 || u.at_x(-grid.half_length) > 1e-4)
        throw invalid_parameter_error("solve_ground_state: seed does not decay at the boundary");

    GroundState gs;
    gs.s = s;

    // Petviashvili with gamma = 2
    double M = 1.0;
    int it = 0;
    std::vector<double> history;
    for (; it < opts.max_petviashvili; ++it) {
        Field lu = fractional_laplacian(u, s) + u;
        const double num = inner_product(u, lu);
        const double den = inner_product(squared(u), u);
        if (!(den > 0) || !std::isfinite(num))
            throw convergence_error("solve_ground_state: Petviashvili collapse after " +
                                    std::to_string(it) + " steps (last sup " +
                                    std::to_string(u.max_abs()) + ")");
        M = num / den;
        Field un = (M * M) * resolvent(squared(u), s, 1.0);
        un.symmetrize_even();
        double diff = 0;
        for (std::size_t j = 0; j < grid.n; ++j) diff = std::max(diff, std::abs(un[j] - u[j]));
        u = std::move(un);
        history.push_back(diff);
        if (u.max_abs() < 1e-8)
            throw convergence_error("solve_ground_state: iterate collapsed to zero at step " +
                                    std::to_string(it));
        if (diff < opts.petviashvili_tol) break;
        if (it > 50 && history[history.size() - 1] > 10.0 * history[history.size() - 21])
            throw convergence_error("solve_ground_state: Petviashvili diverging at step " +
                                    std::to_string(it));
    }
    gs.petviashvili_mult = M;
    gs.iterations = it;

    // Newton polish on G(u) = u - K(u^2); J = I - K(2u .)
    for (int nit = 0; nit < opts.max_newton; ++nit) {
        const double res = detail::ground_residual(u, s).max_abs();
        if (res <= 0.1 * opts.residual_target) break;
        Field g = u - resolvent(squared(u), s, 1.0);
        LinearMap J = [&](const std::vector<double>& vin, std::vector<double>& vout) {
            Field v(grid, vin);
            Field kv = resolvent(pointwise(u, v), s, 1.0);
            vout.resize(grid.n);
            for (std::size_t j = 0; j < grid.n; ++j) vout[j] = vin[j] - 2.0 * kv[j];
        };
        std::vector<double> rhs(grid.n);
        for (std::size_t j = 0; j < grid.n; ++j) rhs[j] = -g[j];
        std::vector<double> delta(grid.n, 0.0);
        GmresOptions go;
        go.rel_tol = 1e-13;
        go.restart = 200;
        gmres(J, rhs, delta, go);
        for (std::size_t j = 0; j < grid.n; ++j) u[j] += delta[j];
        u.symmetrize_even();
    }

    gs.residual = detail::ground_residual(u, s).max_abs();
    if (gs.residual > opts.residual_target)
        throw convergence_error("solve_ground_state: residual " + std::to_string(gs.residual) +
                                " above target");
    if (u.asymmetry() > 1e-10 * std::max(1.0, u.max_abs()))
        throw symmetry_error("solve_ground_state: non-even drift beyond tolerance");

    gs.field = u;
    gs.peak = u[grid.n / 2];
    gs.mass_u2 = integral(squared(u));
    gs.mass_u3 = inner_product(squared(u), u);

    const double L = grid.half_length;
    const auto fit = fit_decay_exponent(u, L / 8.0, L / 4.0);
    gs.tail_exponent = fit.exponent;
    // anchor the tail prefactor to the exact rate so eval() decays correctly
    {
        double acc = 0;
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double x = grid.x(j);
            if (x < L / 8.0 || x > L / 4.0) continue;
            acc += u[j] * std::pow(x, 1.0 + 2.0 * s);
            ++cnt;
        }
        gs.tail_coeff = acc / static_cast<double>(cnt);
    }

    // splines of U, U' on [0, 0.45 L]; blend to the tail over [0.3 L, 0.4 L]
    Field du = spectral_derivative(u);
    const std::size_t n = grid.n;
    const std::size_t half = n / 2;
    const auto count = static_cast<std::size_t>(0.45 * static_cast<double>(half));
    std::vector<double> yu(count), yd(count);
    for (std::size_t i = 0; i < count; ++i) {
        yu[i] = u[half + i];
        yd[i] = du[half + i];
    }
    gs.spline_u = std::make_shared<CubicSpline>(0.0, grid.spacing(), std::move(yu));
    gs.spline_du = std::make_shared<CubicSpline>(0.0, grid.spacing(), std::move(yd));
    gs.splice_lo = 0.30 * L;
    gs.splice_hi = 0.40 * L;
    return gs;
}

// Z = U', the kernel direction of L0 = (-Delta)^s + (1 - 2U)
inline Field kernel_direction(const GroundState& gs) { return spectral_derivative(gs.field); }

enum class ConvKind { u2_conv_u, u2_conv_pow, u2_conv_log };

// Direct quadrature of int U^2(y) k(x - y) dy on the grid with
// k = U, |.|^{2s-1} or log|.|; the power/log kernels are cut at |x-y| <= L.
inline double convolution_asymptotics(const GroundState& gs, ConvKind kind, double x) {
    const Grid1D& g = gs.field.grid;
    const double L = g.half_length;
    if (kind != ConvKind::u2_conv_u || x != 0.0) {
        if (!(x >= 5.0 && x <= 0.5 * L))
            throw domain_error("convolution_asymptotics: x must lie in [5, L/2]");
    }
    const double p = 2.0 * gs.s - 1.0;
    double acc = 0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double y = g.x(j);
        const double d = x - y;
        const double u2 = gs.field[j] * gs.field[j];
        switch (kind) {
        case ConvKind::u2_conv_u:
            acc += u2 * gs.eval(d);
            break;
        case ConvKind::u2_conv_pow:
            if (std::abs(d) <= L && d != 0.0) acc += u2 * std::pow(std::abs(d), p);
            break;
        case ConvKind::u2_conv_log:
            if (std::abs(d) <= L && d != 0.0) acc += u2 * std::log(std::abs(d));
            break;
        }
    }
    return acc * g.spacing();
}

// pair-interaction kernel delta_s(z) = int U(y) U(y - z) dy for all grid
// offsets at once (an FFT autocorrelation); indexed so that at_x(z) works
inline Field interaction_kernel(const GroundState& gs) {
    const Grid1D& g = gs.field.grid;
    RealFft fft(g.n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(gs.field.values.data(), sp.data());
    for (auto& c : sp) c = std::norm(c) * g.spacing();
    std::vector<double> corr(g.n);
    fft.backward(sp.data(), corr.data());
    Field out(g);
    for (std::size_t j = 0; j < g.n; ++j) out.values[(j + g.n / 2) % g.n] = corr[j];
    return out;
}

} // namespace fgm
