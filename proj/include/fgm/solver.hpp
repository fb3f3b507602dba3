//==============================================================================
// solver.hpp
// The projected linear problem and the full nonlinear solve.
//
// Lyapunov-Schmidt: find (phi, c) with
//   L phi = S(W) + N(phi) + sum_j lambda_j Z_j,   <phi, Z_j> = 0,
//   L phi = (-Delta)^s phi + (1 - 2W) phi + 2 omega W^2 int W phi,
// solved as an augmented saddle system with matrix-free GMRES preconditioned
// by ((-Delta)^s + 1)^{-1}, and an outer fixed point on N(phi). The reported
// coefficients are normalized as c_j = -lambda_j ||Z_j||^2, which makes
// c_j = <S(W), Z_j> + h.o.t. and lines the c's up with the reduced forces b.
//
// Full solve: damped Newton on F(u) = (-Delta)^s u + u - u^2/T(u^2) with the
// Frechet derivative applied matrix-free (the nonlocal term contributes
// -2 u v/T + (u^2/T^2) T(2 u .)), Krylov inner solves, and even-symmetric
// iterates as the translation gauge.
//==============================================================================
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fgm/gmres.hpp"
#include "fgm/multibump.hpp"

namespace fgm {

struct LSResult {
    Field phi;
    std::vector<double> c;   // normalized multipliers, one per spike
    int iterations = 0;      // outer fixed-point steps
    double residual = 0;     // sup norm of the projected equation residual
    double star_norm_phi = 0;
    std::vector<double> orth; // <phi, Z_j> after convergence
};

struct LSOptions {
    double outer_tol = 1e-10;  // sup change of phi between outer steps
    int max_outer = 60;
    GmresOptions gmres;
};

namespace detail {

struct LSOperator {
    const MultiBumpContext* ctx;
    const std::vector<Field>* zs;
    double h;

    // y = L phi + sum c_j Z_j ; constraints <phi, Z_j>
    void operator()(const std::vector<double>& v, std::vector<double>& out) const {
        const Grid1D& g = ctx->W.grid;
        const std::size_t n = g.n;
        const std::size_t k = zs->size();
        Field phi(g, std::vector<double>(v.begin(), v.begin() + static_cast<long>(n)));
        Field lphi = fractional_laplacian(phi, ctx->params.s);
        double wphi = 0;
        for (std::size_t j = 0; j < n; ++j) wphi += ctx->W[j] * phi[j];
        wphi *= h;
        out.resize(n + k);
        for (std::size_t j = 0; j < n; ++j) {
            double y = lphi[j] + (1.0 - 2.0 * ctx->W[j]) * phi[j] +
                       2.0 * ctx->params.omega * ctx->W[j] * ctx->W[j] * wphi;
            for (std::size_t i = 0; i < k; ++i) y += v[n + i] * (*zs)[i][j];
            out[j] = y;
        }
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += phi[j] * (*zs)[i][j];
            out[n + i] = acc * h;
        }
    }
};

} // namespace detail

// N(phi) = (W+phi)^2 / T((W+phi)^2) - W^2/V - 2 W phi + 2 omega W^2 int W phi
inline Field nonlinear_remainder(const MultiBumpContext& ctx, const Field& phi) {
    const Grid1D& g = ctx.W.grid;
    Field wp = ctx.W + phi;
    Field Twp = apply_inhibitor_response(ctx.params, squared(wp));
    double wphi = inner_product(ctx.W, phi);
    Field out(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        out[j] = wp[j] * wp[j] / Twp[j] - ctx.W[j] * ctx.W[j] / ctx.V[j] -
                 2.0 * ctx.W[j] * phi[j] +
                 2.0 * ctx.params.omega * ctx.W[j] * ctx.W[j] * wphi;
    }
    return out;
}

inline LSResult lyapunov_schmidt_solve(MultiBumpContext& ctx, const LSOptions& opts = {}) {
    const Grid1D& g = ctx.W.grid;
    const std::size_t n = g.n;
    const auto zs = kernel_directions(ctx);
    const std::size_t k = zs.size();
    const double h = g.spacing();

    Field S = error_term(ctx);

    detail::LSOperator A{&ctx, &zs, h};
    LinearMap Amap = [&A](const std::vector<double>& v, std::vector<double>& out) { A(v, out); };
    LinearMap P = [&](const std::vector<double>& v, std::vector<double>& out) {
        Field f(g, std::vector<double>(v.begin(), v.begin() + static_cast<long>(n)));
        Field r = resolvent(f, ctx.params.s, 1.0);
        out.resize(n + k);
        for (std::size_t j = 0; j < n; ++j) out[j] = r[j];
        for (std::size_t i = 0; i < k; ++i) out[n + i] = v[n + i];
    };

    Field phi(g);
    std::vector<double> sol(n + k, 0.0);
    std::vector<double> lambda(k, 0.0);
    double prev_change = 1e300;
    int grow = 0;
    int outer = 0;
    GmresReport grep;
    for (; outer < opts.max_outer; ++outer) {
        Field rhs_f = nonlinear_remainder(ctx, phi);
        std::vector<double> rhs(n + k, 0.0);
        for (std::size_t j = 0; j < n; ++j) rhs[j] = S[j] + rhs_f[j];
        GmresOptions go = opts.gmres;
        grep = gmres(Amap, rhs, sol, go, &P);
        if (!grep.converged)
            throw numerical_error("lyapunov_schmidt_solve: saddle system GMRES stalled at residual " +
                                  std::to_string(grep.residual) +
                                  " (near-singular projected operator)");
        double change = 0;
        for (std::size_t j = 0; j < n; ++j) {
            change = std::max(change, std::abs(sol[j] - phi[j]));
            phi[j] = sol[j];
        }
        for (std::size_t i = 0; i < k; ++i) lambda[i] = sol[n + i];
        if (change < opts.outer_tol) break;
        if (change > prev_change * 1.5) {
            if (++grow >= 3)
                throw divergence_error(
                    "lyapunov_schmidt_solve: fixed point diverging; reduce eps or separate spikes");
        } else {
            grow = 0;
        }
        prev_change = change;
    }

    LSResult res;
    res.phi = phi;
    res.iterations = outer + 1;
    // residual of the projected equation with the converged phi
    {
        Field rhs_f = nonlinear_remainder(ctx, phi);
        std::vector<double> v(n + k);
        for (std::size_t j = 0; j < n; ++j) v[j] = phi[j];
        for (std::size_t i = 0; i < k; ++i) v[n + i] = lambda[i];
        std::vector<double> out;
        A(v, out);
        double r = 0;
        for (std::size_t j = 0; j < n; ++j)
            r = std::max(r, std::abs(out[j] - S[j] - rhs_f[j]));
        res.residual = r;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double zz = inner_product(zs[i], zs[i]);
        res.c.push_back(-lambda[i] * zz);
        res.orth.push_back(inner_product(phi, zs[i]));
    }
    res.star_norm_phi = weighted_norm(phi, ctx.config, ctx.mu);
    return res;
}

// ---------------------------------------------------------------------------
// Full nonlinear solve
// ---------------------------------------------------------------------------

struct SolutionPair {
    Field u;
    Field v;
    double residual_u = 0; // sup norm of the first equation
    double residual_v = 0; // sup norm of the second equation
    int newton_iterations = 0;
    bool clipped_negative = false;         // an iterate needed clipping
    std::vector<double> residual_history;  // sup |F| per Newton step
};

struct NewtonOptions {
    double tol = 1e-9; // sup norm of F(u)
    int max_iter = 60;
    GmresOptions gmres{1e-10, 1e-13, 150, 20};
};

inline SolutionPair newton_full(const MultiBumpContext& ctx, const Field* seed = nullptr,
                                const NewtonOptions& opts = {}) {
    const Grid1D& g = ctx.W.grid;
    const std::size_t n = g.n;
    const FracParams& p = ctx.params;

    Field u = seed ? *seed : ctx.W;
    if (u.grid != g) throw incompatible_grid_error("newton_full: seed grid mismatch");

    auto Fres = [&](const Field& uu) {
        Field t = apply_inhibitor_response(p, squared(uu));
        Field r = fractional_laplacian(uu, p.s);
        for (std::size_t j = 0; j < n; ++j) r[j] += uu[j] - uu[j] * uu[j] / t[j];
        return r;
    };

    SolutionPair out;
    Field r = Fres(u);
    double rn = r.max_abs();
    out.residual_history.push_back(rn);
    int it = 0;
    for (; it < opts.max_iter && rn > opts.tol; ++it) {
        Field Tu2 = apply_inhibitor_response(p, squared(u));
        LinearMap J = [&](const std::vector<double>& vin, std::vector<double>& vout) {
            Field v(g, vin);
            Field lap = fractional_laplacian(v, p.s);
            Field tuv = apply_inhibitor_response(p, 2.0 * pointwise(u, v));
            vout.resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                vout[j] = lap[j] + v[j] - 2.0 * u[j] * v[j] / Tu2[j] +
                          u[j] * u[j] / (Tu2[j] * Tu2[j]) * tuv[j];
            }
        };
        LinearMap P = [&](const std::vector<double>& vin, std::vector<double>& vout) {
            Field v(g, vin);
            Field rv = resolvent(v, p.s, 1.0);
            vout = rv.values;
        };
        std::vector<double> rhs(n), delta(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) rhs[j] = -r[j];
        gmres(J, rhs, delta, opts.gmres, &P);

        // residual line search with even symmetrization as the gauge
        double t = 1.0;
        Field un(g);
        double rn_new = rn;
        Field r_new = r;
        bool accepted = false;
        for (int ls = 0; ls < 14; ++ls) {
            for (std::size_t j = 0; j < n; ++j) un[j] = u[j] + t * delta[j];
            un.symmetrize_even();
            if (un.min_value() < 0) {
                out.clipped_negative = true;
                for (auto& vv : un.values) vv = std::max(vv, 0.0);
            }
            r_new = Fres(un);
            rn_new = r_new.max_abs();
            if (rn_new < (1.0 - 0.25 * t) * rn) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break; // stagnation; return best iterate with diagnosis
        u = un;
        r = r_new;
        rn = rn_new;
        out.residual_history.push_back(rn);
    }

    out.u = u;
    out.v = apply_inhibitor_response(p, squared(u));
    out.residual_u = rn;
    out.newton_iterations = it;
    // second equation of the system: (-Delta)^s v + eps^{2s} v - tau u^2
    {
        Field lv = fractional_laplacian(out.v, p.s);
        double rv = 0;
        const double m = std::pow(p.eps, 2.0 * p.s);
        for (std::size_t j = 0; j < n; ++j)
            rv = std::max(rv, std::abs(lv[j] + m * out.v[j] - p.tau_eps * u[j] * u[j]));
        out.residual_v = rv;
    }
    if (u.min_value() <= 0)
        throw convergence_error("newton_full: converged iterate is not positive");
    return out;
}

struct VerifyReport {
    double sup_u_deviation = 0;            // sup |u - W|
    double v_plateau_deviation = 0;        // max over spikes of |v(q+-x) - 1|, |x| <= 2
    std::vector<double> spike_heights;
    std::vector<double> fitted_positions;  // parabola fits at local maxima (x > 0 side)
    std::vector<double> config_positions;  // the half configuration used
    int maxima_count = 0;
    double max_position_mismatch = 0;      // relative, fitted vs config
    double u_asymmetry = 0;
};

// local maxima of u above a noise floor, refined by parabola fits
inline std::vector<std::pair<double, double>> find_local_maxima(const Field& u, double floor) {
    std::vector<std::pair<double, double>> out;
    const Grid1D& g = u.grid;
    for (std::size_t j = 1; j + 1 < g.n; ++j) {
        if (u[j] > u[j - 1] && u[j] > u[j + 1] && u[j] > floor) {
            const double y0 = u[j - 1], y1 = u[j], y2 = u[j + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            const double dx = denom != 0 ? 0.5 * g.spacing() * (y0 - y2) / denom : 0.0;
            out.emplace_back(g.x(j) + dx, y1 - 0.125 * (y0 - y2) * (y0 - y2) / (denom == 0 ? 1 : denom));
        }
    }
    return out;
}

inline VerifyReport verify_solution(const SolutionPair& pair, const MultiBumpContext& ctx) {
    VerifyReport rep;
    const Grid1D& g = pair.u.grid;
    Field diff = pair.u - ctx.W;
    rep.sup_u_deviation = diff.max_abs();
    rep.u_asymmetry = pair.u.asymmetry();

    const auto maxima = find_local_maxima(pair.u, 0.2 * ctx.gs->peak);
    rep.maxima_count = static_cast<int>(maxima.size());
    for (const auto& [x, hgt] : maxima) {
        if (x < 0.5 * g.spacing()) continue; // keep the strictly positive side
        rep.fitted_positions.push_back(x);
        rep.spike_heights.push_back(hgt);
    }
    std::sort(rep.fitted_positions.rbegin(), rep.fitted_positions.rend());
    rep.config_positions = ctx.config.half_positions;

    const std::size_t mcmp = std::min(rep.fitted_positions.size(), rep.config_positions.size());
    for (std::size_t i = 0; i < mcmp; ++i)
        rep.max_position_mismatch =
            std::max(rep.max_position_mismatch, std::abs(rep.fitted_positions[i] - rep.config_positions[i]) /
                                                    rep.config_positions[i]);

    for (double q : ctx.config.full_positions()) {
        for (double dx = -2.0; dx <= 2.0; dx += 0.25) {
            const double v = pair.v.at_x(q + dx);
            rep.v_plateau_deviation = std::max(rep.v_plateau_deviation, std::abs(v - 1.0));
        }
    }
    return rep;
}

} // namespace fgm
