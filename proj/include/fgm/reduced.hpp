//==============================================================================
// reduced.hpp
// The interaction energy
//   Xi(q_1..q_m) = sum_i F(2 q_i) + sum_{i != j} [F(|q_i-q_j|) + F(q_i+q_j)]
//                  (+ 2 sum_i F(q_i) for the odd-k pinned center)
// with F(r) = alpha U(r) + beta eps^{2s-1} r^{2s-1} (log r / log(1/eps) at
// s = 1/2), its analytic gradient, the operational calibration of
// (alpha, beta) from two-bump projection integrals, the admissible window,
// and the barrier/BFGS minimization that produces predicted spike locations.
//
// alpha and beta are never given numerically by the theory; they are defined
// here by least squares of the directly quadratured projection parts
//   B(r) = -int V^{-1} (W^2 - sum U_i^2) dU_1   against  dU/dr(r)
//   A(r) = -int (V^{-1}-1) sum U_i^2 dU_1       against  the repulsive d/dr
// over a ladder of two-bump separations at the spike-window scale. Both are
// computed with the two-bump tau; beta then carries the 2/k rescaling that
// tau imposes on the k-bump problem.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "fgm/multibump.hpp"

namespace fgm {

struct CalibrationReport {
    std::vector<double> ladder;     // separations r used
    double resid_alpha = 0;        // relative LSQ residual of the U-term fit
    double resid_beta = 0;         // relative LSQ residual of the repulsive fit
    double eps_ref = 0;            // eps at which the quadratures ran
};

struct InteractionConstants {
    double alpha = 0;
    double beta = 0;
    double gamma = 0; // alpha / beta, exact
    CalibrationReport calibration;
};

struct ReducedWindow {
    double s = 0;
    double eps = 0;
    double eta = 0;
    double scale = 0; // eps^{(1-2s)/(4s)} or sqrt(log 1/eps)

    ReducedWindow(double s_, double eps_, double eta_) : s(s_), eps(eps_), eta(eta_) {
        if (!(eta > 0 && eta < 1))
            throw invalid_parameter_error("ReducedWindow: eta must lie in (0,1)");
        scale = window_scale(s_, eps_);
        if (!(lo() < hi())) throw invalid_parameter_error("ReducedWindow: empty window");
    }
    double lo() const { return eta * scale; }
    double hi() const { return scale / eta; }
    double width() const { return hi() - lo(); }
    double gap_min() const { return eta * scale; }
};

struct CalibrateOptions {
    std::vector<double> ladder_in_scale; // separations as multiples of the window scale
    double resid_gate = 0.30;
};

inline CalibrateOptions default_calibrate_options(double s) {
    CalibrateOptions o;
    if (std::abs(s - 0.5) < 1e-12)
        o.ladder_in_scale = {2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0};
    else
        o.ladder_in_scale = {2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    return o;
}

// Operational calibration from two-bump configurations on the ground-state
// grid. params.k only enters through the final beta rescaling.
inline InteractionConstants calibrate_constants(const GroundState& gs, const FracParams& params,
                                                CalibrateOptions opts = {}) {
    if (opts.ladder_in_scale.empty()) opts = default_calibrate_options(params.s);
    const double s = params.s, eps = params.eps;
    const Grid1D& grid = gs.field.grid;
    const FracParams two = FracParams::make(s, eps, 2, gs.mass_u2);
    const double scl = two.scale();

    std::vector<double> ladder, XB, YB, XA, YA;
    for (double c : opts.ladder_in_scale) {
        const double r = c * scl;
        const double q1 = 0.5 * r;
        if (q1 > 0.25 * grid.half_length)
            throw invalid_parameter_error("calibrate_constants: ladder separation exceeds box");
        ladder.push_back(r);
        SpikeConfig cfg({q1});
        MultiBumpContext ctx = build_context(two, gs, cfg, grid);
        Field dU1 = spectral_shift(spectral_derivative(gs.field), q1);
        const Field& W = ctx.W;
        const Field& V = ctx.V;
        const Field& U1 = ctx.bumps[0];
        const Field& U2 = ctx.bumps[1];
        double B = 0, A = 0;
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double cross = W[j] * W[j] - U1[j] * U1[j] - U2[j] * U2[j];
            B -= cross / V[j] * dU1[j];
            A -= (1.0 / V[j] - 1.0) * (U1[j] * U1[j] + U2[j] * U2[j]) * dU1[j];
        }
        B *= grid.spacing();
        A *= grid.spacing();
        XB.push_back(gs.eval_derivative(r));
        YB.push_back(B);
        XA.push_back(pairforce::d_repulsive(r, s, eps, 1.0));
        YA.push_back(A);
    }

    auto lsq = [](const std::vector<double>& X, const std::vector<double>& Y) {
        double num = 0, den = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            num += X[i] * Y[i];
            den += X[i] * X[i];
        }
        const double c = num / den;
        double r2 = 0, y2 = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            r2 += (Y[i] - c * X[i]) * (Y[i] - c * X[i]);
            y2 += Y[i] * Y[i];
        }
        return std::pair<double, double>{c, std::sqrt(r2 / y2)};
    };

    const auto [alpha, ra] = lsq(XB, YB);
    const auto [beta2, rb] = lsq(XA, YA);
    if (ra > opts.resid_gate || rb > opts.resid_gate)
        throw calibration_error("calibrate_constants: fit residual above gate (alpha " +
                                std::to_string(ra) + ", beta " + std::to_string(rb) +
                                "); asymptotic regime not reached, enlarge separations");

    InteractionConstants ic;
    ic.alpha = alpha;
    ic.beta = beta2 * 2.0 / static_cast<double>(params.k); // tau carries 1/k
    ic.gamma = ic.alpha / ic.beta;
    ic.calibration = CalibrationReport{ladder, ra, rb, eps};
    return ic;
}

namespace detail {

inline double pair_F(double r, const FracParams& p, const InteractionConstants& c,
                     const GroundState& gs) {
    if (!(r > 1e-12)) throw singular_configuration_error("xi_energy: coincident spikes");
    double rep;
    if (p.is_half())
        rep = c.beta * std::log(r) / std::log(1.0 / p.eps);
    else
        rep = c.beta * std::pow(p.eps, 2.0 * p.s - 1.0) * std::pow(r, 2.0 * p.s - 1.0);
    return c.alpha * gs.eval(r) + rep;
}

inline double pair_dF(double r, const FracParams& p, const InteractionConstants& c,
                      const GroundState& gs) {
    return c.alpha * gs.eval_derivative(r) + pairforce::d_repulsive(r, p.s, p.eps, c.beta);
}

} // namespace detail

inline double xi_energy(const SpikeConfig& config, const FracParams& p,
                        const InteractionConstants& c, const GroundState& gs) {
    const auto& q = config.half_positions;
    const int m = config.m;
    double xi = 0;
    for (int i = 0; i < m; ++i) xi += detail::pair_F(2.0 * q[static_cast<std::size_t>(i)], p, c, gs);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            const double qi = q[static_cast<std::size_t>(i)], qj = q[static_cast<std::size_t>(j)];
            xi += detail::pair_F(std::abs(qi - qj), p, c, gs) + detail::pair_F(qi + qj, p, c, gs);
        }
    if (config.parity == Parity::odd_k)
        for (int i = 0; i < m; ++i) xi += 2.0 * detail::pair_F(q[static_cast<std::size_t>(i)], p, c, gs);
    return xi;
}

// dXi/dq_j on the m free coordinates; identical to reduced_force by the
// mirror pairing (each free coordinate moves a bump and its image).
inline std::vector<double> xi_gradient(const SpikeConfig& config, const FracParams& p,
                                       const InteractionConstants& c, const GroundState& gs) {
    const auto& q = config.half_positions;
    const int m = config.m;
    std::vector<double> grad(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        const double qj = q[static_cast<std::size_t>(j)];
        double gacc = 2.0 * detail::pair_dF(2.0 * qj, p, c, gs);
        for (int i = 0; i < m; ++i) {
            if (i == j) continue;
            const double qi = q[static_cast<std::size_t>(i)];
            const double d = qj - qi;
            gacc += 2.0 * (detail::pair_dF(std::abs(d), p, c, gs) * (d > 0 ? 1.0 : -1.0) +
                           detail::pair_dF(qj + qi, p, c, gs));
        }
        if (config.parity == Parity::odd_k) gacc += 2.0 * detail::pair_dF(qj, p, c, gs);
        grad[static_cast<std::size_t>(j)] = gacc;
    }
    return grad;
}

struct ScalarModel {
    double x_min = 0;
    double value = 0;
};

// g(x) = x^{-2} + gamma log x: minimizer sqrt(2/gamma), value in closed form
inline ScalarModel scalar_model(double gamma) {
    if (!(gamma > 0)) throw domain_error("scalar_model: gamma must be positive");
    ScalarModel sm;
    sm.x_min = std::sqrt(2.0 / gamma);
    sm.value = (0.5 + 0.5 * std::log(2.0)) * gamma - 0.5 * gamma * std::log(gamma);
    return sm;
}

inline std::vector<double> rescale_config(const SpikeConfig& config, const FracParams& p) {
    std::vector<double> d = config.half_positions;
    for (auto& v : d) v /= p.scale();
    return d;
}

inline SpikeConfig unscale_config(const std::vector<double>& d, const FracParams& p,
                                  Parity parity = Parity::even_k) {
    std::vector<double> q = d;
    for (auto& v : q) v *= p.scale();
    return SpikeConfig(q, parity);
}

// ---------------------------------------------------------------------------
// Minimization: multistart BFGS with a log barrier on the window constraints
// ---------------------------------------------------------------------------

struct MinimizeReport {
    double xi = 0;
    double grad_norm = 0;           // sup norm of dXi/dq at the answer
    double boundary_margin = 0;     // min constraint clearance / window width
    int starts = 0;
    int interior_starts = 0;        // starts that ended strictly inside
    std::vector<std::vector<double>> trace; // iterates of the winning start
};

namespace detail {

struct BarrierProblem {
    const FracParams* p;
    const InteractionConstants* c;
    const GroundState* gs;
    ReducedWindow win;
    Parity parity;
    double mu = 1e-2;

    bool feasible(const std::vector<double>& q) const {
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (!(q[i] > win.lo() && q[i] < win.hi())) return false;
            for (std::size_t j = i + 1; j < q.size(); ++j)
                if (!(std::abs(q[i] - q[j]) > win.gap_min())) return false;
        }
        return true;
    }

    double margin(const std::vector<double>& q) const {
        double m = 1e300;
        for (std::size_t i = 0; i < q.size(); ++i) {
            m = std::min(m, q[i] - win.lo());
            m = std::min(m, win.hi() - q[i]);
            for (std::size_t j = i + 1; j < q.size(); ++j)
                m = std::min(m, std::abs(q[i] - q[j]) - win.gap_min());
        }
        return m / win.width();
    }

    SpikeConfig cfg(const std::vector<double>& q) const {
        std::vector<double> sorted = q;
        std::sort(sorted.rbegin(), sorted.rend());
        return SpikeConfig(sorted, parity);
    }

    double value(const std::vector<double>& q) const {
        double v = xi_energy(cfg(q), *p, *c, *gs);
        for (std::size_t i = 0; i < q.size(); ++i) {
            v -= mu * (std::log(q[i] - win.lo()) + std::log(win.hi() - q[i]));
            for (std::size_t j = i + 1; j < q.size(); ++j)
                v -= mu * std::log(std::abs(q[i] - q[j]) - win.gap_min());
        }
        return v;
    }

    std::vector<double> gradient(const std::vector<double>& q) const {
        // xi_gradient expects descending order; q stays ordered during descent
        auto g = xi_gradient(cfg(q), *p, *c, *gs);
        for (std::size_t i = 0; i < q.size(); ++i) {
            g[i] -= mu * (1.0 / (q[i] - win.lo()) - 1.0 / (win.hi() - q[i]));
            for (std::size_t j = 0; j < q.size(); ++j) {
                if (i == j) continue;
                const double d = q[i] - q[j];
                g[i] -= mu * (d > 0 ? 1.0 : -1.0) / (std::abs(d) - win.gap_min());
            }
        }
        return g;
    }
};

// dense BFGS with Armijo backtracking; dimension is tiny (m <= 4)
inline bool bfgs(BarrierProblem& prob, std::vector<double>& q, int max_iter, double gtol,
                 std::vector<std::vector<double>>* trace = nullptr) {
    const std::size_t n = q.size();
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;
    auto g = prob.gradient(q);
    double f = prob.value(q);
    for (int it = 0; it < max_iter; ++it) {
        if (trace) trace->push_back(q);
        double gn = 0;
        for (double v : g) gn = std::max(gn, std::abs(v));
        if (gn < gtol) return true;
        // d = -H g
        std::vector<double> d(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i] -= H[i][j] * g[j];
        double dg = 0;
        for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
        if (dg >= 0) { // reset curvature
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) H[i][j] = (i == j) ? 1.0 : 0.0;
            dg = 0;
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -g[i];
                dg += d[i] * g[i];
            }
        }
        double t = 1.0;
        std::vector<double> qn(n);
        double fn = f;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) qn[i] = q[i] + t * d[i];
            if (prob.feasible(qn)) {
                fn = prob.value(qn);
                if (fn <= f + 1e-4 * t * dg) {
                    ok = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!ok) return false; // stuck against the boundary
        auto gn2 = prob.gradient(qn);
        // BFGS update
        std::vector<double> sv(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            sv[i] = qn[i] - q[i];
            yv[i] = gn2[i] - g[i];
        }
        double sy = 0;
        for (std::size_t i = 0; i < n; ++i) sy += sv[i] * yv[i];
        if (sy > 1e-14) {
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * yv[j];
            double yHy = 0;
            for (std::size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i][j] += ((sy + yHy) * sv[i] * sv[j]) / (sy * sy) -
                               (Hy[i] * sv[j] + sv[i] * Hy[j]) / sy;
        }
        q = qn;
        g = gn2;
        f = fn;
    }
    return true;
}

} // namespace detail

inline std::pair<SpikeConfig, MinimizeReport> minimize_xi(const FracParams& p,
                                                          const InteractionConstants& c, int m,
                                                          double eta, const GroundState& gs,
                                                          Parity parity = Parity::even_k) {
    if (m < 1) throw invalid_parameter_error("minimize_xi: m must be >= 1");
    ReducedWindow win(p.s, p.eps, eta);

    detail::BarrierProblem prob{&p, &c, &gs, win, parity, 1e-2};

    // 8 scaled lattice seeds: equally spaced ladders q_i = a (m + 1 - i)
    std::vector<double> bases;
    const double a_lo = std::max(win.lo() * 1.10, win.gap_min() * 1.10);
    const double a_hi = 0.90 * win.hi() / static_cast<double>(m);
    if (!(a_lo < a_hi))
        throw no_interior_minimum_error("minimize_xi: window admits no ordered lattice seed");
    for (int t = 0; t < 8; ++t)
        bases.push_back(a_lo * std::pow(a_hi / a_lo, (t + 0.5) / 8.0));

    std::optional<std::vector<double>> best;
    double best_xi = 1e300;
    MinimizeReport rep;
    rep.starts = 8;
    std::vector<std::vector<double>> best_trace;

    for (double a : bases) {
        std::vector<double> q(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) q[static_cast<std::size_t>(i)] = a * static_cast<double>(m - i);
        if (!prob.feasible(q)) continue;
        std::vector<std::vector<double>> trace;
        bool ok = true;
        for (double mu = 1e-2; mu >= 0.5e-10; mu *= 0.1) {
            prob.mu = mu;
            const double gtol = std::max(1e-12, 1e-3 * mu / win.width());
            ok = detail::bfgs(prob, q, 400, gtol, mu < 1e-9 ? &trace : nullptr);
            if (!ok) break;
        }
        if (!ok) continue;
        if (prob.margin(q) < 1e-3) continue; // converged onto the boundary
        const double xi = xi_energy(prob.cfg(q), p, c, gs);
        rep.interior_starts++;
        if (xi < best_xi - 1e-12 ||
            (std::abs(xi - best_xi) <= 1e-12 && best && q < *best)) {
            best_xi = xi;
            best = q;
            best_trace = trace;
        }
    }

    if (!best)
        throw no_interior_minimum_error(
            "minimize_xi: every start terminated on the window boundary (eta too large?)");

    SpikeConfig answer = prob.cfg(*best);
    rep.xi = best_xi;
    auto grad = xi_gradient(answer, p, c, gs);
    for (double v : grad) rep.grad_norm = std::max(rep.grad_norm, std::abs(v));
    rep.boundary_margin = prob.margin(*best);
    rep.trace = std::move(best_trace);
    return {answer, rep};
}

} // namespace fgm
