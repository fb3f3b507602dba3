//==============================================================================
// multibump.hpp
// The multi-bump ansatz and its error machinery:
//   W = sum_i U(. - q_i)          (spectral shifts of the solved profile)
//   V = T(W^2) = tau_eps ((-Delta)^s + eps^{2s})^{-1} W^2
//   S(W) = -(-Delta)^s W - W + W^2/V   ( = W^2/V - sum U_i^2 )
// plus the weighted *-norm, projections onto the kernel directions
// Z_j = dW/dq_j, and the reduced pair forces derived from
//   F_s(r) = alpha U(r) + beta eps^{2s-1} r^{2s-1}          (s > 1/2)
//   F_1/2(r) = alpha U(r) + beta log r / log(1/eps)         (s = 1/2).
//
// Configurations are symmetric: bumps at +-q_1..+-q_m (plus one pinned at 0
// for odd k). Indexing of full positions is descending, q_i = -q_{k+1-i}.
//==============================================================================
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fgm/ground_state.hpp"
#include "fgm/params.hpp"
#include "fgm/spectral.hpp"

namespace fgm {

enum class Parity { even_k, odd_k };

struct SpikeConfig {
    int m = 0;                          // free half count
    std::vector<double> half_positions; // q_1 > q_2 > ... > q_m > 0
    Parity parity = Parity::even_k;

    SpikeConfig() = default;
    SpikeConfig(std::vector<double> half, Parity p = Parity::even_k)
        : m(static_cast<int>(half.size())), half_positions(std::move(half)), parity(p) {
        validate();
    }

    void validate() const {
        if (half_positions.empty())
            throw invalid_parameter_error("SpikeConfig: need at least one spike");
        for (std::size_t i = 0; i < half_positions.size(); ++i) {
            if (!(half_positions[i] > 0))
                throw invalid_parameter_error("SpikeConfig: half positions must be positive");
            if (i > 0 && !(half_positions[i] < half_positions[i - 1]))
                throw invalid_parameter_error("SpikeConfig: half positions must be strictly decreasing");
        }
    }

    int k() const { return parity == Parity::even_k ? 2 * m : 2 * m + 1; }

    // descending full configuration q_1 > ... > q_k with q_i = -q_{k+1-i}
    std::vector<double> full_positions() const {
        std::vector<double> q(half_positions);
        if (parity == Parity::odd_k) q.push_back(0.0);
        for (int i = m - 1; i >= 0; --i) q.push_back(-half_positions[static_cast<std::size_t>(i)]);
        return q;
    }

    double min_gap() const {
        auto q = full_positions();
        double g = q[0] - q[1];
        for (std::size_t i = 1; i + 1 < q.size(); ++i) g = std::min(g, q[i] - q[i + 1]);
        return g;
    }
};

struct MultiBumpContext {
    FracParams params;
    const GroundState* gs = nullptr;
    SpikeConfig config;
    Field W;
    Field V;
    double mu = 0;                // weight exponent, default 1 + 2s
    double s_identity_gap = 0;    // sup |S_spectral - (W^2/V - sum U_i^2)|
    std::vector<Field> bumps;     // shifted copies U(. - q_i), descending order
};

// T(h) = tau_eps ((-Delta)^s + eps^{2s})^{-1} h
inline Field apply_inhibitor_response(const FracParams& p, const Field& h) {
    return p.tau_eps * resolvent(h, p.s, std::pow(p.eps, 2.0 * p.s));
}

inline MultiBumpContext build_context(const FracParams& params, const GroundState& gs,
                                      const SpikeConfig& config, const Grid1D& grid) {
    config.validate();
    if (gs.field.grid != grid)
        throw incompatible_grid_error("build_context: ground state solved on a different grid");
    if (config.k() != params.k)
        throw invalid_parameter_error("build_context: config bump count disagrees with params.k");
    const double L = grid.half_length;
    for (double q : config.full_positions())
        if (std::abs(q) > 0.5 * L)
            throw truncation_error("build_context: spike at " + std::to_string(q) +
                                   " outside [-L/2, L/2]");
    if (params.eps * L < 1.0)
        throw invalid_parameter_error(
            "build_context: eps*L < 1, inhibitor scale 1/eps not resolvable on this box");

    MultiBumpContext ctx;
    ctx.params = params;
    ctx.gs = &gs;
    ctx.config = config;
    ctx.mu = 1.0 + 2.0 * params.s;

    Field W(grid);
    for (double q : config.full_positions()) {
        Field bump = (q == 0.0) ? gs.field : spectral_shift(gs.field, q);
        for (std::size_t j = 0; j < grid.n; ++j) W[j] += bump[j];
        ctx.bumps.push_back(std::move(bump));
    }
    ctx.W = std::move(W);
    ctx.V = apply_inhibitor_response(params, squared(ctx.W));
    if (ctx.V.min_value() <= 0)
        throw inhibitor_positivity_error(
            "build_context: inhibitor response lost positivity (grid/parameter breakdown)");
    return ctx;
}

// S(W) computed spectrally; the algebraic form W^2/V - sum U_i^2 is evaluated
// alongside and the gap recorded on the context.
inline Field error_term(MultiBumpContext& ctx) {
    const Grid1D& g = ctx.W.grid;
    Field s_spec = fractional_laplacian(ctx.W, ctx.params.s);
    for (std::size_t j = 0; j < g.n; ++j)
        s_spec[j] = -s_spec[j] - ctx.W[j] + ctx.W[j] * ctx.W[j] / ctx.V[j];
    Field s_alg(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        double sum_u2 = 0;
        for (const auto& b : ctx.bumps) sum_u2 += b[j] * b[j];
        s_alg[j] = ctx.W[j] * ctx.W[j] / ctx.V[j] - sum_u2;
    }
    double gap = 0;
    for (std::size_t j = 0; j < g.n; ++j) gap = std::max(gap, std::abs(s_spec[j] - s_alg[j]));
    ctx.s_identity_gap = gap;
    return s_spec;
}

// rho(x) = sum_j (1 + |x - q_j|)^{-mu} over the full configuration
inline Field star_weight(const Grid1D& g, const SpikeConfig& config, double mu) {
    Field rho(g);
    const auto q = config.full_positions();
    for (std::size_t j = 0; j < g.n; ++j) {
        double acc = 0;
        for (double qi : q) acc += std::pow(1.0 + std::abs(g.x(j) - qi), -mu);
        rho[j] = acc;
    }
    return rho;
}

// ||f||_* = sup |f| / rho
inline double weighted_norm(const Field& f, const SpikeConfig& config, double mu) {
    if (!(mu > 0.5))
        throw invalid_parameter_error("weighted_norm: mu must exceed 1/2");
    Field rho = star_weight(f.grid, config, mu);
    double sup = 0;
    for (std::size_t j = 0; j < f.grid.n; ++j) sup = std::max(sup, std::abs(f[j]) / rho[j]);
    return sup;
}

// Z_j = dW/dq_j = -U'(. - q_j), one per full position (descending order)
inline std::vector<Field> kernel_directions(const MultiBumpContext& ctx) {
    Field du = kernel_direction(*ctx.gs);
    std::vector<Field> zs;
    for (double q : ctx.config.full_positions()) {
        Field z = (q == 0.0) ? du : spectral_shift(du, q);
        for (auto& v : z.values) v = -v;
        zs.push_back(std::move(z));
    }
    return zs;
}

// <S(W), Z_j> for each of the k spikes
inline std::vector<double> project_error(MultiBumpContext& ctx) {
    Field s = error_term(ctx);
    std::vector<double> out;
    for (const auto& z : kernel_directions(ctx)) out.push_back(inner_product(s, z));
    return out;
}

// ---------------------------------------------------------------------------
// Reduced pair forces
// ---------------------------------------------------------------------------

namespace pairforce {

// derivative of the repulsive part of F at r > 0; the U part is added by
// callers that carry the profile
inline double d_repulsive(double r, double s, double eps, double beta) {
    if (std::abs(s - 0.5) < 1e-12) return beta / (r * std::log(1.0 / eps));
    return beta * std::pow(eps, 2.0 * s - 1.0) * (2.0 * s - 1.0) * std::pow(r, 2.0 * s - 2.0);
}

} // namespace pairforce

// Per-bump force b_j = sum_{i != j} dF(|q_j - q_i|)/dq_j over the full
// configuration, reported for the m free bumps (descending). The mirrors obey
// b_{k+1-j} = -b_j; an odd-k center bump has zero force by symmetry.
inline std::vector<double> per_bump_forces(const SpikeConfig& config, const FracParams& p,
                                           double alpha, double beta, const GroundState& gs) {
    const auto q = config.full_positions();
    std::vector<double> b(static_cast<std::size_t>(config.m), 0.0);
    for (int j = 0; j < config.m; ++j) {
        double acc = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (static_cast<int>(i) == j) continue;
            const double d = q[static_cast<std::size_t>(j)] - q[i];
            const double r = std::abs(d);
            if (r < 1e-12)
                throw singular_configuration_error("per_bump_forces: coincident spikes");
            const double sgn = d > 0 ? 1.0 : -1.0;
            const double dFr = alpha * gs.eval_derivative(r) +
                               pairforce::d_repulsive(r, p.s, p.eps, beta);
            acc += dFr * sgn;
        }
        b[static_cast<std::size_t>(j)] = acc;
    }
    return b;
}

// out-of-asymptotic-range indicator: pair separations below 1 make the
// F_s model unreliable (warning-level, not fatal)
inline bool separations_in_range(const SpikeConfig& config) {
    return std::min(config.min_gap(), 2.0 * config.half_positions.back()) >= 1.0;
}

// Force on the m free coordinates of the symmetric family (each free
// coordinate moves a bump and its mirror): equals twice the per-bump force.
inline std::vector<double> reduced_force(const SpikeConfig& config, const FracParams& p,
                                         double alpha, double beta, const GroundState& gs) {
    auto b = per_bump_forces(config, p, alpha, beta, gs);
    for (auto& v : b) v *= 2.0;
    return b;
}

} // namespace fgm
