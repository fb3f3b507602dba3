//==============================================================================
// quadrature.hpp
// Scalar quadrature used by the Green-function module:
//   - adaptive Gauss-Kronrod (G7/K15) on finite intervals,
//   - cosine tails int_{a}^{inf} cos(t) f(t) dt by half-period blocks between
//     consecutive zeros of cos, accelerated as an alternating series with an
//     iterated-averaging (Euler) table. f must be smooth, one-signed and
//     decaying; that is exactly the shape of every tail we meet.
//==============================================================================
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "fgm/errors.hpp"

namespace fgm {

namespace quad {

// G7/K15 nodes and weights on [-1, 1]
inline constexpr std::array<double, 15> kKronrodNodes = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898,  0.0,
     0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
     0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr std::array<double, 15> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GK {
    double integral;
    double error;
};

inline GK gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double k = 0, g = 0;
    std::array<double, 15> fv{};
    for (int i = 0; i < 15; ++i) {
        fv[i] = f(c + hw * kKronrodNodes[i]);
        k += kKronrodWeights[i] * fv[i];
    }
    g = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i) g += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    k *= hw;
    g *= hw;
    return GK{k, std::abs(k - g)};
}

} // namespace quad

// Adaptive G7/K15 to an absolute tolerance. Throws accuracy_error if the
// subdivision budget runs out before the requested tolerance is met.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, int max_depth = 48) {
    struct Seg {
        double a, b, val, err;
        int depth;
    };
    auto first = quad::gk15(f, a, b);
    std::vector<Seg> stack{{a, b, first.integral, first.error, 0}};
    double total = 0, err_budget = abs_tol;
    // roundoff floor: no segment can certify better than machine precision of
    // the whole integral's scale
    const double floor_err = 1e-15 * (std::abs(first.integral) + first.error);
    double worst = 0;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.err <= err_budget * (s.b - s.a) / std::max(1e-300, b - a) || s.err <= floor_err ||
            s.err <= 1e-16 * std::abs(s.val)) {
            total += s.val;
            worst = std::max(worst, s.err);
            continue;
        }
        if (s.depth >= max_depth)
            throw accuracy_error("integrate: adaptive depth exhausted before tolerance");
        const double m = 0.5 * (s.a + s.b);
        auto l = quad::gk15(f, s.a, m);
        auto r = quad::gk15(f, m, s.b);
        stack.push_back({s.a, m, l.integral, l.error, s.depth + 1});
        stack.push_back({m, s.b, r.integral, r.error, s.depth + 1});
    }
    return total;
}

// Sum of an alternating-sign sequence of block integrals via an iterated
// averaging table. Terms must eventually decay; convergence is checked on the
// final column.
inline double accelerate_alternating(const std::vector<double>& partial_sums, double abs_tol) {
    std::vector<double> row = partial_sums;
    double best = row.back();
    for (std::size_t pass = 0; row.size() > 1; ++pass) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
        if (row.size() >= 2) {
            const double delta = std::abs(row[row.size() - 1] - row[row.size() - 2]);
            best = row.back();
            if (delta < 0.25 * abs_tol) return best;
        } else {
            best = row.back();
        }
    }
    return best;
}

// int_{a}^{inf} cos(t) f(t) dt, f smooth / one-signed / decaying.
inline double integrate_cos_tail(const std::function<double(double)>& f, double a,
                                 double abs_tol = 1e-12, int max_blocks = 120) {
    // first zero of cos at or beyond a
    const double kHalfPi = 0.5 * M_PI;
    double z = kHalfPi + M_PI * std::ceil((a - kHalfPi) / M_PI);
    if (z < a) z += M_PI;

    auto g = [&f](double t) { return std::cos(t) * f(t); };
    double head = (z > a) ? integrate(g, a, z, abs_tol * 0.1) : 0.0;

    std::vector<double> sums;
    sums.reserve(static_cast<std::size_t>(max_blocks));
    double acc = 0;
    double prev_term = 0;
    for (int b = 0; b < max_blocks; ++b) {
        const double lo = z + M_PI * b, hi = lo + M_PI;
        const double term = quad::gk15(g, lo, hi).integral;
        acc += term;
        sums.push_back(acc);
        if (b > 3 && std::abs(term) < abs_tol * 1e-3 && std::abs(prev_term) < abs_tol * 1e-3)
            return head + acc;
        prev_term = term;
        if (b >= 11 && (b % 4 == 3)) {
            const double s1 = accelerate_alternating(sums, abs_tol * 1e-2);
            std::vector<double> shorter(sums.begin(), sums.end() - 2);
            const double s2 = accelerate_alternating(shorter, abs_tol * 1e-2);
            if (std::abs(s1 - s2) < abs_tol) return head + s1;
        }
    }
    const double s1 = accelerate_alternating(sums, abs_tol * 1e-2);
    std::vector<double> shorter(sums.begin(), sums.end() - 2);
    const double s2 = accelerate_alternating(shorter, abs_tol * 1e-2);
    if (std::abs(s1 - s2) > 10 * abs_tol)
        throw accuracy_error("integrate_cos_tail: block series did not settle (achieved " +
                             std::to_string(std::abs(s1 - s2)) + ")");
    return head + s1;
}

} // namespace fgm
