//==============================================================================
// gmres.hpp
// Matrix-free restarted GMRES with optional right preconditioning. Reduction
// order over Krylov vectors is fixed (plain loops), so results are
// deterministic run to run.
//==============================================================================
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fgm/errors.hpp"

namespace fgm {

struct GmresOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int restart = 120;
    int max_outer = 40;
};

struct GmresReport {
    int iterations = 0;
    double residual = 0;
    bool converged = false;
};

using LinearMap = std::function<void(const std::vector<double>&, std::vector<double>&)>;

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double nrm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }
inline void axpy(double c, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

} // namespace detail

// Solve A x = b. If precond is set it approximates A^{-1} and is applied on
// the right: A M z = b, x = M z.
inline GmresReport gmres(const LinearMap& A, const std::vector<double>& b, std::vector<double>& x,
                         const GmresOptions& opt = {}, const LinearMap* precond = nullptr) {
    using namespace detail;
    const std::size_t n = b.size();
    if (x.size() != n) x.assign(n, 0.0);

    const double bnorm = nrm(b);
    const double target = std::max(opt.abs_tol, opt.rel_tol * bnorm);
    GmresReport rep;

    std::vector<double> r(n), w(n), mz(n);
    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        if (precond) {
            (*precond)(v, mz);
            A(mz, out);
        } else {
            A(v, out);
        }
    };

    // r = b - A x  (x possibly nonzero start)
    A(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    for (int outer = 0; outer < opt.max_outer; ++outer) {
        double beta = nrm(r);
        rep.residual = beta;
        if (beta <= target) {
            rep.converged = true;
            return rep;
        }
        const int m = opt.restart;
        std::vector<std::vector<double>> V;
        V.reserve(static_cast<std::size_t>(m) + 1);
        V.push_back(r);
        for (auto& v : V[0]) v /= beta;
        std::vector<std::vector<double>> H(static_cast<std::size_t>(m) + 1,
                                           std::vector<double>(static_cast<std::size_t>(m), 0.0));
        std::vector<double> cs(m, 0.0), sn(m, 0.0), g(static_cast<std::size_t>(m) + 1, 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < m; ++k) {
            apply(V[static_cast<std::size_t>(k)], w);
            // modified Gram-Schmidt
            for (int i = 0; i <= k; ++i) {
                const double hik = dot(w, V[static_cast<std::size_t>(i)]);
                H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = hik;
                axpy(-hik, V[static_cast<std::size_t>(i)], w);
            }
            const double hk1 = nrm(w);
            H[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)] = hk1;
            if (hk1 > 0) {
                V.push_back(w);
                for (auto& v : V.back()) v /= hk1;
            }
            // Givens updates
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                 sn[i] * H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
                H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] =
                    -sn[i] * H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                    cs[i] * H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
                H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = t;
            }
            const double hkk = H[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
            const double denom = std::hypot(hkk, hk1);
            if (denom == 0) {
                cs[k] = 1;
                sn[k] = 0;
            } else {
                cs[k] = hkk / denom;
                sn[k] = hk1 / denom;
            }
            H[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = denom;
            g[static_cast<std::size_t>(k) + 1] = -sn[k] * g[static_cast<std::size_t>(k)];
            g[static_cast<std::size_t>(k)] = cs[k] * g[static_cast<std::size_t>(k)];
            ++rep.iterations;
            if (std::abs(g[static_cast<std::size_t>(k) + 1]) <= target || hk1 == 0.0) {
                ++k;
                break;
            }
        }
        // back substitution
        std::vector<double> y(static_cast<std::size_t>(k), 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                s -= H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        std::vector<double> dx(n, 0.0);
        for (int i = 0; i < k; ++i) axpy(y[static_cast<std::size_t>(i)], V[static_cast<std::size_t>(i)], dx);
        if (precond) {
            (*precond)(dx, mz);
            for (std::size_t i = 0; i < n; ++i) x[i] += mz[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
        }
        A(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        rep.residual = nrm(r);
        if (rep.residual <= target) {
            rep.converged = true;
            return rep;
        }
    }
    return rep;
}

} // namespace fgm
