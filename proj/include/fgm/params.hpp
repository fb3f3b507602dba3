//==============================================================================
// params.hpp
// Problem parameters (s, eps, k) and the derived rescaling constants:
//   tau_eps — the height normalization making the inhibitor ~ 1 at spikes,
//   omega   — 1 / (k \int U^2), the nonlocal coefficient of the linearization.
// tau_eps depends on \int U^2, so FracParams is assembled after the ground
// state is solved.
//==============================================================================
#pragma once

#include <cmath>

#include "fgm/errors.hpp"

namespace fgm {

inline double window_scale(double s, double eps) {
    if (std::abs(s - 0.5) < 1e-12) return std::sqrt(std::log(1.0 / eps));
    return std::pow(eps, (1.0 - 2.0 * s) / (4.0 * s));
}

struct FracParams {
    double s = 0;
    double eps = 0;
    int k = 0;          // total number of bumps
    double tau_eps = 0;
    double omega = 0;
    double mass_u2 = 0; // \int U^2 on the solve grid

    static FracParams make(double s, double eps, int k, double mass_u2) {
        if (!(s >= 0.5 && s < 1.0))
            throw invalid_parameter_error("FracParams: s must lie in [1/2, 1)");
        if (!(eps > 0.0 && eps < 1.0))
            throw invalid_parameter_error("FracParams: eps must lie in (0, 1)");
        if (k < 1) throw invalid_parameter_error("FracParams: k must be positive");
        if (!(mass_u2 > 0)) throw invalid_parameter_error("FracParams: mass_u2 must be positive");
        FracParams p;
        p.s = s;
        p.eps = eps;
        p.k = k;
        p.mass_u2 = mass_u2;
        if (std::abs(s - 0.5) < 1e-12) {
            p.tau_eps = M_PI / (static_cast<double>(k) * std::log(1.0 / eps) * mass_u2);
        } else {
            const double a0 = 1.0 / (2.0 * s * std::sin(M_PI / (2.0 * s)));
            p.tau_eps = 1.0 / (static_cast<double>(k) * a0 * std::pow(eps, 1.0 - 2.0 * s) * mass_u2);
        }
        p.omega = 1.0 / (static_cast<double>(k) * mass_u2);
        return p;
    }

    double scale() const { return window_scale(s, eps); }
    bool is_half() const { return std::abs(s - 0.5) < 1e-12; }
};

} // namespace fgm
