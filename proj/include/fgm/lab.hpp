//==============================================================================
// lab.hpp
// Orchestration shared by the CLI and the acceptance suite: grid selection,
// caching of solved ground states and calibrated constants, and the standard
// pipeline ground state -> calibrate -> minimize -> project/solve.
//
// Grid policy: the inhibitor varies on the scale 1/eps, so the box must hold
// several of those lengths; the activator needs spacing ~ 0.05. Callers can
// override both.
//==============================================================================
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fgm/reduced.hpp"
#include "fgm/solver.hpp"

namespace fgm {

inline std::size_t next_pow2(double x) {
    std::size_t n = 8;
    while (static_cast<double>(n) < x && n < (1ull << 22)) n <<= 1;
    return n;
}

// box big enough for the inhibitor scale and fine enough for the bumps
inline Grid1D recommended_grid(double eps, double min_L = 250.0, double target_h = 0.05) {
    const double L = std::max(min_L, 5.0 / eps);
    const std::size_t n = next_pow2(2.0 * L / target_h);
    return Grid1D(n, L);
}

// process-wide ground-state cache keyed by (s, n, L)
inline std::shared_ptr<const GroundState> cached_ground_state(double s, const Grid1D& grid) {
    using Key = std::tuple<double, std::size_t, double>;
    static std::mutex mtx;
    static std::map<Key, std::shared_ptr<const GroundState>> cache;
    const Key key{s, grid.n, grid.half_length};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto gs = std::make_shared<const GroundState>(solve_ground_state(s, grid));
    std::lock_guard<std::mutex> lock(mtx);
    return cache.emplace(key, gs).first->second;
}

// constants calibrated once per (s, k) at a reference eps and reused across
// eps (they are eps-independent by construction)
struct ConstantsRequest {
    double s = 0;
    int k = 2;
    double eps_ref = 0; // 0 -> default per branch
};

inline double default_eps_ref(double s) { return std::abs(s - 0.5) < 1e-12 ? 1e-3 : 1e-2; }

inline InteractionConstants cached_constants(const ConstantsRequest& req) {
    using Key = std::tuple<double, int, double>;
    static std::mutex mtx;
    static std::map<Key, InteractionConstants> cache;
    const double eps_ref = req.eps_ref > 0 ? req.eps_ref : default_eps_ref(req.s);
    const Key key{req.s, req.k, eps_ref};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Grid1D grid = recommended_grid(eps_ref, 800.0);
    auto gs = cached_ground_state(req.s, grid);
    auto params = FracParams::make(req.s, eps_ref, req.k, gs->mass_u2);
    auto ic = calibrate_constants(*gs, params);
    std::lock_guard<std::mutex> lock(mtx);
    return cache.emplace(key, ic).first->second;
}

} // namespace fgm
