#include <catch2/catch_amalgamated.hpp>

#include "fgm/lab.hpp"

using namespace fgm;

namespace {

struct Setup {
    std::shared_ptr<const GroundState> gs;
    FracParams params;
    InteractionConstants ic;
};

Setup setup_half(double eps = 1e-3) {
    Grid1D grid = recommended_grid(1e-3);
    auto gs = cached_ground_state(0.5, grid);
    auto params = FracParams::make(0.5, eps, 2, gs->mass_u2);
    auto ic = cached_constants({0.5, 2, 1e-3});
    return {gs, params, ic};
}

Setup setup_34(double eps = 1e-2) {
    Grid1D grid = recommended_grid(1e-2, 800.0);
    auto gs = cached_ground_state(0.75, grid);
    auto params = FracParams::make(0.75, eps, 2, gs->mass_u2);
    auto ic = cached_constants({0.75, 2, 1e-2});
    return {gs, params, ic};
}

} // namespace

TEST_CASE("calibration lands in the expected range and is stable") {
    auto st = setup_half();
    // U-term coefficient: int U^2 (= 2 pi at s=1/2) inflated by the desk-scale
    // inhibitor sag; the repulsive coefficient stays positive
    CHECK(st.ic.alpha > 2.0 * M_PI * 0.95);
    CHECK(st.ic.alpha < 2.0 * M_PI * 1.6);
    CHECK(st.ic.beta > 0.0);
    CHECK(st.ic.gamma * st.ic.beta == Catch::Approx(st.ic.alpha).margin(0.0));
    CHECK(st.ic.calibration.resid_alpha <= 0.15);
    CHECK(st.ic.calibration.resid_beta <= 0.30);

    // doubling the ladder moves alpha by less than 10%
    auto opts = default_calibrate_options(0.5);
    for (auto& c : opts.ladder_in_scale) c *= 2.0;
    auto ic2 = calibrate_constants(*st.gs, st.params, opts);
    CHECK(std::abs(ic2.alpha - st.ic.alpha) / st.ic.alpha < 0.10);
}

TEST_CASE("beta carries the bump-count rescaling") {
    auto st = setup_34();
    auto p4 = FracParams::make(0.75, 1e-2, 4, st.gs->mass_u2);
    auto ic4 = calibrate_constants(*st.gs, p4);
    CHECK(ic4.alpha == Catch::Approx(st.ic.alpha).margin(1e-12));
    CHECK(ic4.beta == Catch::Approx(0.5 * st.ic.beta).margin(1e-12));
}

TEST_CASE("the one-pair energy reduces to the self-mirror term") {
    auto st = setup_34();
    SpikeConfig cfg({6.0});
    const double xi = xi_energy(cfg, st.params, st.ic, *st.gs);
    const double r = 12.0;
    const double manual = st.ic.alpha * st.gs->eval(r) +
                          st.ic.beta * std::pow(st.params.eps, 0.5) * std::pow(r, 0.5);
    CHECK(xi == Catch::Approx(manual).margin(1e-14));
    CHECK_THROWS_AS(xi_energy(SpikeConfig({5.0, 5.0 - 1e-13}), st.params, st.ic, *st.gs),
                    singular_configuration_error);
}

TEST_CASE("pair sums are order-independent") {
    auto st = setup_34();
    SpikeConfig cfg({9.0, 4.0, 2.0});
    const double xi = xi_energy(cfg, st.params, st.ic, *st.gs);
    // manual re-summation in the opposite order
    const auto& q = cfg.half_positions;
    auto F = [&](double r) {
        return st.ic.alpha * st.gs->eval(r) +
               st.ic.beta * std::pow(st.params.eps, 0.5) * std::pow(r, 0.5);
    };
    double manual = 0;
    for (int i = 2; i >= 0; --i) manual += F(2.0 * q[static_cast<std::size_t>(i)]);
    for (int i = 2; i >= 0; --i)
        for (int j = 2; j >= 0; --j) {
            if (i == j) continue;
            manual += F(std::abs(q[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(j)])) +
                      F(q[static_cast<std::size_t>(i)] + q[static_cast<std::size_t>(j)]);
        }
    CHECK(xi == Catch::Approx(manual).margin(1e-12));
}

TEST_CASE("the one-bump half energy has a single interior minimum") {
    auto st = setup_half(1e-4);
    ReducedWindow win(0.5, 1e-4, 0.1);
    int sign_changes = 0;
    double prev = 0;
    bool have_prev = false;
    for (int i = 0; i < 200; ++i) {
        const double q = win.lo() + (win.hi() - win.lo()) * (i + 0.5) / 200.0;
        const double g = xi_gradient(SpikeConfig({q}), st.params, st.ic, *st.gs)[0];
        if (have_prev && g * prev < 0) ++sign_changes;
        prev = g;
        have_prev = true;
    }
    CHECK(sign_changes == 1);
}

TEST_CASE("gradient matches finite differences and the reduced force") {
    auto st = setup_34();
    SpikeConfig cfg({7.0, 3.0});
    auto grad = xi_gradient(cfg, st.params, st.ic, *st.gs);
    const double step = 1e-5 * st.params.scale();
    for (int j = 0; j < 2; ++j) {
        auto qp = cfg.half_positions, qm = cfg.half_positions;
        qp[static_cast<std::size_t>(j)] += step;
        qm[static_cast<std::size_t>(j)] -= step;
        const double fd = (xi_energy(SpikeConfig(qp), st.params, st.ic, *st.gs) -
                           xi_energy(SpikeConfig(qm), st.params, st.ic, *st.gs)) /
                          (2.0 * step);
        CHECK(grad[static_cast<std::size_t>(j)] ==
              Catch::Approx(fd).epsilon(1e-6));
    }
    auto rf = reduced_force(cfg, st.params, st.ic.alpha, st.ic.beta, *st.gs);
    for (int j = 0; j < 2; ++j)
        CHECK(grad[static_cast<std::size_t>(j)] ==
              Catch::Approx(rf[static_cast<std::size_t>(j)]).margin(1e-10));
}

TEST_CASE("scalar model") {
    CHECK(scalar_model(2.0).x_min == Catch::Approx(1.0));
    CHECK(scalar_model(0.5).x_min == Catch::Approx(2.0));
    const auto sm = scalar_model(0.37);
    const double direct = std::pow(sm.x_min, -2.0) + 0.37 * std::log(sm.x_min);
    CHECK(sm.value == Catch::Approx(direct).margin(1e-15));
    CHECK_THROWS_AS(scalar_model(0.0), domain_error);
    CHECK_THROWS_AS(scalar_model(-1.0), domain_error);
}

TEST_CASE("rescaling round-trips and uses the right scale factors") {
    auto st = setup_34();
    auto p = FracParams::make(0.75, 1e-3, 2, st.gs->mass_u2);
    CHECK(p.scale() == Catch::Approx(std::pow(10.0, 0.5)).epsilon(1e-12)); // eps^{-1/6}
    auto ph = FracParams::make(0.5, 1e-4, 2, st.gs->mass_u2);
    CHECK(ph.scale() == Catch::Approx(std::sqrt(std::log(1e4))).epsilon(1e-12));

    SpikeConfig cfg({7.0, 3.0});
    auto d = rescale_config(cfg, p);
    auto back = unscale_config(d, p);
    for (int i = 0; i < 2; ++i)
        CHECK(back.half_positions[static_cast<std::size_t>(i)] ==
              Catch::Approx(cfg.half_positions[static_cast<std::size_t>(i)]).margin(1e-12));
}

TEST_CASE("minimization returns interior minimizers with small gradients") {
    auto st = setup_half();
    for (int m : {1, 2, 3}) {
        auto [cfg, rep] = minimize_xi(st.params, st.ic, m, 0.1, *st.gs);
        INFO("m = " << m);
        CHECK(rep.boundary_margin >= 0.05);
        CHECK(rep.grad_norm <= 1e-8);
        CHECK(rep.interior_starts >= 1);
        // rescaled gaps stay above eta
        auto d = rescale_config(cfg, st.params);
        for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i] - d[i + 1] >= 0.1);
        CHECK(d.back() >= 0.1);
    }
}

TEST_CASE("a nearly empty window has no interior minimum") {
    auto st = setup_half();
    CHECK_THROWS_AS(minimize_xi(st.params, st.ic, 1, 0.9, *st.gs), no_interior_minimum_error);
}

TEST_CASE("boundary values dominate the interior minimum") {
    auto st = setup_half();
    auto [cfg, rep] = minimize_xi(st.params, st.ic, 2, 0.1, *st.gs);
    ReducedWindow win(0.5, st.params.eps, 0.1);
    double worst = 1e300;
    for (int i = 0; i < 40; ++i) {
        const double t = (i + 0.5) / 40.0;
        const double inner = win.lo() + t * (win.hi() - win.lo() - win.gap_min() - 0.2);
        // three boundary faces: q1 at the top, q2 at the bottom, minimal gap
        for (auto qs : {std::vector<double>{win.hi() - 1e-9, inner},
                        std::vector<double>{win.lo() + win.gap_min() + 1e-6, win.lo() + 1e-9},
                        std::vector<double>{inner + win.gap_min() + 1e-9, inner}}) {
            if (!(qs[0] > qs[1] && qs[1] > 0)) continue;
            if (!(qs[0] < win.hi() + 1e-6 && qs[1] > win.lo() - 1e-6)) continue;
            try {
                worst = std::min(worst, xi_energy(SpikeConfig(qs), st.params, st.ic, *st.gs));
            } catch (const invalid_input&) {
            }
        }
    }
    CHECK(worst > rep.xi);
}

TEST_CASE("the minimizer location depends only on the coupling ratio") {
    auto st = setup_half();
    auto ic2 = st.ic;
    ic2.alpha *= 2.0;
    ic2.beta *= 2.0;
    ic2.gamma = ic2.alpha / ic2.beta;
    auto [cfg_a, rep_a] = minimize_xi(st.params, st.ic, 1, 0.1, *st.gs);
    auto [cfg_b, rep_b] = minimize_xi(st.params, ic2, 1, 0.1, *st.gs);
    CHECK(cfg_a.half_positions[0] == Catch::Approx(cfg_b.half_positions[0]).epsilon(1e-6));

    // doubling only beta increases the repulsion: scalar model says the
    // minimizer contracts by about sqrt(1/2)
    auto ic3 = st.ic;
    ic3.beta *= 2.0;
    ic3.gamma = ic3.alpha / ic3.beta;
    auto [cfg_c, rep_c] = minimize_xi(st.params, ic3, 1, 0.1, *st.gs);
    const double ratio = cfg_c.half_positions[0] / cfg_a.half_positions[0];
    CHECK(ratio > 0.58);
    CHECK(ratio < 0.85);
}

TEST_CASE("projections at the minimizer are small against a surrounding scan") {
    Grid1D grid = recommended_grid(1e-3);
    auto gs = cached_ground_state(0.75, grid);
    auto params = FracParams::make(0.75, 1e-3, 2, gs->mass_u2);
    auto ic = cached_constants({0.75, 2, 1e-2});
    auto [cfg, rep] = minimize_xi(params, ic, 1, 0.1, *gs);
    auto ctx = build_context(params, *gs, cfg, grid);
    const double at_min = std::abs(project_error(ctx)[0]);
    double scan_max = 0;
    for (double f : {0.7, 0.85, 1.15, 1.3}) {
        SpikeConfig c({f * cfg.half_positions[0]});
        auto cs = build_context(params, *gs, c, grid);
        scan_max = std::max(scan_max, std::abs(project_error(cs)[0]));
    }
    CHECK(at_min <= 0.3 * scan_max);
}
