#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "fgm/green.hpp"
#include "fgm/spectral.hpp"

using namespace fgm;

namespace {

Grid1D ref_grid() { return Grid1D(1 << 14, 200.0); }

Field exact_half_profile(const Grid1D& g) {
    Field u(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        u[j] = 2.0 / (1.0 + x * x);
    }
    return u;
}

// random band-limited smooth field, deterministic seed
Field random_smooth(const Grid1D& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Field f(g);
    for (int mode = 0; mode <= 24; ++mode) {
        const double a = dist(rng) * std::exp(-mode * mode / 80.0);
        const double b = dist(rng) * std::exp(-mode * mode / 80.0);
        for (std::size_t j = 0; j < g.n; ++j) {
            const double th = mode * M_PI * g.x(j) / g.half_length;
            f[j] += a * std::cos(th) + b * std::sin(th);
        }
    }
    return f;
}

} // namespace

TEST_CASE("fractional laplacian kills constants and preserves single modes") {
    Grid1D g(1 << 10, 50.0);
    Field zero(g), cst(g, 3.7);
    CHECK(fractional_laplacian(zero, 0.6).max_abs() == 0.0);
    CHECK(fractional_laplacian(cst, 0.6).max_abs() < 1e-12);

    // cos(pi x / L) is the |j| = 1 mode: multiplier |pi/L|^{2s} = pi/L at s = 1/2
    Field c1(g);
    for (std::size_t j = 0; j < g.n; ++j) c1[j] = std::cos(M_PI * g.x(j) / g.half_length);
    Field out = fractional_laplacian(c1, 0.5);
    const double fac = M_PI / g.half_length;
    double err = 0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(out[j] - fac * c1[j]));
    CHECK(err < 1e-13);
}

TEST_CASE("fractional laplacian rejects bad input") {
    Grid1D g(1 << 8, 10.0);
    Field f(g);
    f[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fractional_laplacian(f, 0.5), invalid_field_error);
    Field ok(g, 1.0);
    CHECK_THROWS_AS(fractional_laplacian(ok, 1.2), invalid_parameter_error);
    CHECK_THROWS_AS(resolvent(ok, 0.5, 0.0), invalid_parameter_error);
    CHECK_THROWS_AS(resolvent(ok, 0.5, -2.0), invalid_parameter_error);
}

TEST_CASE("resolvent of a constant divides by m and round-trips") {
    Grid1D g(1 << 10, 50.0);
    Field cst(g, 2.5);
    Field r = resolvent(cst, 0.75, 1.0);
    for (std::size_t j = 0; j < g.n; j += 97) CHECK(r[j] == Catch::Approx(2.5).margin(1e-12));

    Field f = random_smooth(g, 11);
    for (double s : {0.5, 0.75, 0.9}) {
        Field rf = resolvent(f, s, 0.8);
        Field back = fractional_laplacian(rf, s) + 0.8 * rf;
        double err = 0;
        for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(back[j] - f[j]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("resolvent of the squared exact profile returns the profile") {
    Grid1D g = ref_grid();
    Field u = exact_half_profile(g);
    Field r = resolvent(squared(u), 0.5, 1.0);
    double err = 0;
    for (std::size_t j = 0; j < g.n; ++j) err = std::max(err, std::abs(r[j] - u[j]));
    CHECK(err < 1e-3); // periodic truncation bias dominates
}

TEST_CASE("resolvent of a nonnegative field has positive mean") {
    Grid1D g(1 << 9, 20.0);
    Field f(g);
    f[g.n / 2] = 1.0;
    CHECK(integral(resolvent(f, 0.7, 0.3)) > 0.0);
}

TEST_CASE("self-adjointness of the fractional laplacian") {
    Grid1D g(1 << 11, 80.0);
    Field f = random_smooth(g, 5), h = random_smooth(g, 17);
    for (double s : {0.5, 0.65, 0.9}) {
        const double a = inner_product(fractional_laplacian(f, s), h);
        const double b = inner_product(f, fractional_laplacian(h, s));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)));
    }
}

TEST_CASE("resolvent kernel obeys the eps-scaling identity") {
    // kernel of ((-Delta)^s + eps^{2s})^{-1} equals eps^{1-2s} G(eps x)
    const double s = 0.75, eps = 0.5;
    Grid1D g(1 << 15, 400.0);
    Field delta(g);
    delta[g.n / 2] = 1.0 / g.spacing();
    Field ker = resolvent(delta, s, std::pow(eps, 2.0 * s));
    for (double x : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        const double lhs = ker.at_x(x);
        const double rhs = std::pow(eps, 1.0 - 2.0 * s) * green_eval(s, eps * x);
        // the sampled discrete kernel carries an O(h^{2s}) cusp-aliasing bias
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-2));
    }
}

TEST_CASE("grid refinement leaves the fractional laplacian unchanged") {
    // needs a field that is smooth as a periodic function; the sampled
    // rational profile has a derivative kink at the seam
    const double L = 200.0;
    Grid1D g1(1 << 13, L), g2(1 << 14, L);
    Field u1(g1), u2(g2);
    for (std::size_t j = 0; j < g1.n; ++j) u1[j] = std::exp(-0.5 * g1.x(j) * g1.x(j));
    for (std::size_t j = 0; j < g2.n; ++j) u2[j] = std::exp(-0.5 * g2.x(j) * g2.x(j));
    Field a = fractional_laplacian(u1, 0.75), b = fractional_laplacian(u2, 0.75);
    double change = 0;
    for (std::size_t j = 0; j < g1.n; ++j)
        change = std::max(change, std::abs(a[j] - b[2 * j]));

    // coarse-grid truncation estimate: spectral mass past half the band
    RealFft fft(g1.n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(u1.values.data(), sp.data());
    double tail = 0;
    for (std::size_t j = fft.spectrum_size() / 2; j < fft.spectrum_size(); ++j)
        tail += std::abs(sp[j]) / static_cast<double>(g1.n) * std::pow(g1.xi(j), 1.5);
    CHECK(change <= std::max(tail, 1e-12));
    CHECK(change < 1e-10);
}

TEST_CASE("inner products of the exact profile match closed forms") {
    Grid1D g = ref_grid();
    Field u = exact_half_profile(g);
    CHECK(inner_product(u, u) == Catch::Approx(2.0 * M_PI).epsilon(1e-3));
    CHECK(inner_product(squared(u), u) == Catch::Approx(3.0 * M_PI).epsilon(1e-3));
    CHECK(inner_product(u, u) >= 0.0);
    Field z(g);
    CHECK(inner_product(z, z) == 0.0);

    Grid1D other(1 << 14, 100.0);
    Field w(other);
    CHECK_THROWS_AS(inner_product(u, w), incompatible_grid_error);
}

TEST_CASE("decay fit recovers exact power laws") {
    Grid1D g(1 << 14, 200.0);
    Field f(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        f[j] = x > 0 ? std::pow(x, -2.0) : 1.0;
    }
    auto fit = fit_decay_exponent(f, 10.0, 50.0);
    CHECK(fit.exponent == Catch::Approx(2.0).margin(1e-10));
    CHECK(fit.coefficient == Catch::Approx(1.0).margin(1e-9));

    Field u = exact_half_profile(g);
    auto ufit = fit_decay_exponent(u, 20.0, 100.0);
    CHECK(ufit.exponent == Catch::Approx(2.0).epsilon(0.02));

    Field bad(g); // zeros inside the window
    CHECK_THROWS_AS(fit_decay_exponent(bad, 10.0, 50.0), fit_domain_error);
    CHECK_THROWS_AS(fit_decay_exponent(u, -1.0, 50.0), fit_domain_error);
}

TEST_CASE("csv and binary serialization round-trip") {
    Grid1D g(1 << 8, 12.5);
    Field f = random_smooth(g, 3);
    const auto dir = std::filesystem::temp_directory_path() / "fgm_io_test";
    std::filesystem::create_directories(dir);

    save_binary(f, (dir / "f.bin").string());
    Field fb = load_binary((dir / "f.bin").string());
    REQUIRE(fb.grid == f.grid);
    for (std::size_t j = 0; j < g.n; ++j) REQUIRE(fb[j] == f[j]);

    save_csv(f, (dir / "f.csv").string());
    Field fc = load_csv((dir / "f.csv").string());
    REQUIRE(fc.grid.n == f.grid.n);
    REQUIRE(fc.grid.half_length == Catch::Approx(f.grid.half_length).margin(1e-12));
    for (std::size_t j = 0; j < g.n; ++j) REQUIRE(fc[j] == f[j]); // 17 digits is lossless
}

TEST_CASE("grid constructor validates its invariants") {
    CHECK_THROWS_AS(Grid1D(12, 10.0), invalid_parameter_error); // not a power of two
    CHECK_THROWS_AS(Grid1D(4, 10.0), invalid_parameter_error);  // too small
    CHECK_THROWS_AS(Grid1D(16, 0.0), invalid_parameter_error);
    Grid1D g(16, 8.0);
    CHECK(g.spacing() == Catch::Approx(1.0));
    CHECK(g.x(8) == 0.0);
    CHECK(g.xi(1) == Catch::Approx(M_PI / 8.0));
}
