//==============================================================================
// fgm.cpp
// Batch front-end. Subcommands:
//   green         Green-function constants and profile table
//   ground-state  solve U, emit profile + summary
//   reduce        multi-bump diagnostics at a given configuration
//   minimize      interaction-energy minimization (predicted spike locations)
//   solve         full pipeline to the nonlinear solution (u, v)
//   verify        re-read a saved solution and recheck residuals refined
//   sweep         cross product of s x eps, aggregated summary
// Exit codes: 0 success, 1 numerical failure, 2 invalid input.
// FGM_THREADS bounds the sweep worker pool. File formats: docs/formats.md.
//==============================================================================

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fgm/fgm.hpp"
#include "fgm/io.hpp"
#include "fgm/svg.hpp"

namespace fs = std::filesystem;
using fgm::json;

namespace {

struct CommonOpts {
    double s = 0.75;
    double eps = 0.02;
    int m = 1;
    double eta = 0.1;
    bool odd = false;
    std::size_t n = 1 << 14;
    double L = 200.0;
    bool auto_grid = false;
    std::string output_dir = "out";
    bool emit_plots = false;
};

fgm::Grid1D pick_grid(const CommonOpts& c) {
    if (c.auto_grid) return fgm::recommended_grid(c.eps);
    return fgm::Grid1D(c.n, c.L);
}

json meta() {
    return json{{"tool", "fgm"}, {"format_version", 1}};
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw fgm::invalid_parameter_error("empty list: " + text);
    return out;
}

// ---------------------------------------------------------------------------

int cmd_green(const CommonOpts& c, double x_lo, double x_hi, int points) {
    const fs::path dir(c.output_dir);
    auto e = fgm::green_constants(c.s);
    auto ff = fgm::green_far_field_fit(c.s);
    json doc = meta();
    doc["s"] = c.s;
    doc["a0"] = e.a0 ? json(*e.a0) : json(nullptr);
    doc["a1"] = e.a1 ? json(*e.a1) : json(nullptr);
    doc["a2"] = e.a2 ? json(*e.a2) : json(nullptr);
    doc["gamma_far"] = ff.gamma;
    doc["remainder_exponent"] = e.remainder_exponent;
    fgm::write_json(dir / "green_constants.json", doc);

    std::string csv = "x,G,expansion,abs_diff\n";
    char buf[160];
    for (int i = 0; i < points; ++i) {
        const double x = x_lo * std::pow(x_hi / x_lo, i / double(points - 1));
        const double G = fgm::green_eval(c.s, x);
        double expn;
        if (e.a2)
            expn = -std::log(x) / M_PI + *e.a2;
        else
            expn = *e.a0 + *e.a1 * std::pow(x, 2.0 * c.s - 1.0);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, G, expn, std::abs(G - expn));
        csv += buf;
    }
    fgm::atomic_write(dir / "green.csv", csv);
    std::cout << "green: wrote " << (dir / "green_constants.json").string() << " and green.csv\n";
    return 0;
}

int cmd_ground_state(const CommonOpts& c) {
    const fs::path dir(c.output_dir);
    fgm::Grid1D grid = pick_grid(c);
    auto gs = fgm::cached_ground_state(c.s, grid);
    fgm::write_field_csv(dir / "ground_state.csv", gs->field);
    json doc = meta();
    doc["s"] = c.s;
    doc["peak"] = gs->peak;
    doc["mass_u2"] = gs->mass_u2;
    doc["mass_u3"] = gs->mass_u3;
    doc["tail_coeff"] = gs->tail_coeff;
    doc["tail_exponent"] = gs->tail_exponent;
    doc["residual"] = gs->residual;
    doc["grid"] = {{"n", grid.n}, {"L", grid.half_length}};
    fgm::write_json(dir / "ground_state.json", doc);
    if (c.emit_plots) {
        fgm::SvgSeries ser;
        for (std::size_t j = grid.n / 2; j < grid.n; ++j) {
            const double x = grid.x(j);
            if (x < 1.0 || gs->field[j] <= 0) continue;
            ser.x.push_back(x);
            ser.y.push_back(gs->field[j]);
        }
        fgm::atomic_write(dir / "ground_state_tail.svg",
                          fgm::svg_line_chart({ser}, "ground state tail (log-log)", true));
    }
    std::cout << "ground-state: residual " << gs->residual << ", mass_u2 " << gs->mass_u2 << "\n";
    return 0;
}

struct PipelineOut {
    std::shared_ptr<const fgm::GroundState> gs;
    fgm::FracParams params;
    fgm::InteractionConstants ic;
    fgm::SpikeConfig config;
    fgm::MinimizeReport mrep;
};

PipelineOut run_reduction_pipeline(const CommonOpts& c, const fgm::Grid1D& grid,
                                   const std::vector<double>* positions) {
    PipelineOut p;
    p.gs = fgm::cached_ground_state(c.s, grid);
    const int k = c.odd ? 2 * c.m + 1 : 2 * c.m;
    p.params = fgm::FracParams::make(c.s, c.eps, k, p.gs->mass_u2);
    p.ic = fgm::cached_constants({c.s, k, 0.0});
    const fgm::Parity parity = c.odd ? fgm::Parity::odd_k : fgm::Parity::even_k;
    if (positions) {
        p.config = fgm::SpikeConfig(*positions, parity);
    } else {
        auto [cfg, rep] = fgm::minimize_xi(p.params, p.ic, c.m, c.eta, *p.gs, parity);
        p.config = cfg;
        p.mrep = rep;
    }
    return p;
}

int cmd_reduce(const CommonOpts& c, const std::string& positions_text) {
    const fs::path dir(c.output_dir);
    fgm::Grid1D grid = pick_grid(c);
    std::vector<double> positions;
    const bool explicit_pos = !positions_text.empty();
    if (explicit_pos) positions = parse_list(positions_text);
    auto p = run_reduction_pipeline(c, grid, explicit_pos ? &positions : nullptr);

    auto ctx = fgm::build_context(p.params, *p.gs, p.config, grid);
    auto proj = fgm::project_error(ctx);
    auto rf = fgm::reduced_force(p.config, p.params, p.ic.alpha, p.ic.beta, *p.gs);
    auto bpb = fgm::per_bump_forces(p.config, p.params, p.ic.alpha, p.ic.beta, *p.gs);
    fgm::Field S = fgm::error_term(ctx);
    const double snorm = fgm::weighted_norm(S, p.config, ctx.mu);

    json doc = meta();
    doc["s"] = c.s;
    doc["eps"] = c.eps;
    doc["k"] = p.params.k;
    doc["positions"] = p.config.full_positions();
    doc["projections"] = proj;
    doc["reduced_forces"] = rf;
    doc["per_bump_forces"] = bpb;
    doc["weighted_error_norm"] = snorm;
    doc["s_identity_gap"] = ctx.s_identity_gap;
    doc["in_asymptotic_range"] = fgm::separations_in_range(p.config);
    json vats = json::array();
    for (double q : p.config.full_positions()) vats.push_back(ctx.V.at_x(q));
    doc["V_at_spikes"] = vats;
    fgm::write_json(dir / "reduce.json", doc);

    std::vector<double> xs(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) xs[j] = grid.x(j);
    fgm::write_columns_csv(dir / "profiles.csv", {"W", "V", "S"}, xs,
                           {&ctx.W.values, &ctx.V.values, &S.values});
    std::cout << "reduce: ||S||_* = " << snorm << "\n";
    return 0;
}

int cmd_minimize(const CommonOpts& c) {
    const fs::path dir(c.output_dir);
    fgm::Grid1D grid = fgm::recommended_grid(fgm::default_eps_ref(c.s), 800.0);
    auto gs = fgm::cached_ground_state(c.s, grid);
    const int k = c.odd ? 2 * c.m + 1 : 2 * c.m;
    auto params = fgm::FracParams::make(c.s, c.eps, k, gs->mass_u2);
    auto ic = fgm::cached_constants({c.s, k, 0.0});
    const fgm::Parity parity = c.odd ? fgm::Parity::odd_k : fgm::Parity::even_k;
    auto [cfg, rep] = fgm::minimize_xi(params, ic, c.m, c.eta, *gs, parity);

    json doc = meta();
    doc["s"] = c.s;
    doc["eps"] = c.eps;
    doc["m"] = c.m;
    doc["eta"] = c.eta;
    doc["positions"] = cfg.half_positions;
    doc["rescaled"] = fgm::rescale_config(cfg, params);
    doc["xi"] = rep.xi;
    doc["grad_norm"] = rep.grad_norm;
    doc["boundary_margin"] = rep.boundary_margin;
    doc["constants"] = {{"alpha", ic.alpha}, {"beta", ic.beta}, {"gamma", ic.gamma}};
    fgm::write_json(dir / "minimize.json", doc);

    std::string csv = "iter";
    for (int i = 1; i <= c.m; ++i) csv += ",q" + std::to_string(i);
    csv += "\n";
    char buf[64];
    for (std::size_t it = 0; it < rep.trace.size(); ++it) {
        csv += std::to_string(it);
        for (double q : rep.trace[it]) {
            std::snprintf(buf, sizeof buf, ",%.17g", q);
            csv += buf;
        }
        csv += "\n";
    }
    fgm::atomic_write(dir / "minimize_trace.csv", csv);
    std::cout << "minimize: q = [";
    for (double q : cfg.half_positions) std::cout << " " << q;
    std::cout << " ], xi = " << rep.xi << "\n";
    return 0;
}

int cmd_solve(const CommonOpts& c) {
    const fs::path dir(c.output_dir);
    fgm::Grid1D grid = pick_grid(c);
    auto p = run_reduction_pipeline(c, grid, nullptr);
    auto ctx = fgm::build_context(p.params, *p.gs, p.config, grid);
    auto ls = fgm::lyapunov_schmidt_solve(ctx);
    fgm::Field seed = ctx.W + ls.phi;
    auto pair = fgm::newton_full(ctx, &seed);
    auto rep = fgm::verify_solution(pair, ctx);

    std::vector<double> xs(grid.n), umw(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        xs[j] = grid.x(j);
        umw[j] = pair.u[j] - ctx.W[j];
    }
    fgm::write_columns_csv(dir / "solution.csv", {"u", "v", "W", "u_minus_W"}, xs,
                           {&pair.u.values, &pair.v.values, &ctx.W.values, &umw});

    json doc = meta();
    doc["s"] = c.s;
    doc["eps"] = c.eps;
    doc["k"] = p.params.k;
    doc["grid"] = {{"n", grid.n}, {"L", grid.half_length}};
    doc["predicted_positions"] = p.config.half_positions;
    doc["ls"] = {{"c", ls.c},
                 {"iterations", ls.iterations},
                 {"residual", ls.residual},
                 {"star_norm_phi", ls.star_norm_phi}};
    doc["newton"] = {{"residual_u", pair.residual_u},
                     {"residual_v", pair.residual_v},
                     {"iterations", pair.newton_iterations}};
    doc["verify"] = {{"sup_u_deviation", rep.sup_u_deviation},
                     {"v_plateau_deviation", rep.v_plateau_deviation},
                     {"maxima_count", rep.maxima_count},
                     {"fitted_positions", rep.fitted_positions},
                     {"spike_heights", rep.spike_heights},
                     {"max_position_mismatch", rep.max_position_mismatch}};
    fgm::write_json(dir / "solve.json", doc);

    std::string csv = "iter,residual\n";
    char buf[64];
    for (std::size_t i = 0; i < pair.residual_history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, pair.residual_history[i]);
        csv += buf;
    }
    fgm::atomic_write(dir / "solve_trace.csv", csv);
    std::cout << "solve: residuals " << pair.residual_u << " / " << pair.residual_v << ", "
              << rep.maxima_count << " maxima\n";
    return 0;
}

// spectral upsampling by zero padding (factor 2)
fgm::Field upsample2(const fgm::Field& f) {
    const std::size_t n = f.grid.n;
    fgm::RealFft fft(n);
    std::vector<std::complex<double>> sp(fft.spectrum_size());
    fft.forward(f.values.data(), sp.data());
    fgm::Grid1D g2(2 * n, f.grid.half_length);
    fgm::RealFft fft2(2 * n);
    std::vector<std::complex<double>> sp2(fft2.spectrum_size(), 0.0);
    for (std::size_t j = 0; j < sp.size(); ++j) sp2[j] = sp[j] * 2.0; // 1/n normalization shift
    sp2[n / 2] *= 0.5; // split Nyquist
    fgm::Field out(g2);
    fft2.backward(sp2.data(), out.values.data());
    return out;
}

int cmd_verify(const CommonOpts& c, const std::string& from_dir) {
    const fs::path src = from_dir.empty() ? fs::path(c.output_dir) : fs::path(from_dir);
    // re-read u, v columns of solution.csv
    std::ifstream in(src / "solution.csv");
    if (!in) throw fgm::invalid_input("verify: cannot open " + (src / "solution.csv").string());
    std::string line;
    std::getline(in, line);
    std::vector<double> xs, us, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() < 3) throw fgm::invalid_input("verify: malformed solution.csv row");
        xs.push_back(row[0]);
        us.push_back(row[1]);
        vs.push_back(row[2]);
    }
    const std::size_t n = xs.size();
    fgm::Grid1D grid(n, 0.5 * (xs[1] - xs[0]) * static_cast<double>(n));
    fgm::Field u(grid, us), v(grid, vs);

    // tau recovered from the saved v: the second equation is linear in tau
    auto gs = fgm::cached_ground_state(c.s, grid);
    const int k = c.odd ? 2 * c.m + 1 : 2 * c.m;
    auto params = fgm::FracParams::make(c.s, c.eps, k, gs->mass_u2);

    auto residuals = [&](const fgm::Field& uu, const fgm::Field& vv) {
        fgm::Field r1 = fgm::fractional_laplacian(uu, c.s);
        double m1 = 0;
        for (std::size_t j = 0; j < uu.grid.n; ++j)
            m1 = std::max(m1, std::abs(r1[j] + uu[j] - uu[j] * uu[j] / vv[j]));
        fgm::Field r2 = fgm::fractional_laplacian(vv, c.s);
        const double mm = std::pow(c.eps, 2.0 * c.s);
        double m2 = 0;
        for (std::size_t j = 0; j < uu.grid.n; ++j)
            m2 = std::max(m2, std::abs(r2[j] + mm * vv[j] - params.tau_eps * uu[j] * uu[j]));
        return std::pair<double, double>{m1, m2};
    };
    auto [r1, r2] = residuals(u, v);
    auto [r1f, r2f] = residuals(upsample2(u), upsample2(v));

    json doc = meta();
    doc["source"] = (src / "solution.csv").string();
    doc["residual_u"] = r1;
    doc["residual_v"] = r2;
    doc["residual_u_refined"] = r1f;
    doc["residual_v_refined"] = r2f;
    doc["grid"] = {{"n", n}, {"L", grid.half_length}};
    fgm::write_json(fs::path(c.output_dir) / "verify.json", doc);
    std::cout << "verify: residuals " << r1 << " / " << r2 << " (refined " << r1f << " / " << r2f
              << ")\n";
    return 0;
}

int cmd_sweep(const CommonOpts& c, const std::string& s_list, const std::string& eps_list) {
    const fs::path dir(c.output_dir);
    auto svals = parse_list(s_list);
    auto evals = parse_list(eps_list);
    struct Job {
        double s, eps;
    };
    std::vector<Job> jobs;
    for (double sv : svals)
        for (double ev : evals) jobs.push_back({sv, ev});

    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("FGM_THREADS")) {
        const long w = std::strtol(env, nullptr, 10);
        if (w >= 1) workers = static_cast<std::size_t>(w);
    }
    workers = std::min(workers, jobs.size());

    struct Row {
        double s, eps, decay, alpha, beta, gamma, q1, xi, snorm;
        std::string error;
    };
    std::vector<Row> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto [sv, ev] = jobs[i];
            Row row{};
            row.s = sv;
            row.eps = ev;
            try {
                CommonOpts cc = c;
                cc.s = sv;
                cc.eps = ev;
                fgm::Grid1D grid = fgm::recommended_grid(ev, 800.0);
                auto p = run_reduction_pipeline(cc, grid, nullptr);
                auto ctx = fgm::build_context(p.params, *p.gs, p.config, grid);
                fgm::Field S = fgm::error_term(ctx);
                row.decay = p.gs->tail_exponent;
                row.alpha = p.ic.alpha;
                row.beta = p.ic.beta;
                row.gamma = p.ic.gamma;
                row.q1 = p.config.half_positions[0];
                row.xi = p.mrep.xi;
                row.snorm = fgm::weighted_norm(S, p.config, ctx.mu);
                char sub[80];
                std::snprintf(sub, sizeof sub, "s_%g_eps_%g", sv, ev);
                json doc = meta();
                doc["s"] = sv;
                doc["eps"] = ev;
                doc["positions"] = p.config.half_positions;
                doc["xi"] = row.xi;
                doc["weighted_error_norm"] = row.snorm;
                fgm::write_json(dir / sub / "entry.json", doc);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string csv = "s,eps,decay_exponent,alpha,beta,gamma,q1,xi,star_norm_S,error\n";
    char buf[320];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g,%s\n", r.s,
                      r.eps, r.decay, r.alpha, r.beta, r.gamma, r.q1, r.xi, r.snorm,
                      r.error.c_str());
        csv += buf;
    }
    fgm::atomic_write(dir / "summary.csv", csv);
    std::cout << "sweep: " << jobs.size() << " entries -> " << (dir / "summary.csv").string()
              << "\n";
    for (const auto& r : rows)
        if (!r.error.empty()) throw fgm::numerical_error("sweep entry failed: " + r.error);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for fractional activator-inhibitor spike patterns"};
    app.set_config("--config-file", "", "flat key=value configuration file");
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand name

    CommonOpts c;
    app.add_option("--s", c.s, "fractional order s in [1/2, 1)")->capture_default_str();
    app.add_option("--eps", c.eps, "diffusion ratio eps")->capture_default_str();
    app.add_option("--m", c.m, "free spike count (half configuration)")->capture_default_str();
    app.add_option("--eta", c.eta, "window parameter eta")->capture_default_str();
    app.add_flag("--odd", c.odd, "odd bump count (extra spike pinned at 0)");
    app.add_option("--n", c.n, "grid points (power of two)")->capture_default_str();
    app.add_option("--L", c.L, "half length of the periodic box")->capture_default_str();
    app.add_flag("--auto-grid", c.auto_grid, "size the box from eps instead of --n/--L");
    app.add_option("-o,--output-dir", c.output_dir, "output directory")->capture_default_str();
    app.add_flag("--emit-plots", c.emit_plots, "also write SVG charts");

    auto* green = app.add_subcommand("green", "Green function constants and table");
    double x_lo = 1e-4, x_hi = 10.0;
    int points = 200;
    green->add_option("--x-lo", x_lo, "smallest tabulated x")->capture_default_str();
    green->add_option("--x-hi", x_hi, "largest tabulated x")->capture_default_str();
    green->add_option("--points", points, "table rows")->capture_default_str();

    app.add_subcommand("ground-state", "solve the single-bump profile");

    auto* reduce = app.add_subcommand("reduce", "multi-bump diagnostics");
    std::string positions_text;
    reduce->add_option("--config", positions_text,
                       "comma-separated half positions q1>q2>...>qm (default: minimizer)");

    app.add_subcommand("minimize", "interaction-energy minimization");
    app.add_subcommand("solve", "full nonlinear solve");

    auto* verify = app.add_subcommand("verify", "recheck a saved solution");
    std::string from_dir;
    verify->add_option("--dir", from_dir, "directory holding solution.csv (default output dir)");

    auto* sweep = app.add_subcommand("sweep", "cross product of s and eps");
    std::string s_list = "0.75", eps_list = "0.02";
    sweep->add_option("--s-list", s_list, "comma-separated s values")->capture_default_str();
    sweep->add_option("--eps-list", eps_list, "comma-separated eps values")->capture_default_str();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("green")) return cmd_green(c, x_lo, x_hi, points);
        if (app.got_subcommand("ground-state")) return cmd_ground_state(c);
        if (app.got_subcommand("reduce")) return cmd_reduce(c, positions_text);
        if (app.got_subcommand("minimize")) return cmd_minimize(c);
        if (app.got_subcommand("solve")) return cmd_solve(c);
        if (app.got_subcommand("verify")) return cmd_verify(c, from_dir);
        if (app.got_subcommand("sweep")) return cmd_sweep(c, s_list, eps_list);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cerr << json{{"error", "parse"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const fgm::invalid_input& e) {
        std::cerr << json{{"error", "invalid_input"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const fgm::numerical_error& e) {
        std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}
