//==============================================================================
// grid.hpp
// Uniform periodic grid on [-L, L) and real fields sampled on it.
// The grid is a small value type; fields carry their grid by value so every
// operation can check compatibility cheaply. Serialization: CSV (x,value)
// and a raw binary dump (int64 n, double L, n doubles). Both round-trip
// exactly; CSV uses 17 significant digits.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fgm/errors.hpp"

namespace fgm {

struct Grid1D {
    std::size_t n = 0;      // number of points, power of two, >= 8
    double half_length = 0; // L; domain is [-L, L), periodic

    Grid1D() = default;
    Grid1D(std::size_t n_points, double L) : n(n_points), half_length(L) {
        if (n < 8 || (n & (n - 1)) != 0)
            throw invalid_parameter_error("Grid1D: n must be a power of two >= 8");
        if (!(L > 0))
            throw invalid_parameter_error("Grid1D: half_length must be positive");
    }

    double spacing() const { return 2.0 * half_length / static_cast<double>(n); }
    // x_j = -L + j h, j = 0..n-1; x = 0 sits at j = n/2
    double x(std::size_t j) const { return -half_length + spacing() * static_cast<double>(j); }
    // wavenumber of FFT bin j (half spectrum, j = 0..n/2): xi_j = pi j / L
    double xi(std::size_t j) const { return M_PI * static_cast<double>(j) / half_length; }
    std::size_t index_of(double xv) const {
        auto j = static_cast<long long>(std::llround((xv + half_length) / spacing()));
        j = ((j % static_cast<long long>(n)) + static_cast<long long>(n)) % static_cast<long long>(n);
        return static_cast<std::size_t>(j);
    }

    bool operator==(const Grid1D& o) const { return n == o.n && half_length == o.half_length; }
    bool operator!=(const Grid1D& o) const { return !(*this == o); }
};

struct Field {
    Grid1D grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid1D& g, double fill = 0.0) : grid(g), values(g.n, fill) {}
    Field(const Grid1D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.n)
            throw invalid_field_error("Field: value count does not match grid");
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
    void require_finite(const char* who) const {
        if (!all_finite()) throw invalid_field_error(std::string(who) + ": non-finite field values");
    }

    double max_abs() const {
        double m = 0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double min_value() const {
        double m = values.empty() ? 0.0 : values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }

    // value at the grid point nearest to xv
    double at_x(double xv) const { return values[grid.index_of(xv)]; }

    // reflection x -> -x (index j -> n-j mod n)
    Field reflected() const {
        Field r(grid);
        const std::size_t n = grid.n;
        for (std::size_t j = 0; j < n; ++j) r.values[j] = values[(n - j) % n];
        return r;
    }
    void symmetrize_even() {
        Field r = reflected();
        for (std::size_t j = 0; j < grid.n; ++j) values[j] = 0.5 * (values[j] + r.values[j]);
    }
    double asymmetry() const {
        Field r = reflected();
        double m = 0;
        for (std::size_t j = 0; j < grid.n; ++j) m = std::max(m, std::abs(values[j] - r.values[j]));
        return m;
    }
};

inline void require_same_grid(const Field& a, const Field& b, const char* who) {
    if (a.grid != b.grid)
        throw incompatible_grid_error(std::string(who) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline void save_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw invalid_input("save_csv: cannot open " + path);
    out << "x,value\n";
    char buf[64];
    for (std::size_t j = 0; j < f.grid.n; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid.x(j), f.values[j]);
        out << buf;
    }
}

inline Field load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("load_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw invalid_input("load_csv: malformed line in " + path);
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 8) throw invalid_input("load_csv: too few rows in " + path);
    const std::size_t n = xs.size();
    const double h = xs[1] - xs[0];
    Grid1D g(n, 0.5 * h * static_cast<double>(n));
    return Field(g, std::move(vs));
}

inline void save_binary(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw invalid_input("save_binary: cannot open " + path);
    const std::int64_t n = static_cast<std::int64_t>(f.grid.n);
    const double L = f.grid.half_length;
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

inline Field load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("load_binary: cannot open " + path);
    std::int64_t n = 0;
    double L = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    if (!in || n < 8) throw invalid_input("load_binary: corrupt header in " + path);
    Grid1D g(static_cast<std::size_t>(n), L);
    Field f(g);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!in) throw invalid_input("load_binary: truncated payload in " + path);
    return f;
}

} // namespace fgm
