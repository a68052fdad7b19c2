#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "achlab/errors.hpp"

namespace ach {

// periodic cell-centered grid on a flat torus, n = 1 or 2
struct TorusGrid {
    int n = 1;
    std::array<int, 2> shape{8, 1};
    std::array<double, 2> lengths{1.0, 1.0};

    static TorusGrid line(int cells, double length = 1.0) {
        TorusGrid g;
        g.n = 1;
        g.shape = {cells, 1};
        g.lengths = {length, 1.0};
        g.validate();
        return g;
    }
    static TorusGrid square(int cells_x, int cells_y, double Lx = 1.0, double Ly = 1.0) {
        TorusGrid g;
        g.n = 2;
        g.shape = {cells_x, cells_y};
        g.lengths = {Lx, Ly};
        g.validate();
        return g;
    }

    void validate() const {
        for (int k = 0; k < n; ++k) {
            if (shape[k] < 8) throw ConfigError("grid shape must be >= 8 per axis");
            if (lengths[k] <= 0) throw ConfigError("torus lengths must be positive");
        }
    }

    double h(int k) const { return lengths[k] / shape[k]; }
    long cells() const { return n == 1 ? shape[0] : long(shape[0]) * shape[1]; }
    double cell_measure() const {
        double m = 1;
        for (int k = 0; k < n; ++k) m *= h(k);
        return m;
    }
    // row-major: cell = i0 * shape[1] + i1 (n=2), cell = i0 (n=1)
    long index(int i0, int i1 = 0) const {
        return n == 1 ? i0 : long(i0) * shape[1] + i1;
    }
    int wrap(int i, int k) const {
        int s = shape[k];
        i %= s;
        return i < 0 ? i + s : i;
    }
    void coords(long cell, int& i0, int& i1) const {
        if (n == 1) {
            i0 = (int)cell;
            i1 = 0;
        } else {
            i0 = (int)(cell / shape[1]);
            i1 = (int)(cell % shape[1]);
        }
    }
    // cell-center coordinate along axis k
    double center(int i, int k) const { return (i + 0.5) * h(k); }
    // shortest wrapped displacement along axis k
    double wrap_delta(double d, int k) const {
        double L = lengths[k];
        d = std::fmod(d, L);
        if (d > 0.5 * L) d -= L;
        if (d < -0.5 * L) d += L;
        return d;
    }
    double torus_dist2(double x0, double y0, double x1, double y1) const {
        double dx = wrap_delta(x1 - x0, 0);
        double dy = n == 2 ? wrap_delta(y1 - y0, 1) : 0.0;
        return dx * dx + dy * dy;
    }
    bool same(const TorusGrid& o) const {
        return n == o.n && shape == o.shape && lengths == o.lengths;
    }
};

// conformal factor rho per cell; Dirichlet weight a = rho^{n-2}, volume weight b = rho^n
struct ConformalMetric {
    TorusGrid grid;
    std::vector<double> rho, a, b;
    double vol_b = 0;

    static ConformalMetric flat(const TorusGrid& g) {
        return from_rho(g, [](double, double) { return 1.0; });
    }
    static ConformalMetric from_rho(const TorusGrid& g,
                                    const std::function<double(double, double)>& f) {
        ConformalMetric m;
        m.grid = g;
        long C = g.cells();
        m.rho.resize(C);
        m.a.resize(C);
        m.b.resize(C);
        double meas = g.cell_measure();
        m.vol_b = 0;
        for (long c = 0; c < C; ++c) {
            int i0, i1;
            g.coords(c, i0, i1);
            double r = f(g.center(i0, 0), g.n == 2 ? g.center(i1, 1) : 0.0);
            if (!(r > 0)) throw ConfigError("conformal factor must be positive");
            m.rho[c] = r;
            m.a[c] = std::pow(r, g.n - 2);
            m.b[c] = std::pow(r, g.n);
            m.vol_b += m.b[c] * meas;
        }
        return m;
    }
    bool flat_metric() const {
        for (double r : rho)
            if (r != 1.0) return false;
        return true;
    }
};

// m-component field, component-major then row-major cell order
struct Field {
    TorusGrid grid;
    int m = 1;
    std::vector<double> v;

    Field() = default;
    Field(const TorusGrid& g, int comps, double fill = 0.0)
        : grid(g), m(comps), v(comps * g.cells(), fill) {}

    double& at(int c, long cell) { return v[c * grid.cells() + cell]; }
    double at(int c, long cell) const { return v[c * grid.cells() + cell]; }
    long cells() const { return grid.cells(); }
    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// snapshot header helpers shared by the ACHF and ACHC formats
std::string grid_header_line(const TorusGrid& g, int m, const char* count_key);
void parse_grid_header(const std::string& line, TorusGrid& g, int& m);

// text snapshots, bit-exact round trip at 17 significant digits
std::string field_to_text(const Field& f);
Field field_from_text(const std::string& text);
void save_field(const Field& f, const std::string& path);
Field load_field(const std::string& path);

// parse "--rho" expressions: "1" or "bump:A[,x0[,y0]]" meaning
// rho(x,y) = 1 + A * cos(2 pi (x-x0)/Lx) * cos(2 pi (y-y0)/Ly)
ConformalMetric metric_from_expr(const TorusGrid& g, const std::string& expr);

}  // namespace ach
