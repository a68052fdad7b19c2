#include "achlab/photography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ach {

namespace {

double bounding_radius(const Vec& v, int N, int n) {
    double vt = 0;
    for (double c : v) vt += c;
    if (n == 1) return 0.5 * vt;
    double r = std::sqrt(vt / M_PI);
    return N == 2 ? r : 2 * r;  // bubble and tangent shapes are wider
}

}  // namespace

Cluster canonical_cluster(const TorusPoint& x, const Vec& v, int N,
                          const TorusGrid& grid, const std::string& shape_rule) {
    if ((int)v.size() != N - 1) throw ShapeError("volume vector must have N-1 entries");
    for (double c : v)
        if (c <= 0) throw NegativeVolume("canonical cluster volumes must be positive");
    double Lmin = grid.lengths[0];
    for (int k = 1; k < grid.n; ++k) Lmin = std::min(Lmin, grid.lengths[k]);
    if (bounding_radius(v, N, grid.n) > 0.25 * Lmin)
        throw VolumeTooLarge("canonical cluster does not fit in a quarter ball");

    if (N == 2) {
        if (grid.n == 1) return digital_interval(grid, x.x[0], v[0]);
        return digital_disk(grid, x.x[0], x.x[1], v[0]);
    }
    if (N != 3 || grid.n != 2)
        throw ConfigError("canonical shapes cover N = 2 and planar N = 3 only");

    if (shape_rule == "tangent") {
        double r1 = std::sqrt(v[0] / M_PI), r2 = std::sqrt(v[1] / M_PI);
        Cluster c(grid, 3, 3);
        for (long cell = 0; cell < grid.cells(); ++cell) {
            int i0, i1;
            grid.coords(cell, i0, i1);
            double px = grid.center(i0, 0), py = grid.center(i1, 1);
            if (grid.torus_dist2(px, py, x.x[0] - r1, x.x[1]) <= r1 * r1)
                c.labels[cell] = 1;
            else if (grid.torus_dist2(px, py, x.x[0] + r2, x.x[1]) <= r2 * r2)
                c.labels[cell] = 2;
        }
        return c;
    }
    return double_bubble(grid, x.x[0], x.x[1], v[0], v[1]);
}

Field photo(const TorusPoint& x, const Vec& v, double eps, const Potential& P,
            const TensionMatrix& T, const ConformalMetric& g,
            const std::string& shape_rule, int profile_K) {
    Cluster c = canonical_cluster(x, v, T.N, g.grid, shape_rule);
    RecoveryResult r =
        modica_baldo(c, P, T, eps, std::sqrt(eps), g, v, profile_K);
    return r.u;
}

BarycenterResult barycenter(const Field& u, const ConformalMetric& g) {
    const TorusGrid& G = u.grid;
    long C = G.cells();
    double meas = G.cell_measure();
    double total = 0;
    std::vector<double> w(C);
    for (long cell = 0; cell < C; ++cell) {
        double s = 0;
        for (int c = 0; c < u.m; ++c) s += u.at(c, cell) * u.at(c, cell);
        w[cell] = std::sqrt(s) * g.b[cell] * meas;
        total += w[cell];
    }
    if (total == 0) throw ZeroMass("barycenter of an identically zero field");

    BarycenterResult out;
    out.embedded.assign(2 * G.n, 0.0);
    for (long cell = 0; cell < C; ++cell) {
        int i0, i1;
        G.coords(cell, i0, i1);
        for (int k = 0; k < G.n; ++k) {
            double ang = 2 * M_PI * G.center(k == 0 ? i0 : i1, k) / G.lengths[k];
            out.embedded[2 * k] += w[cell] * std::cos(ang);
            out.embedded[2 * k + 1] += w[cell] * std::sin(ang);
        }
    }
    out.defined = true;
    for (int k = 0; k < G.n; ++k) {
        double cx = out.embedded[2 * k] /= total;
        double sx = out.embedded[2 * k + 1] /= total;
        if (std::hypot(cx, sx) < 1e-9) {
            out.defined = false;
            continue;
        }
        double L = G.lengths[k];
        double coord = std::atan2(sx, cx) / (2 * M_PI) * L;
        if (coord < 0) coord += L;
        out.projected.x.push_back(coord);
    }
    if (!out.defined) out.projected.x.clear();
    return out;
}

HomotopyReport homotopy_check(const Vec& v, double eps, const Potential& P,
                              const TensionMatrix& T, const ConformalMetric& g,
                              const std::vector<TorusPoint>& sample,
                              const std::string& shape_rule) {
    if (sample.empty()) throw ConfigError("homotopy check needs at least one sample");
    HomotopyReport rep;
    for (const TorusPoint& x : sample) {
        HomotopyRow row;
        row.x = x;
        try {
            Field u = photo(x, v, eps, P, T, g, shape_rule);
            BarycenterResult b = barycenter(u, g);
            row.defined = b.defined;
            if (b.defined) {
                row.back = b.projected;
                double y = g.grid.n == 2 ? b.projected.x[1] : 0.0;
                double xy = g.grid.n == 2 ? x.x[1] : 0.0;
                row.dist = std::sqrt(g.grid.torus_dist2(x.x[0], xy,
                                                        b.projected.x[0], y));
            }
        } catch (const VolumeTooLarge&) {
            row.defined = false;
        }
        if (!row.defined) {
            rep.all_defined = false;
            rep.max_dist = std::numeric_limits<double>::infinity();
        } else {
            rep.max_dist = std::max(rep.max_dist, row.dist);
        }
        rep.table.push_back(std::move(row));
    }
    return rep;
}

ConcentrationReport concentration_report(const Field& u, const ConformalMetric& g,
                                         double r) {
    const TorusGrid& G = u.grid;
    long C = G.cells();
    double meas = G.cell_measure();
    std::vector<double> mass(C);
    double total = 0;
    for (long cell = 0; cell < C; ++cell) {
        double s = 0;
        for (int c = 0; c < u.m; ++c) s += u.at(c, cell) * u.at(c, cell);
        mass[cell] = std::sqrt(s) * g.b[cell] * meas;
        total += mass[cell];
    }

    // box surrogate with the measure of the ball B_{r/2}
    double side = G.n == 1 ? r : std::sqrt(M_PI) * 0.5 * r;
    ConcentrationReport rep;
    if (total == 0) {
        rep.x_star.x.assign(G.n, 0.0);
        return rep;
    }

    if (G.n == 1) {
        int w = std::min((int)(0.5 * side / G.h(0)), G.shape[0] / 2 - 1);
        double best = -1;
        int besti = 0;
        for (int i = 0; i < G.shape[0]; ++i) {
            double s = 0;
            for (int d = -w; d <= w; ++d) s += mass[G.wrap(i + d, 0)];
            if (s > best) {
                best = s;
                besti = i;
            }
        }
        rep.x_star.x = {G.center(besti, 0)};
        rep.mass_fraction = best / total;
        return rep;
    }

    int w0 = std::min((int)(0.5 * side / G.h(0)), G.shape[0] / 2 - 1);
    int w1 = std::min((int)(0.5 * side / G.h(1)), G.shape[1] / 2 - 1);
    std::vector<double> rows(C, 0.0);
    for (int i0 = 0; i0 < G.shape[0]; ++i0)
        for (int i1 = 0; i1 < G.shape[1]; ++i1) {
            double s = 0;
            for (int d = -w1; d <= w1; ++d) s += mass[G.index(i0, G.wrap(i1 + d, 1))];
            rows[G.index(i0, i1)] = s;
        }
    double best = -1;
    long bestc = 0;
    for (int i0 = 0; i0 < G.shape[0]; ++i0)
        for (int i1 = 0; i1 < G.shape[1]; ++i1) {
            double s = 0;
            for (int d = -w0; d <= w0; ++d) s += rows[G.index(G.wrap(i0 + d, 0), i1)];
            if (s > best) {
                best = s;
                bestc = G.index(i0, i1);
            }
        }
    int b0, b1;
    G.coords(bestc, b0, b1);
    rep.x_star.x = {G.center(b0, 0), G.center(b1, 1)};
    rep.mass_fraction = best / total;
    return rep;
}

}  // namespace ach
