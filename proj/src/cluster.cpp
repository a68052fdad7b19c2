#include "achlab/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ach {

namespace {

void check_grid(const Cluster& c, const ConformalMetric& g) {
    if (!c.grid.same(g.grid)) throw GridMismatch("cluster and metric grids differ");
}

inline long neighbor_up(const TorusGrid& g, long c, int k) {
    int i0, i1;
    g.coords(c, i0, i1);
    if (k == 0) return g.index(g.wrap(i0 + 1, 0), i1);
    return g.index(i0, g.wrap(i1 + 1, 1));
}

}  // namespace

std::string cluster_to_text(const Cluster& c) {
    c.validate();
    std::ostringstream os;
    os << "ACHC 1\n" << grid_header_line(c.grid, c.N, "N") << "\n";
    for (std::size_t i = 0; i < c.labels.size(); ++i)
        os << c.labels[i] << ((i + 1) % 32 == 0 ? "\n" : " ");
    os << "\n";
    return os.str();
}

Cluster cluster_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string magic, line;
    std::getline(is, magic);
    if (magic.rfind("ACHC 1", 0) != 0) throw IoError("not an ACHC snapshot");
    std::getline(is, line);
    TorusGrid g;
    int N;
    parse_grid_header(line, g, N);
    Cluster c(g, N, N);
    for (int& l : c.labels)
        if (!(is >> l)) throw IoError("truncated ACHC snapshot");
    c.validate();
    return c;
}

void save_cluster(const Cluster& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << cluster_to_text(c);
}

Cluster load_cluster(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return cluster_from_text(os.str());
}

Vec volumes(const Cluster& c, const ConformalMetric& g) {
    check_grid(c, g);
    Vec v(c.N, 0.0);
    const double meas = c.grid.cell_measure();
    for (long cell = 0; cell < c.grid.cells(); ++cell)
        v[c.labels[cell] - 1] += g.b[cell] * meas;
    return v;
}

Mat interface_measure(const Cluster& c, const ConformalMetric& g) {
    check_grid(c, g);
    const TorusGrid& G = c.grid;
    const int N = c.N;
    Mat H(N * N, 0.0);
    const double meas = G.cell_measure();
    for (long cell = 0; cell < G.cells(); ++cell) {
        for (int k = 0; k < G.n; ++k) {
            long up = neighbor_up(G, cell, k);
            int li = c.labels[cell], lj = c.labels[up];
            if (li == lj) continue;
            // face area with the conformal length weight rho^{n-1}
            double rf = 0.5 * (std::pow(g.rho[cell], G.n - 1) +
                               std::pow(g.rho[up], G.n - 1));
            double face = rf * meas / G.h(k);
            H[(li - 1) * N + (lj - 1)] += face;
            H[(lj - 1) * N + (li - 1)] += face;
        }
    }
    return H;
}

double multi_perimeter(const Cluster& c, const TensionMatrix& omega,
                       const ConformalMetric& g) {
    if (omega.N != c.N) throw ShapeError("tension matrix size does not match cluster");
    Mat H = interface_measure(c, g);
    double P = 0;
    for (int i = 0; i < c.N; ++i)
        for (int j = 0; j < c.N; ++j)
            if (i != j) P += omega.omega[i * c.N + j] * H[i * c.N + j];
    return P;
}

double flat_distance(const Cluster& c1, const Cluster& c2, const ConformalMetric& g) {
    check_grid(c1, g);
    if (!c1.grid.same(c2.grid) || c1.N != c2.N)
        throw GridMismatch("clusters are not comparable");
    const double meas = c1.grid.cell_measure();
    double d = 0;
    for (long cell = 0; cell < c1.grid.cells(); ++cell) {
        int a = c1.labels[cell], b = c2.labels[cell];
        if (a == b) continue;
        // symmetric differences of the interior chambers only
        if (a < c1.N) d += g.b[cell] * meas;
        if (b < c1.N) d += g.b[cell] * meas;
    }
    return d;
}

DiameterResult interior_diameter(const Cluster& c) {
    const TorusGrid& G = c.grid;
    std::vector<long> interior;
    for (long cell = 0; cell < G.cells(); ++cell)
        if (c.labels[cell] < c.N) interior.push_back(cell);
    if (interior.empty()) throw EmptyInterior("cluster has no interior cells");

    DiameterResult res;
    if (interior.size() <= 10000) {
        double best = 0;
        std::vector<double> xs(interior.size()), ys(interior.size());
        for (std::size_t p = 0; p < interior.size(); ++p) {
            int i0, i1;
            G.coords(interior[p], i0, i1);
            xs[p] = G.center(i0, 0);
            ys[p] = G.n == 2 ? G.center(i1, 1) : 0.0;
        }
        for (std::size_t p = 0; p < interior.size(); ++p)
            for (std::size_t q = p + 1; q < interior.size(); ++q)
                best = std::max(best, G.torus_dist2(xs[p], ys[p], xs[q], ys[q]));
        res.value = std::sqrt(best);
        res.exact = true;
        return res;
    }

    // covering-arc extent per axis: upper bound on the true diameter
    double sum2 = 0;
    for (int k = 0; k < G.n; ++k) {
        std::vector<char> occ(G.shape[k], 0);
        for (long cell : interior) {
            int i0, i1;
            G.coords(cell, i0, i1);
            occ[k == 0 ? i0 : i1] = 1;
        }
        int longest_gap = 0, gap = 0;
        for (int rep = 0; rep < 2 * G.shape[k]; ++rep) {
            if (occ[rep % G.shape[k]]) gap = 0;
            else longest_gap = std::max(longest_gap, ++gap);
        }
        longest_gap = std::min(longest_gap, G.shape[k]);
        double extent = G.lengths[k] - longest_gap * G.h(k);
        sum2 += extent * extent;
    }
    res.value = std::sqrt(sum2);
    res.exact = false;
    return res;
}

namespace {

// memoized well distances on a lookup box covering the sampled value range
struct DistanceTable {
    int m = 1, nodes = 64;
    Vec lo, hi;                 // box corners, length m
    std::vector<Vec> phi;       // per well, nodes^m values

    double interp(int well, const Vec& z) const {
        Vec t(m);
        std::vector<int> i0(m);
        for (int d = 0; d < m; ++d) {
            double s = (z[d] - lo[d]) / (hi[d] - lo[d]) * (nodes - 1);
            s = std::clamp(s, 0.0, double(nodes - 1));
            i0[d] = std::min((int)s, nodes - 2);
            t[d] = s - i0[d];
        }
        if (m == 1)
            return phi[well][i0[0]] * (1 - t[0]) + phi[well][i0[0] + 1] * t[0];
        auto at = [&](int a, int b) { return phi[well][a * nodes + b]; };
        double f00 = at(i0[0], i0[1]), f10 = at(i0[0] + 1, i0[1]);
        double f01 = at(i0[0], i0[1] + 1), f11 = at(i0[0] + 1, i0[1] + 1);
        return (1 - t[0]) * ((1 - t[1]) * f00 + t[1] * f01) +
               t[0] * ((1 - t[1]) * f10 + t[1] * f11);
    }
};

DistanceTable build_distance_table(const Field& u, const Potential& P) {
    DistanceTable tab;
    tab.m = P.m();
    tab.lo.assign(tab.m, 1e300);
    tab.hi.assign(tab.m, -1e300);
    for (int d = 0; d < tab.m; ++d)
        for (long cell = 0; cell < u.cells(); ++cell) {
            tab.lo[d] = std::min(tab.lo[d], u.at(d, cell));
            tab.hi[d] = std::max(tab.hi[d], u.at(d, cell));
        }
    for (const Vec& p : P.minima())
        for (int d = 0; d < tab.m; ++d) {
            tab.lo[d] = std::min(tab.lo[d], p[d]);
            tab.hi[d] = std::max(tab.hi[d], p[d]);
        }
    for (int d = 0; d < tab.m; ++d) {
        double pad = 0.05 * (tab.hi[d] - tab.lo[d]) + 1e-9;
        tab.lo[d] -= pad;
        tab.hi[d] += pad;
    }
    OptimizeOptions opts;
    opts.max_iters = 2000;
    opts.patience = 20;
    opts.tol = 1e-8;
    opts.multistart = 1;
    opts.throw_on_stall = false;
    long count = tab.m == 1 ? tab.nodes : (long)tab.nodes * tab.nodes;
    tab.phi.assign(P.N(), Vec(count, 0.0));
    for (long node = 0; node < count; ++node) {
        Vec z(tab.m);
        if (tab.m == 1) {
            z[0] = tab.lo[0] + (tab.hi[0] - tab.lo[0]) * node / (tab.nodes - 1);
        } else {
            int a = (int)(node / tab.nodes), b = (int)(node % tab.nodes);
            z[0] = tab.lo[0] + (tab.hi[0] - tab.lo[0]) * a / (tab.nodes - 1);
            z[1] = tab.lo[1] + (tab.hi[1] - tab.lo[1]) * b / (tab.nodes - 1);
        }
        // the degenerate metric lives on the nonnegative orthant
        Vec zc = z;
        for (double& x : zc) x = std::max(x, 0.0);
        for (int w = 0; w < P.N(); ++w)
            tab.phi[w][node] =
                geodesic_distance(P, P.minimum(w), zc, 32, opts).distance;
    }
    return tab;
}

}  // namespace

std::vector<std::vector<double>> phase_distances(const Field& u, const Potential& P) {
    if (u.m != P.m()) throw ShapeError("field components do not match potential");
    DistanceTable tab = build_distance_table(u, P);
    std::vector<std::vector<double>> out(P.N(), std::vector<double>(u.cells()));
    Vec z(u.m);
    for (long cell = 0; cell < u.cells(); ++cell) {
        for (int d = 0; d < u.m; ++d) z[d] = u.at(d, cell);
        for (int w = 0; w < P.N(); ++w) out[w][cell] = tab.interp(w, z);
    }
    return out;
}

Cluster from_field(const Field& u, const Potential& P, const TensionMatrix& T) {
    if (u.m != P.m()) throw ShapeError("field components do not match potential");
    if (T.N != P.N()) throw ShapeError("tension matrix size does not match potential");
    DistanceTable tab = build_distance_table(u, P);
    Cluster c(u.grid, P.N(), P.N());
    Vec z(u.m);
    for (long cell = 0; cell < u.cells(); ++cell) {
        for (int d = 0; d < u.m; ++d) z[d] = u.at(d, cell);
        int best = 0;
        double bd = tab.interp(0, z);
        for (int w = 1; w < P.N(); ++w) {
            double dw = tab.interp(w, z);
            // near-ties keep the smaller index; the table is only accurate
            // to quadrature noise, so exact comparison would break the
            // tie-break contract on symmetric inputs
            if (dw < bd * (1 - 1e-7) - 1e-12) {
                bd = dw;
                best = w;
            }
        }
        c.labels[cell] = best + 1;
    }
    return c;
}

double isoperimetric_constant(int n) {
    return n * std::sqrt(M_PI) * std::pow(std::tgamma(0.5 * n + 1.0), -1.0 / n);
}

IsoBounds isoperimetric_bounds(const Vec& v, const TensionMatrix& omega, int n) {
    for (double x : v)
        if (x < 0) throw NegativeVolume("negative chamber volume");
    double wmin = 1e300, wmax = 0;
    for (int i = 0; i < omega.N; ++i)
        for (int j = 0; j < omega.N; ++j) {
            if (i == j) continue;
            double w = omega.omega[i * omega.N + j];
            if (w > 0) wmin = std::min(wmin, w);
            wmax = std::max(wmax, w);
        }
    if (wmin > 1e299) wmin = 0;
    double cn = isoperimetric_constant(n);
    IsoBounds b;
    b.C0 = wmin * cn;
    b.C0_tilde = wmax * cn;
    double p = (n - 1.0) / n;
    double sum_pow = 0, sum = 0;
    for (double x : v) {
        sum_pow += std::pow(x, p);
        sum += x;
    }
    b.upper = b.C0_tilde * sum_pow;
    b.lower = b.C0 * std::pow(sum, p);
    return b;
}

namespace {

// separable periodic convolution with a truncated Gaussian of variance 2*dt
void diffuse(const TorusGrid& G, const std::vector<double>& in,
             std::vector<double>& out, double dt) {
    std::vector<double> tmp(in.size());
    const std::vector<double>* src = &in;
    std::vector<double>* dst = G.n == 2 ? &tmp : &out;
    for (int k = 0; k < G.n; ++k) {
        double h = G.h(k);
        int R = (int)std::ceil(4.0 * std::sqrt(2.0 * dt) / h);
        R = std::min(R, G.shape[k] / 2);
        std::vector<double> w(2 * R + 1);
        double s = 0;
        for (int d = -R; d <= R; ++d) {
            w[d + R] = std::exp(-(d * h) * (d * h) / (4.0 * dt));
            s += w[d + R];
        }
        for (double& x : w) x /= s;
        for (int i0 = 0; i0 < G.shape[0]; ++i0)
            for (int i1 = 0; i1 < (G.n == 2 ? G.shape[1] : 1); ++i1) {
                double acc = 0;
                for (int d = -R; d <= R; ++d) {
                    long cell = k == 0 ? G.index(G.wrap(i0 + d, 0), i1)
                                       : G.index(i0, G.wrap(i1 + d, 1));
                    acc += w[d + R] * (*src)[cell];
                }
                (*dst)[G.index(i0, i1)] = acc;
            }
        src = dst;
        dst = (dst == &tmp) ? &out : &tmp;
    }
    if (src != &out) out = *src;
}

}  // namespace

MboResult mbo_minimize(const Vec& v, const TensionMatrix& omega,
                       const ConformalMetric& g, const MboOptions& opts) {
    const TorusGrid& G = g.grid;
    const int N = omega.N;
    if ((int)v.size() != N - 1) throw ShapeError("expected N-1 interior volumes");
    if (!omega.immiscible && N >= 3)
        throw ShapeError("tension matrix is not immiscible");
    double total = 0;
    for (double x : v) {
        if (x < 0) throw NegativeVolume("negative target volume");
        total += x;
    }
    if (total >= g.vol_b) throw VolumeTooLarge("interior volumes exceed the torus");

    double hmax = G.h(0);
    if (G.n == 2) hmax = std::max(hmax, G.h(1));
    double dt = opts.dt > 0 ? opts.dt : (4 * hmax) * (4 * hmax);

    // deterministic initialization: tangent round blobs along the x axis, so
    // adjacent chambers share a wall from the start instead of being locked
    // into a far-apart local minimum
    Cluster c(G, N, N);
    const double meas = G.cell_measure();
    std::vector<double> radius(N - 1, 0.0), cxs(N - 1, 0.0);
    for (int i = 0; i < N - 1; ++i)
        radius[i] = G.n == 2 ? std::sqrt(std::max(v[i], 0.0) / M_PI)
                             : 0.5 * std::max(v[i], 0.0);
    double width = 0;
    for (double r : radius) width += 2 * r;
    double at = 0.5 * (G.lengths[0] - width);
    for (int i = 0; i < N - 1; ++i) {
        cxs[i] = at + radius[i];
        at += 2 * radius[i];
    }
    for (int i = 0; i < N - 1; ++i) {
        if (v[i] <= 0) continue;
        double cx = cxs[i];
        double cy = G.n == 2 ? G.lengths[1] * 0.5 : 0.0;
        // sort free cells by distance to the blob center, fill to volume
        std::vector<std::pair<double, long>> order;
        for (long cell = 0; cell < G.cells(); ++cell) {
            if (c.labels[cell] != N) continue;
            int i0, i1;
            G.coords(cell, i0, i1);
            double d2 = G.torus_dist2(G.center(i0, 0),
                                      G.n == 2 ? G.center(i1, 1) : 0.0, cx, cy);
            order.push_back({d2, cell});
        }
        std::sort(order.begin(), order.end());
        double got = 0;
        for (auto& [d2, cell] : order) {
            if (got >= v[i]) break;
            c.labels[cell] = i + 1;
            got += g.b[cell] * meas;
        }
    }

    std::vector<std::vector<double>> psi(N, std::vector<double>(G.cells()));
    std::vector<std::vector<double>> ind(N, std::vector<double>(G.cells()));
    std::vector<double> score((std::size_t)N * G.cells());

    MboResult res;
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        for (int i = 0; i < N; ++i) {
            for (long cell = 0; cell < G.cells(); ++cell)
                ind[i][cell] = (c.labels[cell] == i + 1) ? 1.0 : 0.0;
            diffuse(G, ind[i], psi[i], dt);
        }
        for (long cell = 0; cell < G.cells(); ++cell)
            for (int i = 0; i < N; ++i) {
                double s = 0;
                for (int j = 0; j < N; ++j)
                    if (j != i) s += omega.omega[i * N + j] * psi[j][cell];
                score[(std::size_t)i * G.cells() + cell] = s;
            }

        std::vector<int> fresh(G.cells());
        for (long cell = 0; cell < G.cells(); ++cell) {
            int best = 0;
            double bs = score[cell];
            for (int i = 1; i < N; ++i) {
                double s = score[(std::size_t)i * G.cells() + cell];
                if (s < bs) {
                    bs = s;
                    best = i;
                }
            }
            fresh[cell] = best + 1;
        }

        // restore interior volumes by rank-order relabeling,
        // chambers processed by descending deficit
        Vec cur(N, 0.0);
        for (long cell = 0; cell < G.cells(); ++cell)
            cur[fresh[cell] - 1] += g.b[cell] * meas;
        std::vector<int> order(N - 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return v[a] - cur[a] > v[b] - cur[b];
        });
        std::vector<char> locked(N, 0);
        for (int i : order) {
            double deficit = v[i] - cur[i];
            if (deficit > 0) {
                std::vector<std::pair<double, long>> cand;
                for (long cell = 0; cell < G.cells(); ++cell) {
                    int l = fresh[cell] - 1;
                    if (l == i || locked[l]) continue;
                    double gain = score[(std::size_t)i * G.cells() + cell] -
                                  score[(std::size_t)l * G.cells() + cell];
                    cand.push_back({gain, cell});
                }
                std::sort(cand.begin(), cand.end());
                for (auto& [gain, cell] : cand) {
                    if (cur[i] >= v[i]) break;
                    int l = fresh[cell] - 1;
                    fresh[cell] = i + 1;
                    cur[l] -= g.b[cell] * meas;
                    cur[i] += g.b[cell] * meas;
                }
            } else if (deficit < 0) {
                std::vector<std::pair<double, long>> cand;
                for (long cell = 0; cell < G.cells(); ++cell)
                    if (fresh[cell] == i + 1)
                        cand.push_back(
                            {-score[(std::size_t)i * G.cells() + cell], cell});
                std::sort(cand.begin(), cand.end());
                for (auto& [negs, cell] : cand) {
                    if (cur[i] <= v[i]) break;
                    int dest = -1;
                    double ds = 1e300;
                    for (int j = 0; j < N; ++j) {
                        if (j == i || locked[j]) continue;
                        double s = score[(std::size_t)j * G.cells() + cell];
                        if (s < ds) {
                            ds = s;
                            dest = j;
                        }
                    }
                    if (dest < 0) break;
                    fresh[cell] = dest + 1;
                    cur[i] -= g.b[cell] * meas;
                    cur[dest] += g.b[cell] * meas;
                }
            }
            locked[i] = 1;
        }

        long changes = 0;
        for (long cell = 0; cell < G.cells(); ++cell)
            if (fresh[cell] != c.labels[cell]) ++changes;
        c.labels = std::move(fresh);
        if (changes <= opts.stall) {
            res.converged = true;
            ++sweep;
            break;
        }
    }
    res.cluster = std::move(c);
    res.sweeps = sweep;
    return res;
}

double isotropic_perimeter(const Cluster& c, const ConformalMetric& g) {
    check_grid(c, g);
    const TorusGrid& G = c.grid;
    const double meas = G.cell_measure();
    double hmax = G.h(0);
    if (G.n == 2) hmax = std::max(hmax, G.h(1));
    double sigma = 2 * hmax;
    double dt = 0.5 * sigma * sigma;  // diffusion time with sqrt(2 dt) = sigma

    double total = 0;
    std::vector<double> ind(G.cells()), sm(G.cells());
    for (int i = 0; i < c.N; ++i) {
        for (long cell = 0; cell < G.cells(); ++cell)
            ind[cell] = (c.labels[cell] == i + 1) ? 1.0 : 0.0;
        diffuse(G, ind, sm, dt);
        double per = 0;
        for (long cell = 0; cell < G.cells(); ++cell) {
            int i0, i1;
            G.coords(cell, i0, i1);
            double g2 = 0;
            for (int k = 0; k < G.n; ++k) {
                long up = k == 0 ? G.index(G.wrap(i0 + 1, 0), i1)
                                 : G.index(i0, G.wrap(i1 + 1, 1));
                long dn = k == 0 ? G.index(G.wrap(i0 - 1, 0), i1)
                                 : G.index(i0, G.wrap(i1 - 1, 1));
                double d = (sm[up] - sm[dn]) / (2 * G.h(k));
                g2 += d * d;
            }
            per += std::pow(g.rho[cell], G.n - 1) * std::sqrt(g2) * meas;
        }
        total += per;
    }
    // each interface separates exactly two chambers
    return 0.5 * total;
}

SubdomainReport large_subdomain_report(const Cluster& c, const ConformalMetric& g) {
    check_grid(c, g);
    const TorusGrid& G = c.grid;
    SubdomainReport rep;
    Vec vol = volumes(c, g);
    for (int i = 0; i < c.N - 1; ++i) rep.interior_volume += vol[i];

    DiameterResult d = interior_diameter(c);
    rep.diameter = d.value;
    rep.diameter_exact = d.exact;
    rep.ratio = rep.interior_volume > 0
                    ? rep.diameter / std::pow(rep.interior_volume, 1.0 / G.n)
                    : 0.0;

    // connected components of the interior under periodic face adjacency
    std::vector<int> comp(G.cells(), -1);
    int count = 0;
    std::vector<long> stack;
    for (long seed = 0; seed < G.cells(); ++seed) {
        if (c.labels[seed] == c.N || comp[seed] >= 0) continue;
        stack.push_back(seed);
        comp[seed] = count;
        while (!stack.empty()) {
            long cell = stack.back();
            stack.pop_back();
            int i0, i1;
            G.coords(cell, i0, i1);
            std::array<long, 4> nb{G.index(G.wrap(i0 + 1, 0), i1),
                                   G.index(G.wrap(i0 - 1, 0), i1),
                                   G.n == 2 ? G.index(i0, G.wrap(i1 + 1, 1)) : cell,
                                   G.n == 2 ? G.index(i0, G.wrap(i1 - 1, 1)) : cell};
            for (long q : nb) {
                if (q == cell) continue;
                if (c.labels[q] != c.N && comp[q] < 0) {
                    comp[q] = count;
                    stack.push_back(q);
                }
            }
        }
        ++count;
    }
    rep.components = count;
    return rep;
}

Cluster digital_disk(const TorusGrid& g, double cx, double cy, double area) {
    Cluster c(g, 2, 2);
    double r2 = area / M_PI;
    for (long cell = 0; cell < g.cells(); ++cell) {
        int i0, i1;
        g.coords(cell, i0, i1);
        double d2 = g.torus_dist2(g.center(i0, 0), g.n == 2 ? g.center(i1, 1) : 0.0,
                                  cx, cy);
        if (d2 <= r2) c.labels[cell] = 1;
    }
    return c;
}

Cluster digital_interval(const TorusGrid& g, double center, double length) {
    Cluster c(g, 2, 2);
    for (long cell = 0; cell < g.cells(); ++cell) {
        int i0, i1;
        g.coords(cell, i0, i1);
        if (std::fabs(g.wrap_delta(g.center(i0, 0) - center, 0)) <= 0.5 * length)
            c.labels[cell] = 1;
    }
    return c;
}

Cluster double_bubble(const TorusGrid& g, double cx, double cy, double v1, double v2) {
    Cluster c(g, 3, 3);
    if (std::fabs(v1 - v2) < 1e-12) {
        // equal lobes: straight wall, arcs of radius r with centers r/2 off
        // the wall so the three interfaces meet at 120 degrees
        double r = std::sqrt(v1 / (2 * M_PI / 3 + std::sqrt(3) / 4));
        for (long cell = 0; cell < g.cells(); ++cell) {
            int i0, i1;
            g.coords(cell, i0, i1);
            double x = g.center(i0, 0), y = g.n == 2 ? g.center(i1, 1) : 0.0;
            double dx = g.wrap_delta(x - cx, 0);
            double dy = g.n == 2 ? g.wrap_delta(y - cy, 1) : 0.0;
            double dl2 = (dx + 0.5 * r) * (dx + 0.5 * r) + dy * dy;
            double dr2 = (dx - 0.5 * r) * (dx - 0.5 * r) + dy * dy;
            if (dl2 <= r * r && dx <= 0) c.labels[cell] = 1;
            else if (dr2 <= r * r && dx >= 0) c.labels[cell] = 2;
        }
        return c;
    }
    // unequal volumes: two tangent disks as the canonical fallback
    double r1 = std::sqrt(v1 / M_PI), r2s = std::sqrt(v2 / M_PI);
    for (long cell = 0; cell < g.cells(); ++cell) {
        int i0, i1;
        g.coords(cell, i0, i1);
        double x = g.center(i0, 0), y = g.n == 2 ? g.center(i1, 1) : 0.0;
        double dx = g.wrap_delta(x - cx, 0);
        double dy = g.n == 2 ? g.wrap_delta(y - cy, 1) : 0.0;
        double d1 = (dx + r1) * (dx + r1) + dy * dy;
        double d2 = (dx - r2s) * (dx - r2s) + dy * dy;
        if (d1 <= r1 * r1) c.labels[cell] = 1;
        else if (d2 <= r2s * r2s) c.labels[cell] = 2;
    }
    return c;
}

}  // namespace ach
