#include "achlab/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace ach {

Vec ProfileTable::eval(int i, int j, double t) const {
    int a = i, b = j;
    bool mirror = false;
    if (a > b) {
        std::swap(a, b);
        mirror = true;
    }
    int pi = TensionMatrix::pair_index(a, b, N);
    double e = eta[pi];
    if (mirror) t = e - t;
    const std::vector<Vec>& nd = nodes[pi];
    const std::vector<double>& ps = psi[pi];
    if (t <= 0) return nd.front();
    if (t >= e) return nd.back();
    auto it = std::upper_bound(ps.begin(), ps.end(), t);
    int r = std::max<int>(1, (int)(it - ps.begin())) - 1;
    r = std::min<int>(r, (int)nd.size() - 2);
    double span = ps[r + 1] - ps[r];
    double f = span > 0 ? std::clamp((t - ps[r]) / span, 0.0, 1.0) : 0.0;
    Vec out(nd[r].size());
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = (1 - f) * nd[r][c] + f * nd[r + 1][c];
    return out;
}

double ProfileTable::width(int i, int j) const {
    if (i > j) std::swap(i, j);
    return eta[TensionMatrix::pair_index(i, j, N)];
}

ProfileTable build_profile(const Potential& P, const TensionMatrix& T, double eps,
                           double tau, int K) {
    if (tau <= 0) throw BadTau("profile regularization tau must be positive");
    if (K < 64) K = 64;
    ProfileTable tab;
    tab.N = T.N;
    tab.eps = eps;
    tab.tau = tau;
    tab.K = K;
    int pairs = T.N * (T.N - 1) / 2;
    tab.q.resize(pairs);
    tab.eta.resize(pairs);
    tab.nodes.resize(pairs);
    tab.psi.resize(pairs);

    const int R = 16;  // subdivisions per path segment for the quadrature
    for (int i = 0; i < T.N; ++i) {
        for (int j = i + 1; j < T.N; ++j) {
            int pi = TensionMatrix::pair_index(i, j, T.N);
            const std::vector<Vec>& path = T.paths[pi];
            if (path.empty()) throw ShapeError("tension matrix carries no paths");
            const int m = (int)path[0].size();
            const int S = (int)path.size() - 1;

            // densified polyline nodes
            std::vector<Vec>& nd = tab.nodes[pi];
            nd.clear();
            nd.reserve(S * R + 1);
            for (int s = 0; s < S; ++s) {
                for (int r = 0; r < R; ++r) {
                    double f = (double)r / R;
                    Vec p(m);
                    for (int c = 0; c < m; ++c)
                        p[c] = (1 - f) * path[s][c] + f * path[s + 1][c];
                    nd.push_back(std::move(p));
                }
            }
            nd.push_back(path.back());

            // cumulative argument psi, midpoint rule per subsegment
            std::vector<double>& ps = tab.psi[pi];
            ps.assign(nd.size(), 0.0);
            double len = 0;
            Vec mid(m);
            for (std::size_t s = 0; s + 1 < nd.size(); ++s) {
                double seg = 0;
                for (int c = 0; c < m; ++c) {
                    mid[c] = 0.5 * (nd[s][c] + nd[s + 1][c]);
                    double d = nd[s + 1][c] - nd[s][c];
                    seg += d * d;
                }
                seg = std::sqrt(seg);
                len += seg;
                ps[s + 1] =
                    ps[s] + eps * seg / std::sqrt(tau + std::max(P.value(mid), 0.0));
            }
            double eta = ps.back();
            tab.eta[pi] = eta;
            tab.C1 = std::max(tab.C1, len / std::sqrt(tau));
            for (const Vec& p : nd) tab.C2 = std::max(tab.C2, norm(p));
            for (std::size_t s = 0; s + 1 < nd.size(); ++s) {
                double dt = ps[s + 1] - ps[s];
                if (dt > 0)
                    tab.C3 = std::max(tab.C3, eps * norm(sub(nd[s + 1], nd[s])) / dt);
            }

            // reporting samples on a uniform argument grid
            std::vector<Vec>& samples = tab.q[pi];
            samples.assign(K, Vec(m));
            int seg = 0;
            for (int r = 0; r < K; ++r) {
                double target = eta * r / (K - 1);
                while (seg + 2 < (int)ps.size() && ps[seg + 1] < target) ++seg;
                double span = ps[seg + 1] - ps[seg];
                double f = span > 0 ? (target - ps[seg]) / span : 0.0;
                f = std::clamp(f, 0.0, 1.0);
                for (int c = 0; c < m; ++c)
                    samples[r][c] = (1 - f) * nd[seg][c] + f * nd[seg + 1][c];
            }
            samples.front() = path.front();
            samples.back() = path.back();
        }
    }
    return tab;
}

std::vector<double> signed_distance_to_chamber(const Cluster& c, int label) {
    const TorusGrid& G = c.grid;
    long inside_count = 0;
    for (int l : c.labels)
        if (l == label) ++inside_count;
    if (inside_count == G.cells())
        throw EmptyBoundary("chamber covers the whole torus");
    if (inside_count == 0)
        return std::vector<double>(G.cells(), 1e300);

    // boundary face midpoints
    std::vector<std::pair<double, double>> faces;
    for (long cell = 0; cell < G.cells(); ++cell) {
        int i0, i1;
        G.coords(cell, i0, i1);
        for (int k = 0; k < G.n; ++k) {
            long up = k == 0 ? G.index(G.wrap(i0 + 1, 0), i1)
                             : G.index(i0, G.wrap(i1 + 1, 1));
            bool a = c.labels[cell] == label, b = c.labels[up] == label;
            if (a == b) continue;
            double fx = G.center(i0, 0) + (k == 0 ? 0.5 * G.h(0) : 0.0);
            double fy = G.n == 2 ? G.center(i1, 1) + (k == 1 ? 0.5 * G.h(1) : 0.0)
                                 : 0.0;
            faces.push_back({fx, fy});
        }
    }
    if (faces.empty()) throw EmptyBoundary("chamber has no boundary faces");

    std::vector<double> d(G.cells());
    for (long cell = 0; cell < G.cells(); ++cell) {
        int i0, i1;
        G.coords(cell, i0, i1);
        double x = G.center(i0, 0), y = G.n == 2 ? G.center(i1, 1) : 0.0;
        double best = 1e300;
        for (auto& [fx, fy] : faces)
            best = std::min(best, G.torus_dist2(x, y, fx, fy));
        d[cell] = std::sqrt(best) * (c.labels[cell] == label ? -1.0 : 1.0);
    }
    return d;
}

SignedDistanceSet signed_distances(const Cluster& c) {
    bool any = false;
    for (int l : c.labels)
        if (l < c.N) any = true;
    if (!any) throw EmptyInterior("cluster has no interior cells");
    SignedDistanceSet s;
    s.grid = c.grid;
    for (int i = 1; i < c.N; ++i) s.d.push_back(signed_distance_to_chamber(c, i));
    return s;
}

Vec cluster_phase_volume(const Cluster& c, const Potential& P,
                         const ConformalMetric& g) {
    Vec vol = volumes(c, g);
    Vec out(P.m(), 0.0);
    for (int i = 0; i < c.N; ++i)
        for (int d = 0; d < P.m(); ++d) out[d] += P.minimum(i)[d] * vol[i];
    return out;
}

namespace {

struct Assembler {
    const Cluster* c;
    const ProfileTable* prof;
    std::vector<std::vector<double>> dist;  // per chamber, exterior last
    int N, m;

    Field assemble(const Vec& zeta) const {
        const TorusGrid& G = c->grid;
        Field u(G, m);
        for (long cell = 0; cell < G.cells(); ++cell) {
            int i = c->labels[cell] - 1;
            // nearest other chamber governs which transition applies
            int j = -1;
            double dj = 1e300;
            for (int k = 0; k < N; ++k) {
                if (k == i) continue;
                if (dist[k][cell] < dj) {
                    dj = dist[k][cell];
                    j = k;
                }
            }
            Vec val;
            if (i == N - 1)
                val = prof->eval(j, N - 1, dist[j][cell] + zeta[j]);
            else
                val = prof->eval(i, j, dist[i][cell] + zeta[i]);
            for (int d = 0; d < m; ++d) u.at(d, cell) = val[d];
        }
        return u;
    }
};

}  // namespace

RecoveryResult modica_baldo(const Cluster& c, const Potential& P,
                            const TensionMatrix& T, double eps, double tau,
                            const ConformalMetric& g, const Vec& v_target,
                            int profile_K) {
    if (c.N != T.N || T.N != P.N())
        throw ShapeError("cluster, tensions, and potential disagree on N");
    if (!c.grid.same(g.grid)) throw GridMismatch("cluster and metric grids differ");
    if ((int)v_target.size() != P.m()) throw ShapeError("volume target size mismatch");

    RecoveryResult res;
    res.resolution_ok = true;
    for (int k = 0; k < c.grid.n; ++k)
        if (c.grid.h(k) > eps / 8.0) res.resolution_ok = false;

    ProfileTable prof = build_profile(P, T, eps, tau, profile_K);

    Assembler A;
    A.c = &c;
    A.prof = &prof;
    A.N = c.N;
    A.m = P.m();
    for (int i = 1; i < c.N; ++i) A.dist.push_back(signed_distance_to_chamber(c, i));
    A.dist.push_back(signed_distance_to_chamber(c, c.N));

    // layer shifts: one per interior chamber, bisected on the monotone
    // volume response when components align with chambers
    Vec eta_max(c.N - 1, 0.0);
    for (int i = 0; i < c.N - 1; ++i)
        for (int j = 0; j < c.N; ++j)
            if (j != i) eta_max[i] = std::max(eta_max[i], prof.width(i, j));
    Vec zeta(c.N - 1);
    for (int i = 0; i < c.N - 1; ++i) zeta[i] = 0.5 * eta_max[i];

    Field u = A.assemble(zeta);
    if (P.m() == c.N - 1) {
        for (int round = 0; round < 2; ++round) {
            for (int d = 0; d < c.N - 1; ++d) {
                double lo = 0, hi = eta_max[d];
                for (int it = 0; it < 50; ++it) {
                    zeta[d] = 0.5 * (lo + hi);
                    u = A.assemble(zeta);
                    double vd = volume(u, g)[d];
                    if (std::fabs(vd - v_target[d]) < 1e-10) break;
                    // growing the shift shrinks the chamber's phase volume
                    if (vd > v_target[d]) lo = zeta[d];
                    else hi = zeta[d];
                }
            }
        }
        u = A.assemble(zeta);
    }
    res.zeta = zeta;

    Vec vol = volume(u, g);
    res.nu = sub(vol, v_target);

    // cone patch at the deepest point of chamber 1, then a constant shift
    // absorbing quadrature residue
    const TorusGrid& G = c.grid;
    double rball = std::pow(eps, 1.0 / G.n);
    long host = -1;
    double depth = 0;
    for (long cell = 0; cell < G.cells(); ++cell)
        if (c.labels[cell] == 1 && -A.dist[0][cell] > depth) {
            depth = -A.dist[0][cell];
            host = cell;
        }
    res.xi.assign(P.m(), 0.0);
    if (host >= 0 && depth >= rball) {
        int h0, h1;
        G.coords(host, h0, h1);
        double hx = G.center(h0, 0), hy = G.n == 2 ? G.center(h1, 1) : 0.0;
        std::vector<double> cone(G.cells(), 0.0);
        double mass = 0;
        const double meas = G.cell_measure();
        for (long cell = 0; cell < G.cells(); ++cell) {
            int i0, i1;
            G.coords(cell, i0, i1);
            double r = std::sqrt(G.torus_dist2(G.center(i0, 0),
                                               G.n == 2 ? G.center(i1, 1) : 0.0,
                                               hx, hy));
            if (r >= rball) continue;
            cone[cell] = 1.0 - r / rball;
            mass += g.b[cell] * cone[cell] * meas;
        }
        if (mass > 1e-14) {
            for (int d = 0; d < P.m(); ++d) res.xi[d] = -res.nu[d] / mass;
            for (long cell = 0; cell < G.cells(); ++cell) {
                if (cone[cell] == 0.0) continue;
                for (int d = 0; d < P.m(); ++d)
                    u.at(d, cell) += res.xi[d] * cone[cell];
            }
            res.cone_patched = true;
        }
    }
    u = project_volume(u, v_target, g);
    res.u = std::move(u);
    return res;
}

double tau_from_rule(const std::string& rule, double eps) {
    if (rule == "sqrt") return std::sqrt(eps);
    if (rule == "auto" || rule == "linear") return eps;
    try {
        double v = std::stod(rule);
        if (v <= 0) throw BadTau("tau must be positive");
        return v;
    } catch (const std::invalid_argument&) {
        throw ConfigError("unknown tau rule: " + rule);
    }
}

GammaTable gamma_sweep(const Cluster& c, const Potential& P, const TensionMatrix& T,
                       const ConformalMetric& g,
                       const std::vector<double>& eps_list,
                       const std::string& tau_rule) {
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (eps_list[i] <= eps_list[i + 1])
            throw ConfigError("epsilon ladder must be strictly decreasing");
    GammaTable tab;
    double per = multi_perimeter(c, T, g);
    Vec v_target = cluster_phase_volume(c, P, g);
    for (double eps : eps_list) {
        double tau = tau_from_rule(tau_rule, eps);
        RecoveryResult r = modica_baldo(c, P, T, eps, tau, g, v_target);
        GammaRow row;
        row.eps = eps;
        row.tau = tau;
        row.energy = energy(r.u, eps, P, g);
        row.perimeter = per;
        row.gap = row.energy - per;
        row.gap_over_eps = row.gap / eps;
        tab.rows.push_back(row);
    }
    tab.gaps_decreasing = tab.rows.size() >= 2;
    for (std::size_t i = 0; i + 1 < tab.rows.size(); ++i)
        if (std::fabs(tab.rows[i + 1].gap) >= std::fabs(tab.rows[i].gap))
            tab.gaps_decreasing = false;
    return tab;
}

std::pair<double, double> sup_measure_check(const Field& u, const Potential& P,
                                            const TensionMatrix& T,
                                            const ConformalMetric& g) {
    const TorusGrid& G = u.grid;
    std::vector<std::vector<double>> phi = phase_distances(u, P);
    const double meas = G.cell_measure();
    double lhs = 0;
    for (long cell = 0; cell < G.cells(); ++cell) {
        int i0, i1;
        G.coords(cell, i0, i1);
        double cellmax = 0;
        for (int w = 0; w < P.N(); ++w) {
            double g2 = 0;
            for (int k = 0; k < G.n; ++k) {
                long up = k == 0 ? G.index(G.wrap(i0 + 1, 0), i1)
                                 : G.index(i0, G.wrap(i1 + 1, 1));
                long dn = k == 0 ? G.index(G.wrap(i0 - 1, 0), i1)
                                 : G.index(i0, G.wrap(i1 - 1, 1));
                double d = (phi[w][up] - phi[w][dn]) / (2 * G.h(k));
                g2 += d * d;
            }
            cellmax = std::max(cellmax,
                               std::pow(g.rho[cell], G.n - 1) * std::sqrt(g2));
        }
        lhs += cellmax * meas;
    }
    lhs *= 2.0;
    double rhs = multi_perimeter(from_field(u, P, T), T, g);
    return {lhs, rhs};
}

}  // namespace ach
