#include "achlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "achlab/rng.hpp"

namespace ach {

namespace {

void check_grid(const Field& u, const ConformalMetric& g) {
    if (!u.grid.same(g.grid)) throw GridMismatch("field and metric grids differ");
}

// cell index of the +1 neighbor along axis k
inline long step_up(const TorusGrid& g, long c, int k) {
    int i0, i1;
    g.coords(c, i0, i1);
    if (k == 0) return g.index(g.wrap(i0 + 1, 0), i1);
    return g.index(i0, g.wrap(i1 + 1, 1));
}

inline long step_down(const TorusGrid& g, long c, int k) {
    int i0, i1;
    g.coords(c, i0, i1);
    if (k == 0) return g.index(g.wrap(i0 - 1, 0), i1);
    return g.index(i0, g.wrap(i1 - 1, 1));
}

}  // namespace

double energy(const Field& u, double eps, const Potential& P,
              const ConformalMetric& g) {
    check_grid(u, g);
    if (u.m != P.m()) throw ShapeError("field components do not match potential");
    const TorusGrid& G = u.grid;
    const long C = G.cells();
    const double meas = G.cell_measure();
    double dir = 0, pot = 0;
    Vec z(u.m);
    for (long c = 0; c < C; ++c) {
        double grad2 = 0;
        for (int k = 0; k < G.n; ++k) {
            long cu = step_up(G, c, k);
            double inv_h = 1.0 / G.h(k);
            for (int comp = 0; comp < u.m; ++comp) {
                double d = (u.at(comp, cu) - u.at(comp, c)) * inv_h;
                grad2 += d * d;
            }
        }
        dir += g.a[c] * grad2;
        for (int comp = 0; comp < u.m; ++comp) z[comp] = u.at(comp, c);
        pot += g.b[c] * P.value(z);
    }
    return (eps * dir + pot / eps) * meas;
}

Vec volume(const Field& u, const ConformalMetric& g) {
    check_grid(u, g);
    const double meas = u.grid.cell_measure();
    Vec v(u.m, 0.0);
    for (int comp = 0; comp < u.m; ++comp) {
        double s = 0;
        for (long c = 0; c < u.cells(); ++c) s += g.b[c] * u.at(comp, c);
        v[comp] = s * meas;
    }
    return v;
}

Vec mean_b(const Field& u, const ConformalMetric& g) {
    Vec v = volume(u, g);
    for (double& x : v) x /= g.vol_b;
    return v;
}

double inner_b(const Field& x, const Field& y, const ConformalMetric& g) {
    check_grid(x, g);
    if (x.m != y.m || !x.grid.same(y.grid)) throw GridMismatch("field shapes differ");
    double s = 0;
    for (int comp = 0; comp < x.m; ++comp)
        for (long c = 0; c < x.cells(); ++c)
            s += g.b[c] * x.at(comp, c) * y.at(comp, c);
    return s * x.grid.cell_measure();
}

double norm_b(const Field& x, const ConformalMetric& g) {
    return std::sqrt(std::max(inner_b(x, x, g), 0.0));
}

Field weighted_laplacian(const Field& u, const ConformalMetric& g) {
    check_grid(u, g);
    const TorusGrid& G = u.grid;
    Field out(G, u.m);
    for (int comp = 0; comp < u.m; ++comp) {
        for (long c = 0; c < G.cells(); ++c) {
            double acc = 0;
            for (int k = 0; k < G.n; ++k) {
                long cu = step_up(G, c, k), cd = step_down(G, c, k);
                double inv_h2 = 1.0 / (G.h(k) * G.h(k));
                acc += (g.a[c] * (u.at(comp, cu) - u.at(comp, c)) -
                        g.a[cd] * (u.at(comp, c) - u.at(comp, cd))) *
                       inv_h2;
            }
            out.at(comp, c) = acc / g.b[c];
        }
    }
    return out;
}

Field energy_gradient(const Field& u, double eps, const Potential& P,
                      const ConformalMetric& g) {
    check_grid(u, g);
    if (u.m != P.m()) throw ShapeError("field components do not match potential");
    Field grad = weighted_laplacian(u, g);
    for (double& x : grad.v) x *= -2.0 * eps;
    Vec z(u.m), gw(u.m);
    for (long c = 0; c < u.cells(); ++c) {
        for (int comp = 0; comp < u.m; ++comp) z[comp] = u.at(comp, c);
        P.gradient(z, gw);
        for (int comp = 0; comp < u.m; ++comp) grad.at(comp, c) += gw[comp] / eps;
    }
    return grad;
}

Field project_volume(const Field& u, const Vec& v, const ConformalMetric& g) {
    check_grid(u, g);
    if ((int)v.size() != u.m) throw ShapeError("volume vector size mismatch");
    Vec cur = volume(u, g);
    Field out = u;
    for (int comp = 0; comp < u.m; ++comp) {
        double shift = (v[comp] - cur[comp]) / g.vol_b;
        for (long c = 0; c < u.cells(); ++c) out.at(comp, c) += shift;
    }
    return out;
}

CriticalPoint constrained_flow(const Field& u0, double eps, const Vec& v,
                               const Potential& P, const ConformalMetric& g,
                               const FlowOptions& opts) {
    check_grid(u0, g);
    if (eps <= 0) throw ConfigError("epsilon must be positive");
    Field u = project_volume(u0, v, g);
    if (!u.finite()) throw Blowup("initial field is not finite");

    auto residual = [&](const Field& w, Vec& lam) {
        Field G = energy_gradient(w, eps, P, g);
        lam = mean_b(G, g);
        for (int comp = 0; comp < w.m; ++comp)
            for (long c = 0; c < w.cells(); ++c) G.at(comp, c) -= lam[comp];
        return G;
    };

    // conservative first step from a curvature estimate of the energy
    double max_ab = 0, h_min = 1e300;
    for (long c = 0; c < u.cells(); ++c) max_ab = std::max(max_ab, g.a[c] / g.b[c]);
    for (int k = 0; k < u.grid.n; ++k) h_min = std::min(h_min, u.grid.h(k));
    double hess_scale = 1.0;
    for (const Vec& p : P.minima()) {
        EvalResult e = P.evaluate(p);
        for (int i = 0; i < u.m; ++i) {
            double row = 0;
            for (int j = 0; j < u.m; ++j) row += std::fabs(e.hess[i * u.m + j]);
            hess_scale = std::max(hess_scale, row);
        }
    }
    double alpha = 1.0 / (8.0 * eps * max_ab / (h_min * h_min) + hess_scale / eps);

    CriticalPoint cp;
    cp.epsilon = eps;

    Vec lam;
    Field r = residual(u, lam);
    double E = energy(u, eps, P, g);
    double res = norm_b(r, g);

    Field uprev, rprev;
    // non-monotone acceptance window; plain Armijo stalls at the rounding
    // floor of the energy long before the residual tolerance is reached
    std::vector<double> recent{E};
    double best_res = res;
    double best_E = E;
    long since_best = 0;
    long it = 0;
    for (; it < opts.max_iters && res > opts.tol; ++it) {
        if (!uprev.v.empty()) {
            double ss = 0, sy = 0;
            const double meas = u.grid.cell_measure();
            for (int comp = 0; comp < u.m; ++comp)
                for (long c = 0; c < u.cells(); ++c) {
                    double s = u.at(comp, c) - uprev.at(comp, c);
                    double y = r.at(comp, c) - rprev.at(comp, c);
                    double w = g.b[c] * meas;
                    ss += w * s * s;
                    sy += w * s * y;
                }
            if (sy > 1e-300) alpha = std::clamp(ss / sy, 1e-14, 1e8);
        }

        uprev = u;
        rprev = r;
        double step = alpha;
        double Eref = *std::max_element(recent.begin(), recent.end());
        double slack = 1e-14 * (1.0 + std::fabs(E));
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            Field ut = uprev;
            for (std::size_t i = 0; i < ut.v.size(); ++i)
                ut.v[i] -= step * rprev.v[i];
            ut = project_volume(ut, v, g);
            if (!ut.finite()) throw Blowup("flow produced a non-finite field");
            double Et = energy(ut, eps, P, g);
            if (Et <= Eref - 1e-4 * step * res * res + slack) {
                u = std::move(ut);
                E = Et;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        recent.push_back(E);
        if (recent.size() > 10) recent.erase(recent.begin());
        r = residual(u, lam);
        res = norm_b(r, g);
        if (!std::isfinite(res)) throw Blowup("flow residual is not finite");
        bool e_moving = E < best_E - 1e-13 * (1.0 + std::fabs(E));
        if (E < best_E) best_E = E;
        if (res < 0.999 * best_res) {
            best_res = res;
            since_best = 0;
        } else if (e_moving) {
            since_best = 0;  // still descending, e.g. slow coarsening
        } else if (++since_best > 600) {
            break;  // residual and energy both at the precision floor
        }
    }

    cp.u = std::move(u);
    cp.lambda = lam;
    cp.energy = E;
    cp.residual_norm = res;
    cp.volume = volume(cp.u, g);
    cp.iterations = it;
    cp.converged = res <= opts.tol;
    if (!cp.converged && opts.throw_on_fail)
        throw NonConvergence("constrained flow stalled with residual " +
                             std::to_string(res));
    return cp;
}

Field linearized_apply(const Field& u, const Field& w, double eps,
                       const Potential& P, const ConformalMetric& g) {
    check_grid(u, g);
    if (!u.grid.same(w.grid) || u.m != w.m) throw GridMismatch("field shapes differ");
    Field out = weighted_laplacian(w, g);
    for (double& x : out.v) x *= -eps;
    Vec z(u.m);
    for (long c = 0; c < u.cells(); ++c) {
        for (int comp = 0; comp < u.m; ++comp) z[comp] = u.at(comp, c);
        EvalResult e = P.evaluate(z);
        for (int i = 0; i < u.m; ++i) {
            double acc = 0;
            for (int j = 0; j < u.m; ++j) acc += e.hess[i * u.m + j] * w.at(j, c);
            out.at(i, c) += acc / eps;
        }
    }
    return out;
}

Field energy_hessian_apply(const Field& u, const Field& w, double eps,
                           const Potential& P, const ConformalMetric& g) {
    Field out = linearized_apply(u, w, eps, P, g);
    Field lap = weighted_laplacian(w, g);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= eps * lap.v[i];
    return out;
}

NondegReport nondegeneracy_check(const CriticalPoint& cp, const Potential& P,
                                 const ConformalMetric& g, int k,
                                 double degeneracy_floor, std::uint64_t seed) {
    const Field& u = cp.u;
    check_grid(u, g);
    if (k < 2) k = 2;
    long dim = (long)u.m * u.cells() - u.m;  // constants removed per component
    k = (int)std::min<long>(k, dim);

    auto deflate = [&](Field& w) {
        Vec mu = mean_b(w, g);
        for (int comp = 0; comp < w.m; ++comp)
            for (long c = 0; c < w.cells(); ++c) w.at(comp, c) -= mu[comp];
    };

    NondegReport rep;
    Rng rng(seed);
    Field v0(u.grid, u.m);
    for (double& x : v0.v) x = rng.uniform(-1, 1);
    deflate(v0);
    double nv = norm_b(v0, g);
    if (nv < 1e-300) {
        rep.stalled = true;
        return rep;
    }
    for (double& x : v0.v) x /= nv;

    std::vector<Field> basis{v0};
    std::vector<double> alpha, beta;
    int steps = 0;
    for (int j = 0; j < k; ++j) {
        Field w = linearized_apply(u, basis[j], cp.epsilon, P, g);
        deflate(w);
        double aj = inner_b(w, basis[j], g);
        alpha.push_back(aj);
        ++steps;
        for (std::size_t i = 0; i < w.v.size(); ++i) {
            w.v[i] -= aj * basis[j].v[i];
            if (j > 0) w.v[i] -= beta[j - 1] * basis[j - 1].v[i];
        }
        // full reorthogonalization, twice for stability
        for (int pass = 0; pass < 2; ++pass)
            for (const Field& q : basis) {
                double c = inner_b(w, q, g);
                for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= c * q.v[i];
            }
        double scale = 1.0;
        for (double a : alpha) scale = std::max(scale, std::fabs(a));
        deflate(w);
        double bj = norm_b(w, g);
        // relative breakdown test: continuing past exhaustion would feed
        // normalized rounding noise into the basis
        if (j + 1 >= k || bj < 1e-9 * scale) break;
        beta.push_back(bj);
        for (double& x : w.v) x /= bj;
        basis.push_back(std::move(w));
    }

    if (steps < 2) {
        rep.stalled = true;
        return rep;
    }
    Mat T(steps * steps, 0.0);
    for (int i = 0; i < steps; ++i) {
        T[i * steps + i] = alpha[i];
        if (i + 1 < steps) T[i * steps + i + 1] = T[(i + 1) * steps + i] = beta[i];
    }
    Vec ritz = sym_eigenvalues(T, steps);
    double smin = 1e300;
    for (double r : ritz) smin = std::min(smin, std::fabs(r));
    rep.sigma_min = smin;
    double floor = degeneracy_floor > 0 ? degeneracy_floor : 1e-6 / cp.epsilon;
    rep.nondegenerate = smin > floor;
    return rep;
}

std::vector<double> degeneracy_scan(const Potential& P, const Vec& v,
                                    const ConformalMetric& g, double eps_lo,
                                    double eps_hi, int modes) {
    if (!g.flat_metric())
        throw ConfigError("degeneracy scan requires a flat metric");
    if ((int)v.size() != P.m()) throw ShapeError("volume vector size mismatch");
    if (eps_lo <= 0 || eps_hi < eps_lo) throw ConfigError("bad epsilon range");
    if (modes < 1) throw ConfigError("modes must be >= 1");

    Vec c(P.m());
    for (int i = 0; i < P.m(); ++i) c[i] = v[i] / g.vol_b;
    EvalResult e = P.evaluate(c);
    Vec mu = sym_eigenvalues(e.hess, P.m());

    const TorusGrid& G = g.grid;
    std::vector<double> freqs;
    auto push = [&](int j0, int j1) {
        if (j0 == 0 && j1 == 0) return;
        double a = j0 / G.lengths[0];
        double b = G.n == 2 ? j1 / G.lengths[1] : 0.0;
        freqs.push_back(4 * M_PI * M_PI * (a * a + b * b));
    };
    if (G.n == 1)
        for (int j = 1; j <= modes; ++j) push(j, 0);
    else
        for (int j0 = 0; j0 <= modes; ++j0)
            for (int j1 = 0; j1 <= modes; ++j1) push(j0, j1);

    std::vector<double> hits;
    for (double m : mu) {
        if (m >= 0) continue;
        for (double al : freqs) {
            double eps = std::sqrt(-m / al);
            if (eps >= eps_lo && eps <= eps_hi) hits.push_back(eps);
        }
    }
    std::sort(hits.begin(), hits.end(), std::greater<double>());
    std::vector<double> out;
    for (double x : hits)
        if (out.empty() || std::fabs(out.back() - x) > 1e-9 * x) out.push_back(x);
    return out;
}

double aligned_distance(const Field& A, const Field& B, const ConformalMetric& g) {
    check_grid(A, g);
    if (!A.grid.same(B.grid) || A.m != B.m) throw GridMismatch("field shapes differ");
    const TorusGrid& G = A.grid;
    const double meas = G.cell_measure();

    auto shift_dist2 = [&](int s0, int s1) {
        double d2 = 0;
        for (int comp = 0; comp < A.m; ++comp)
            for (int i0 = 0; i0 < G.shape[0]; ++i0)
                for (int i1 = 0; i1 < G.shape[1]; ++i1) {
                    long cb = G.index(i0, i1);
                    long ca = G.index(G.wrap(i0 + s0, 0),
                                      G.n == 2 ? G.wrap(i1 + s1, 1) : 0);
                    double d = A.at(comp, ca) - B.at(comp, cb);
                    d2 += g.b[cb] * d * d;
                }
        return d2 * meas;
    };

    if (!g.flat_metric()) return std::sqrt(shift_dist2(0, 0));

    // coarse scan over cyclic shifts, then refine around the best
    int st0 = std::max(1, G.shape[0] / 32);
    int st1 = G.n == 2 ? std::max(1, G.shape[1] / 32) : 1;
    double best = 1e300;
    int b0 = 0, b1 = 0;
    for (int s0 = 0; s0 < G.shape[0]; s0 += st0)
        for (int s1 = 0; s1 < (G.n == 2 ? G.shape[1] : 1); s1 += st1) {
            double d2 = shift_dist2(s0, s1);
            if (d2 < best) { best = d2; b0 = s0; b1 = s1; }
        }
    for (int d0 = -st0; d0 <= st0; ++d0)
        for (int d1 = (G.n == 2 ? -st1 : 0); d1 <= (G.n == 2 ? st1 : 0); ++d1) {
            double d2 = shift_dist2(G.wrap(b0 + d0, 0),
                                    G.n == 2 ? G.wrap(b1 + d1, 1) : 0);
            best = std::min(best, d2);
        }
    return std::sqrt(std::max(best, 0.0));
}

HuntReport hunt(const Potential& P, const ConformalMetric& g, double eps,
                const Vec& v, const std::vector<Field>& seeds,
                const HuntOptions& opts) {
    HuntReport rep;
    FlowOptions fo = opts.flow;
    fo.throw_on_fail = false;
    std::vector<CriticalPoint> found;
    for (const Field& s : seeds) {
        CriticalPoint cp;
        try {
            cp = constrained_flow(s, eps, v, P, g, fo);
        } catch (const Blowup&) {
            ++rep.dropped;
            continue;
        }
        if (!cp.converged) {
            ++rep.dropped;
            continue;
        }
        found.push_back(std::move(cp));
    }
    std::sort(found.begin(), found.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return a.energy < b.energy;
              });
    double tol = opts.dedup_tol > 0 ? opts.dedup_tol : 1e-3 * std::sqrt(g.vol_b);
    for (auto& cp : found) {
        bool dup = false;
        for (const auto& kept : rep.points)
            if (aligned_distance(cp.u, kept.u, g) < tol) { dup = true; break; }
        if (!dup) rep.points.push_back(std::move(cp));
    }
    rep.eta = (int)rep.points.size();
    return rep;
}

}  // namespace ach
