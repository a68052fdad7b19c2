#include "achlab/tension.hpp"

#include <algorithm>
#include <cmath>

#include "achlab/errors.hpp"
#include "achlab/rng.hpp"

namespace ach {

namespace {

double path_value(const Potential& P, const std::vector<Vec>& z) {
    const int m = (int)z[0].size();
    double f = 0;
    Vec mid(m);
    for (std::size_t k = 0; k + 1 < z.size(); ++k) {
        double len2 = 0;
        for (int i = 0; i < m; ++i) {
            mid[i] = 0.5 * (z[k][i] + z[k + 1][i]);
            double d = z[k + 1][i] - z[k][i];
            len2 += d * d;
        }
        f += std::sqrt(std::max(P.value(mid), 0.0)) * std::sqrt(len2);
    }
    return f;
}

// analytic gradient of the discrete functional at the interior nodes
void path_gradient(const Potential& P, const std::vector<Vec>& z,
                   std::vector<Vec>& grad) {
    const int m = (int)z[0].size();
    const int K = (int)z.size() - 1;
    grad.assign(z.size(), Vec(m, 0.0));
    Vec mid(m), gw(m);
    for (int k = 0; k < K; ++k) {
        double len2 = 0;
        for (int i = 0; i < m; ++i) {
            mid[i] = 0.5 * (z[k][i] + z[k + 1][i]);
            double d = z[k + 1][i] - z[k][i];
            len2 += d * d;
        }
        double len = std::sqrt(len2);
        double w = std::max(P.value(mid), 0.0);
        double sw = std::sqrt(std::max(w, 1e-30));
        P.gradient(mid, gw);
        for (int i = 0; i < m; ++i) {
            double s = z[k + 1][i] - z[k][i];
            double pot = gw[i] * len / (4.0 * sw);
            double dir = (len > 1e-15) ? sw * s / len : 0.0;
            grad[k][i] += pot - dir;
            grad[k + 1][i] += pot + dir;
        }
    }
}

GeodesicResult optimize_path(const Potential& P, std::vector<Vec> z,
                             const OptimizeOptions& opts) {
    const int m = (int)z[0].size();
    const int K = (int)z.size() - 1;
    GeodesicResult res;
    double f = path_value(P, z);
    std::vector<Vec> g, gprev, zprev;
    double alpha = 0.05;
    int stall = 0;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        path_gradient(P, z, g);
        double gnorm2 = 0;
        for (int k = 1; k < K; ++k) gnorm2 += dot(g[k], g[k]);
        if (gnorm2 < 1e-28) { res.converged = true; break; }

        // Barzilai-Borwein step from the previous accepted move
        if (!zprev.empty()) {
            double sy = 0, ss = 0;
            for (int k = 1; k < K; ++k)
                for (int i = 0; i < m; ++i) {
                    double s = z[k][i] - zprev[k][i];
                    double y = g[k][i] - gprev[k][i];
                    ss += s * s;
                    sy += s * y;
                }
            if (sy > 1e-300) alpha = std::clamp(ss / sy, 1e-12, 1e3);
        }

        zprev = z;
        gprev = g;
        double step = alpha;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<Vec> zt = zprev;
            double moved2 = 0;
            for (int k = 1; k < K; ++k)
                for (int i = 0; i < m; ++i) {
                    zt[k][i] = std::max(zprev[k][i] - step * g[k][i], 0.0);
                    double d = zt[k][i] - zprev[k][i];
                    moved2 += d * d;
                }
            double ft = path_value(P, zt);
            if (ft <= f - 1e-4 * moved2 / std::max(step, 1e-300)) {
                double rel = (f - ft) / std::max(std::fabs(f), 1e-30);
                z = std::move(zt);
                f = ft;
                accepted = true;
                stall = (rel < opts.tol) ? stall + 1 : 0;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) ++stall;
        if (stall >= opts.patience) { res.converged = true; ++it; break; }
    }
    res.distance = f;
    res.path = std::move(z);
    res.iterations = it;
    return res;
}

}  // namespace

GeodesicResult geodesic_distance(const Potential& P, const Vec& a, const Vec& b,
                                 int K, const OptimizeOptions& opts) {
    if (K < 16) K = 16;
    for (double x : a)
        if (x < 0) throw InvalidEndpoint("endpoint has a negative coordinate");
    for (double x : b)
        if (x < 0) throw InvalidEndpoint("endpoint has a negative coordinate");
    const int m = P.m();
    if ((int)a.size() != m || (int)b.size() != m)
        throw ShapeError("endpoint dimension does not match potential");

    if (norm(sub(a, b)) < 1e-15) {
        GeodesicResult r;
        r.path.assign(K + 1, a);
        r.converged = true;
        return r;
    }

    auto straight = [&](double bend, Rng& rng) {
        std::vector<Vec> z(K + 1, Vec(m));
        Vec dir(m);
        for (int i = 0; i < m; ++i) dir[i] = rng.uniform(-1, 1);
        double span = norm(sub(a, b));
        for (int k = 0; k <= K; ++k) {
            double t = double(k) / K;
            double s = std::sin(M_PI * t) * bend * span;
            for (int i = 0; i < m; ++i)
                z[k][i] = std::max(a[i] + t * (b[i] - a[i]) + s * dir[i], 0.0);
        }
        z[0] = a;
        z[K] = b;
        return z;
    };

    Rng rng(opts.seed);
    GeodesicResult best;
    bool have = false;
    int starts = std::max(1, opts.multistart);
    for (int s = 0; s < starts; ++s) {
        double bend = (s == 0) ? 0.0 : 0.35;
        GeodesicResult r = optimize_path(P, straight(bend, rng), opts);
        if (!r.converged && opts.throw_on_stall)
            throw NonConvergence("geodesic optimizer hit the iteration cap");
        if (!have || r.distance < best.distance - 1e-15) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

int TensionMatrix::pair_index(int i, int j, int N) {
    if (i > j) std::swap(i, j);
    // index of (i,j), i<j, in lexicographic order over i
    return i * N - i * (i + 1) / 2 + (j - i - 1);
}

TensionMatrix tension_matrix(const Potential& P, int K,
                             const OptimizeOptions& opts) {
    const int N = P.N();
    TensionMatrix T;
    T.N = N;
    T.omega.assign(N * N, 0.0);
    T.paths.resize(N * (N - 1) / 2);
    T.iterations.assign(N * (N - 1) / 2, 0);
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            OptimizeOptions po = opts;
            po.seed = opts.seed + 101 * i + 7 * j;
            GeodesicResult r;
            try {
                r = geodesic_distance(P, P.minimum(i), P.minimum(j), K, po);
            } catch (const NonConvergence& e) {
                throw NonConvergence("pair (" + std::to_string(i + 1) + "," +
                                     std::to_string(j + 1) + "): " + e.what());
            }
            T.omega[i * N + j] = T.omega[j * N + i] = r.distance;
            int pi = TensionMatrix::pair_index(i, j, N);
            T.paths[pi] = std::move(r.path);
            T.iterations[pi] = r.iterations;
        }
    }
    auto [im, margin] = check_immiscible(T.omega, N);
    T.immiscible = im;
    T.worst_margin = margin;
    return T;
}

std::pair<bool, double> check_immiscible(const Mat& omega, int N) {
    if ((int)omega.size() != N * N) throw ShapeError("omega is not N x N");
    for (int i = 0; i < N; ++i) {
        if (std::fabs(omega[i * N + i]) > 0) throw ShapeError("nonzero diagonal");
        for (int j = 0; j < N; ++j) {
            if (omega[i * N + j] < 0) throw ShapeError("negative entry");
            if (std::fabs(omega[i * N + j] - omega[j * N + i]) > 1e-12)
                throw ShapeError("omega not symmetric");
        }
    }
    double worst = 1e300;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            for (int l = 0; l < N; ++l) {
                if (l == i || l == j) continue;
                worst = std::min(worst, omega[i * N + l] + omega[l * N + j] -
                                            omega[i * N + j]);
            }
        }
    if (worst > 1e299) worst = 0;  // N < 3: no triple to test
    return {worst > 0, worst};
}

TensionMatrix unit_tensions(int N) {
    TensionMatrix T;
    T.N = N;
    T.omega.assign(N * N, 1.0);
    for (int i = 0; i < N; ++i) T.omega[i * N + i] = 0.0;
    T.paths.resize(N * (N - 1) / 2);
    auto [im, margin] = check_immiscible(T.omega, N);
    T.immiscible = im;
    T.worst_margin = margin;
    return T;
}

}  // namespace ach
