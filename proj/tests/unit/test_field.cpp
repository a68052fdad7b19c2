#include "doctest.h"

#include <cmath>

#include "achlab/field.hpp"
#include "achlab/rng.hpp"

using namespace ach;

namespace {

Field random_field(const TorusGrid& g, int m, std::uint64_t seed, double lo = -1,
                   double hi = 1) {
    Field f(g, m);
    Rng rng(seed);
    for (double& x : f.v) x = rng.uniform(lo, hi);
    return f;
}

}  // namespace

TEST_CASE("energy of a constant field is the pure potential term") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(32, 2.0);
    ConformalMetric M = ConformalMetric::flat(g);
    Field u(g, 1, 0.5);
    double eps = 0.1;
    CHECK(energy(u, eps, P, M) == doctest::Approx(2.0 * (1.0 / 16.0) / eps));
    CHECK(volume(u, M)[0] == doctest::Approx(1.0));
}

TEST_CASE("energy gradient is the exact derivative in the weighted inner product") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(24, 1.0);
    ConformalMetric M = ConformalMetric::from_rho(
        g, [](double x, double) { return 1.0 + 0.4 * std::cos(2 * M_PI * x); });
    Field u = random_field(g, 1, 21);
    Field w = random_field(g, 1, 22);
    double eps = 0.2, t = 1e-6;

    Field G = energy_gradient(u, eps, P, M);
    Field up = u, um = u;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        up.v[i] += t * w.v[i];
        um.v[i] -= t * w.v[i];
    }
    double fd = (energy(up, eps, P, M) - energy(um, eps, P, M)) / (2 * t);
    CHECK(inner_b(G, w, M) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("energy gradient exactness holds in two dimensions too") {
    Potential P = build_product_triple_well({1, 0}, {0, 1});
    TorusGrid g = TorusGrid::square(12, 8, 1.0, 0.8);
    ConformalMetric M = ConformalMetric::from_rho(g, [](double x, double y) {
        return 1.0 + 0.3 * std::cos(2 * M_PI * x) * std::cos(2 * M_PI * y / 0.8);
    });
    Field u = random_field(g, 2, 31);
    Field w = random_field(g, 2, 32);
    double eps = 0.15, t = 1e-6;
    Field G = energy_gradient(u, eps, P, M);
    Field up = u, um = u;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
        up.v[i] += t * w.v[i];
        um.v[i] -= t * w.v[i];
    }
    double fd = (energy(up, eps, P, M) - energy(um, eps, P, M)) / (2 * t);
    CHECK(inner_b(G, w, M) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("weighted laplacian is self adjoint in the b inner product") {
    TorusGrid g = TorusGrid::square(10, 14);
    ConformalMetric M = ConformalMetric::from_rho(g, [](double x, double y) {
        return 1.0 + 0.25 * std::sin(2 * M_PI * (x + y));
    });
    Field u = random_field(g, 1, 41);
    Field w = random_field(g, 1, 42);
    CHECK(inner_b(weighted_laplacian(u, M), w, M) ==
          doctest::Approx(inner_b(u, weighted_laplacian(w, M), M)).epsilon(1e-10));
}

TEST_CASE("volume projection is exact and idempotent") {
    TorusGrid g = TorusGrid::line(16);
    ConformalMetric M = ConformalMetric::from_rho(
        g, [](double x, double) { return 1.0 + 0.5 * std::sin(2 * M_PI * x); });
    Field u = random_field(g, 2, 51);
    Vec target = {0.37, -0.11};
    Field p = project_volume(u, target, M);
    Vec v = volume(p, M);
    CHECK(v[0] == doctest::Approx(0.37).epsilon(1e-13));
    CHECK(v[1] == doctest::Approx(-0.11).epsilon(1e-13));
    Field p2 = project_volume(p, target, M);
    for (std::size_t i = 0; i < p.v.size(); ++i)
        CHECK(p2.v[i] == doctest::Approx(p.v[i]).epsilon(1e-14));
}

TEST_CASE("constrained flow finds a critical point of the double well") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(64);
    ConformalMetric M = ConformalMetric::flat(g);
    // two-interface seed with volume one half
    Field seed(g, 1);
    for (long c = 0; c < g.cells(); ++c) {
        double x = g.center((int)c, 0);
        seed.at(0, c) = (x > 0.25 && x < 0.75) ? 1.0 : 0.0;
    }
    FlowOptions fo;
    fo.tol = 1e-9;
    CriticalPoint cp = constrained_flow(seed, 0.05, {0.5}, P, M, fo);
    CHECK(cp.converged);
    CHECK(cp.residual_norm <= 1e-9);
    CHECK(cp.volume[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cp.energy > 0.0);
    CHECK(cp.energy < 1.0);
    // gradient minus the multiplier is small pointwise as well
    Field G = energy_gradient(cp.u, 0.05, P, M);
    Vec lam = mean_b(G, M);
    CHECK(lam[0] == doctest::Approx(cp.lambda[0]).epsilon(1e-9));
}

TEST_CASE("degeneracy scan reproduces the closed-form thresholds") {
    // constant 1/2 has W''=-1; on the unit circle eps_j = 1/(2 pi j)
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(32);
    ConformalMetric M = ConformalMetric::flat(g);
    std::vector<double> eps = degeneracy_scan(P, {0.5}, M, 0.01, 1.0, 3);
    REQUIRE(eps.size() == 3);
    CHECK(eps[0] == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-12));
    CHECK(eps[1] == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-12));
    CHECK(eps[2] == doctest::Approx(1.0 / (6 * M_PI)).epsilon(1e-12));
    // constant at a well has a positive Hessian: no degeneracies
    CHECK(degeneracy_scan(P, {1.0}, M, 0.01, 1.0, 3).empty());
    ConformalMetric bumpy = metric_from_expr(TorusGrid::square(16, 16), "bump:0.5");
    CHECK_THROWS_AS(degeneracy_scan(P, {0.5}, bumpy, 0.01, 1.0, 3), ConfigError);
}

TEST_CASE("linearized operator is symmetric and matches plane-wave eigenvalues") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(64);
    ConformalMetric M = ConformalMetric::flat(g);
    Field u(g, 1, 1.0);  // sit at the well u=1, Hess W = 2
    Field w1 = random_field(g, 1, 61), w2 = random_field(g, 1, 62);
    double eps = 0.1;
    CHECK(inner_b(linearized_apply(u, w1, eps, P, M), w2, M) ==
          doctest::Approx(inner_b(w1, linearized_apply(u, w2, eps, P, M), M))
              .epsilon(1e-10));

    Field wave(g, 1);
    for (long c = 0; c < g.cells(); ++c)
        wave.at(0, c) = std::cos(2 * M_PI * g.center((int)c, 0));
    Field Lw = linearized_apply(u, wave, eps, P, M);
    double h = g.h(0);
    double lam_disc = eps * 2.0 * (1 - std::cos(2 * M_PI * h)) / (h * h) + 2.0 / eps;
    for (long c = 0; c < g.cells(); ++c)
        CHECK(Lw.at(0, c) == doctest::Approx(lam_disc * wave.at(0, c)).epsilon(1e-9));
}

TEST_CASE("nondegeneracy check accepts a stable constant state") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(64);
    ConformalMetric M = ConformalMetric::flat(g);
    CriticalPoint cp;
    cp.u = Field(g, 1, 1.0);
    cp.epsilon = 0.1;
    NondegReport rep = nondegeneracy_check(cp, P, M, 40);
    CHECK(!rep.stalled);
    CHECK(rep.nondegenerate);
    // smallest eigenvalue on zero-mean fields: first Fourier mode
    double h = g.h(0);
    double lam1 = 0.1 * 2.0 * (1 - std::cos(2 * M_PI * h)) / (h * h) + 2.0 / 0.1;
    CHECK(rep.sigma_min == doctest::Approx(lam1).epsilon(1e-6));
}

TEST_CASE("aligned distance ignores cyclic translations on flat tori") {
    TorusGrid g = TorusGrid::line(64);
    ConformalMetric M = ConformalMetric::flat(g);
    Field a(g, 1);
    for (long c = 0; c < g.cells(); ++c)
        a.at(0, c) = std::tanh(10 * std::sin(2 * M_PI * g.center((int)c, 0)));
    Field b(g, 1);
    for (long c = 0; c < g.cells(); ++c)
        b.at(0, c) = a.at(0, (c + 17) % g.cells());
    CHECK(aligned_distance(a, b, M) < 1e-12);
    Field c = a;
    for (double& x : c.v) x += 0.3;
    CHECK(aligned_distance(a, c, M) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("hunt dedups translated copies of the same critical point") {
    Potential P = build_double_well();
    TorusGrid g = TorusGrid::line(48);
    ConformalMetric M = ConformalMetric::flat(g);
    std::vector<Field> seeds;
    for (int s = 0; s < 3; ++s) {
        Field f(g, 1);
        for (long c = 0; c < g.cells(); ++c) {
            double x = g.center((int)c, 0) + 0.2 * s;
            x -= std::floor(x);
            f.at(0, c) = (x < 0.5) ? 1.0 : 0.0;
        }
        seeds.push_back(f);
    }
    seeds.push_back(Field(g, 1, 0.5));  // constant branch
    HuntOptions ho;
    ho.flow.tol = 1e-8;
    HuntReport rep = hunt(P, M, 0.06, {0.5}, seeds, ho);
    CHECK(rep.dropped == 0);
    CHECK(rep.eta == 2);  // interface state (3 copies collapse) plus the constant
    CHECK(rep.points[0].energy <= rep.points[1].energy);
}
