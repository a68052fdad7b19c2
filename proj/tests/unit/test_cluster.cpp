#include "doctest.h"

#include <cmath>

#include "achlab/cluster.hpp"
#include "achlab/rng.hpp"

using namespace ach;

namespace {

Cluster two_bands(const TorusGrid& g) {
    Cluster c(g, 2, 2);
    for (long cell = 0; cell < g.cells(); ++cell) {
        int i0, i1;
        g.coords(cell, i0, i1);
        if (g.center(i1, 1) < 0.5) c.labels[cell] = 1;
    }
    return c;
}

}  // namespace

TEST_CASE("volumes partition the total metric volume") {
    TorusGrid g = TorusGrid::square(32, 32);
    ConformalMetric M = ConformalMetric::flat(g);
    Cluster ext(g, 3, 3);
    Vec v = volumes(ext, M);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == doctest::Approx(1.0));

    Cluster bands = two_bands(g);
    Vec vb = volumes(bands, M);
    CHECK(vb[0] == doctest::Approx(0.5));
    CHECK(vb[1] == doctest::Approx(0.5));

    ConformalMetric B = metric_from_expr(g, "bump:0.3");
    Rng rng(8);
    Cluster rc(g, 3, 3);
    for (int& l : rc.labels) l = 1 + (int)(rng.uniform() * 3);
    Vec vr = volumes(rc, B);
    CHECK(vr[0] + vr[1] + vr[2] == doctest::Approx(B.vol_b).epsilon(1e-12));
}

TEST_CASE("interface measure counts faces with the length weight") {
    TorusGrid g = TorusGrid::square(32, 32);
    ConformalMetric M = ConformalMetric::flat(g);
    Cluster bands = two_bands(g);
    Mat H = interface_measure(bands, M);
    CHECK(H[0 * 2 + 1] == doctest::Approx(2.0));
    CHECK(H[1 * 2 + 0] == doctest::Approx(2.0));
    CHECK(H[0] == 0.0);

    Cluster one(g, 2, 1);
    Mat Z = interface_measure(one, M);
    CHECK(Z[1] == 0.0);

    // axis-aligned square of side s has l1 boundary 4s
    double s = 0.25;
    Cluster sq(g, 2, 2);
    for (long cell = 0; cell < g.cells(); ++cell) {
        int i0, i1;
        g.coords(cell, i0, i1);
        if (g.center(i0, 0) < s && g.center(i1, 1) < s) sq.labels[cell] = 1;
    }
    Mat Hs = interface_measure(sq, M);
    CHECK(Hs[1] == doctest::Approx(4 * s));
}

TEST_CASE("multi perimeter uses the ordered-pair convention") {
    TorusGrid g = TorusGrid::square(32, 32);
    ConformalMetric M = ConformalMetric::flat(g);
    Cluster bands = two_bands(g);
    TensionMatrix T = unit_tensions(2);
    T.omega = {0, 0.25, 0.25, 0};
    CHECK(multi_perimeter(bands, T, M) == doctest::Approx(4 * 0.25));

    // with unit weights the total equals the sum of chamber perimeters
    Rng rng(12);
    Cluster rc(g, 3, 3);
    for (int& l : rc.labels) l = 1 + (int)(rng.uniform() * 3);
    TensionMatrix U = unit_tensions(3);
    double mp = multi_perimeter(rc, U, M);
    double chamber_sum = 0;
    for (int i = 1; i <= 3; ++i) {
        Cluster solo(g, 2, 2);
        for (long cell = 0; cell < g.cells(); ++cell)
            if (rc.labels[cell] == i) solo.labels[cell] = 1;
        chamber_sum += interface_measure(solo, M)[1];
    }
    CHECK(mp == doctest::Approx(chamber_sum).epsilon(1e-12));

    Mat H = interface_measure(rc, M);
    double half = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) half += H[i * 3 + j];
    CHECK(half == doctest::Approx(mp / 2).epsilon(1e-12));
}

TEST_CASE("flat distance is a pseudometric over interior chambers") {
    TorusGrid g = TorusGrid::square(16, 16);
    ConformalMetric M = ConformalMetric::flat(g);
    Cluster a = two_bands(g);
    CHECK(flat_distance(a, a, M) == 0.0);

    // flip a patch of chamber 1 to the exterior
    Cluster b = a;
    int flipped = 0;
    for (long cell = 0; cell < g.cells() && flipped < 26; ++cell)
        if (b.labels[cell] == 1) {
            b.labels[cell] = 2;
            ++flipped;
        }
    CHECK(flat_distance(a, b, M) == doctest::Approx(26.0 / 256.0));

    Rng rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        Cluster x(g, 3, 3), y(g, 3, 3), z(g, 3, 3);
        for (long cell = 0; cell < g.cells(); ++cell) {
            x.labels[cell] = 1 + (int)(rng.uniform() * 3);
            y.labels[cell] = 1 + (int)(rng.uniform() * 3);
            z.labels[cell] = 1 + (int)(rng.uniform() * 3);
        }
        double dxy = flat_distance(x, y, M), dyz = flat_distance(y, z, M);
        double dxz = flat_distance(x, z, M);
        CHECK(dxy == doctest::Approx(flat_distance(y, x, M)));
        CHECK(dxz <= dxy + dyz + 1e-12);
    }
}

TEST_CASE("interior diameter on canonical shapes") {
    TorusGrid g = TorusGrid::square(64, 64);
    double r = 0.1;
    Cluster disk = digital_disk(g, 0.5, 0.5, M_PI * r * r);
    DiameterResult d = interior_diameter(disk);
    CHECK(d.exact);
    CHECK(d.value == doctest::Approx(2 * r).epsilon(0.2));

    Cluster single(g, 2, 2);
    single.labels[g.index(3, 7)] = 1;
    CHECK(interior_diameter(single).value == 0.0);

    Cluster pair(g, 2, 2);
    pair.labels[g.index(0, 0)] = 1;
    pair.labels[g.index(32, 0)] = 1;  // periodic distance 0.5
    CHECK(interior_diameter(pair).value == doctest::Approx(0.5).epsilon(0.05));

    Cluster empty(g, 2, 2);
    CHECK_THROWS_AS(interior_diameter(empty), EmptyInterior);
}

TEST_CASE("field labeling picks the nearest well in the path metric") {
    Potential P = build_double_well();
    TensionMatrix T = tension_matrix(P, 32);
    TorusGrid g = TorusGrid::line(32);

    Field all0(g, 1, 0.0);  // well index 2 in the stored order {1, 0}
    Cluster c0 = from_field(all0, P, T);
    for (int l : c0.labels) CHECK(l == 2);

    Field all1(g, 1, 1.0);
    Cluster c1 = from_field(all1, P, T);
    for (int l : c1.labels) CHECK(l == 1);

    // exact tie at the symmetric midpoint keeps the smaller label
    Field mid(g, 1, 0.5);
    Cluster cm = from_field(mid, P, T);
    for (int l : cm.labels) CHECK(l == 1);
}

TEST_CASE("isoperimetric bounds anchor to the disk constant") {
    CHECK(isoperimetric_constant(2) == doctest::Approx(2 * std::sqrt(M_PI)));
    CHECK(isoperimetric_constant(2) == doctest::Approx(3.5449).epsilon(1e-4));

    TensionMatrix U = unit_tensions(2);
    IsoBounds b = isoperimetric_bounds({0.01}, U, 2);
    CHECK(b.upper == doctest::Approx(2 * std::sqrt(M_PI * 0.01)).epsilon(1e-12));
    CHECK(b.lower == doctest::Approx(b.upper).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(0.35449).epsilon(1e-4));

    IsoBounds z = isoperimetric_bounds({0.0}, U, 2);
    CHECK(z.lower == 0.0);
    CHECK(z.upper == 0.0);
    CHECK_THROWS_AS(isoperimetric_bounds({-0.1}, U, 2), NegativeVolume);
}

TEST_CASE("threshold dynamics reaches a near-disk for a single chamber") {
    TorusGrid g = TorusGrid::square(128, 128);
    ConformalMetric M = ConformalMetric::flat(g);
    TensionMatrix U = unit_tensions(2);
    MboResult r = mbo_minimize({0.05}, U, M);
    Vec v = volumes(r.cluster, M);
    CHECK(v[0] == doctest::Approx(0.05).epsilon(2e-4));
    double per = isotropic_perimeter(r.cluster, M);
    double disk = 2 * std::sqrt(M_PI * 0.05);
    CHECK(per == doctest::Approx(disk).epsilon(0.04));
}

TEST_CASE("threshold dynamics double bubble beats the two-disk split") {
    TorusGrid g = TorusGrid::square(128, 128);
    ConformalMetric M = ConformalMetric::flat(g);
    TensionMatrix U = unit_tensions(3);
    MboResult r = mbo_minimize({0.03, 0.03}, U, M);
    Vec v = volumes(r.cluster, M);
    CHECK(v[0] == doctest::Approx(0.03).epsilon(1e-2));
    CHECK(v[1] == doctest::Approx(0.03).epsilon(1e-2));
    double per = isotropic_perimeter(r.cluster, M);
    // equal-area standard double bubble, arcs meeting at 120 degrees
    double r_arc = std::sqrt(0.03 / (2 * M_PI / 3 + std::sqrt(3) / 4));
    double bubble = r_arc * (8 * M_PI / 3 + std::sqrt(3));
    CHECK(per == doctest::Approx(bubble).epsilon(0.05));

    MboResult rz = mbo_minimize({0.03, 0.0}, U, M);
    CHECK(volumes(rz.cluster, M)[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("subdomain report measures disks and counts components") {
    TorusGrid g = TorusGrid::square(64, 64);
    ConformalMetric M = ConformalMetric::flat(g);
    double r = 0.12;
    Cluster disk = digital_disk(g, 0.5, 0.5, M_PI * r * r);
    SubdomainReport rep = large_subdomain_report(disk, M);
    CHECK(rep.components == 1);
    CHECK(rep.ratio == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(0.15));

    Cluster two = digital_disk(g, 0.25, 0.25, M_PI * 0.01);
    Cluster far = digital_disk(g, 0.75, 0.75, M_PI * 0.01);
    for (long cell = 0; cell < g.cells(); ++cell)
        if (far.labels[cell] == 1) two.labels[cell] = 1;
    SubdomainReport rep2 = large_subdomain_report(two, M);
    CHECK(rep2.components == 2);
    CHECK(rep2.ratio > rep.ratio);
}

TEST_CASE("cluster snapshot round trip") {
    TorusGrid g = TorusGrid::square(16, 8, 2.0, 1.0);
    Rng rng(5);
    Cluster c(g, 4, 4);
    for (int& l : c.labels) l = 1 + (int)(rng.uniform() * 4);
    Cluster back = cluster_from_text(cluster_to_text(c));
    CHECK(back.grid.same(g));
    CHECK(back.N == 4);
    CHECK(back.labels == c.labels);
    CHECK_THROWS_AS(cluster_from_text("ACHF 1\n"), IoError);
}
