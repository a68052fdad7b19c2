#include "doctest.h"

#include <cmath>

#include "achlab/tension.hpp"

using namespace ach;

TEST_CASE("scalar double well geodesic equals the exact action 1/6") {
    // int_0^1 u(1-u) du = 1/6 for the monotone connection between the wells
    Potential P = build_double_well();
    GeodesicResult r = geodesic_distance(P, {0.0}, {1.0}, 64);
    CHECK(r.converged);
    CHECK(r.distance == doctest::Approx(1.0 / 6.0).epsilon(6e-4));
}

TEST_CASE("triple well pair to origin stays under the straight-segment bound") {
    // straight segment z=(t,0): integrand t(1-t)sqrt(1+t^2), quadrature 0.189317
    Potential P = build_product_triple_well({1, 0}, {0, 1});
    GeodesicResult r = geodesic_distance(P, {0, 0}, {1, 0}, 64);
    CHECK(r.converged);
    CHECK(r.distance <= 0.189317 + 1e-4);
    CHECK(r.distance <= 0.1866);
    CHECK(r.distance >= 0.15);
    for (const Vec& node : r.path) {
        CHECK(node[0] >= 0.0);
        CHECK(node[1] >= 0.0);
    }
}

TEST_CASE("tension matrix symmetry and immiscibility for the triple well") {
    Potential P = build_product_triple_well({1, 0}, {0, 1});
    TensionMatrix T = tension_matrix(P, 48);
    CHECK(T.N == 3);
    // swapping coordinates exchanges the first two wells
    CHECK(T.at(0, 2) == doctest::Approx(T.at(1, 2)).epsilon(1e-4));
    CHECK(std::fabs(T.at(0, 2) - T.at(1, 2)) < 1e-4);
    CHECK(T.at(0, 1) == T.at(1, 0));
    CHECK(T.at(0, 0) == 0.0);
    CHECK(T.immiscible);
    CHECK(T.worst_margin > 0.0);
    // independently optimized pair distance between the two outer wells
    CHECK(T.at(0, 1) == doctest::Approx(0.33335).epsilon(5e-3));
}

TEST_CASE("coincident endpoints give zero distance") {
    Potential P = build_double_well();
    GeodesicResult r = geodesic_distance(P, {0.25}, {0.25}, 32);
    CHECK(r.distance == 0.0);
    CHECK(r.converged);
}

TEST_CASE("negative endpoint coordinates are rejected") {
    Potential P = build_product_triple_well({1, 0}, {0, 1});
    CHECK_THROWS_AS(geodesic_distance(P, {-0.1, 0}, {1, 0}, 32), InvalidEndpoint);
    CHECK_THROWS_AS(geodesic_distance(P, {0, 0}, {1, -2}, 32), InvalidEndpoint);
}

TEST_CASE("immiscibility check on handcrafted matrices") {
    // violating matrix: omega_12 larger than the sum through phase 3
    Mat bad = {0, 3, 1,
               3, 0, 1,
               1, 1, 0};
    auto [ok, margin] = check_immiscible(bad, 3);
    CHECK(!ok);
    CHECK(margin == doctest::Approx(-1.0));

    auto [ok2, margin2] = check_immiscible(unit_tensions(3).omega, 3);
    CHECK(ok2);
    CHECK(margin2 == doctest::Approx(1.0));

    Mat asym = {0, 1, 2, 0};
    CHECK_THROWS_AS(check_immiscible(asym, 2), ShapeError);
    Mat neg = {0, -1, -1, 0};
    CHECK_THROWS_AS(check_immiscible(neg, 2), ShapeError);
}

TEST_CASE("pair index enumerates the strict upper triangle") {
    CHECK(TensionMatrix::pair_index(0, 1, 3) == 0);
    CHECK(TensionMatrix::pair_index(0, 2, 3) == 1);
    CHECK(TensionMatrix::pair_index(1, 2, 3) == 2);
    CHECK(TensionMatrix::pair_index(2, 1, 3) == 2);
}
