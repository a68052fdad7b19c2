#include "doctest.h"

#include <cmath>

#include "achlab/potential.hpp"
#include "achlab/rng.hpp"

using namespace ach;

TEST_CASE("double well vanishes at both minima") {
    Potential P = build_double_well();
    CHECK(P.value({0.0}) == 0.0);
    CHECK(P.value({1.0}) == 0.0);
    EvalResult e0 = P.evaluate({0.0});
    EvalResult e1 = P.evaluate({1.0});
    CHECK(std::fabs(e0.grad[0]) < 1e-14);
    CHECK(std::fabs(e1.grad[0]) < 1e-14);
    CHECK(e0.hess[0] == doctest::Approx(2.0));
    CHECK(e1.hess[0] == doctest::Approx(2.0));
    CHECK(P.value({0.5}) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("product triple well closed-form spot values") {
    Potential P = build_product_triple_well({1, 0}, {0, 1});
    CHECK(P.value({1, 0}) == 0.0);
    CHECK(P.value({0, 1}) == 0.0);
    CHECK(P.value({0, 0}) == 0.0);
    // three squared distances from (1/2,1/2) are all 1/2
    CHECK(P.value({0.5, 0.5}) == doctest::Approx(0.125));
    // at (2,2): |z-p1|^2=5, |z-p2|^2=5, |z|^2=8
    CHECK(P.value({2, 2}) == doctest::Approx(200.0));
    EvalResult e = P.evaluate({1, 0});
    CHECK(e.hess[0] == doctest::Approx(4.0));
    CHECK(e.hess[3] == doctest::Approx(4.0));
    CHECK(std::fabs(e.hess[1]) < 1e-12);
    CHECK(std::fabs(e.hess[2]) < 1e-12);
}

static void fd_check(const Potential& P, const Vec& z) {
    const int m = (int)z.size();
    EvalResult e = P.evaluate(z);
    double t = 1e-6;
    for (int i = 0; i < m; ++i) {
        Vec zp = z, zm = z;
        zp[i] += t;
        zm[i] -= t;
        double fd = (P.evaluate(zp).value - P.evaluate(zm).value) / (2 * t);
        CHECK(e.grad[i] == doctest::Approx(fd).epsilon(1e-5));
        for (int j = 0; j < m; ++j) {
            double gd = (P.evaluate(zp).grad[j] - P.evaluate(zm).grad[j]) / (2 * t);
            CHECK(e.hess[i * m + j] == doctest::Approx(gd).epsilon(1e-4));
        }
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    Potential T = build_product_triple_well({1, 0}, {0, 1});
    Potential S = build_product_triple_well({1, 0}, {0, 1}, SpliceRecord{3.0, 0.5});
    Rng rng(42);
    for (int s = 0; s < 12; ++s) {
        Vec z = {rng.uniform(-1.5, 2.5), rng.uniform(-1.5, 2.5)};
        fd_check(T, z);
        fd_check(S, z);
    }
    // points inside the splice shell [R, 2R]
    for (int s = 0; s < 12; ++s) {
        double r = rng.uniform(3.05, 5.95), th = rng.uniform(0, 2 * M_PI);
        fd_check(S, {r * std::cos(th), r * std::sin(th)});
    }
}

TEST_CASE("spliced potential is continuous across the blend shell") {
    Potential S = build_product_triple_well({1, 0}, {0, 1}, SpliceRecord{3.0, 0.5});
    Potential T = build_product_triple_well({1, 0}, {0, 1});
    for (double th : {0.3, 1.1, 2.8}) {
        Vec in = {2.999999 * std::cos(th), 2.999999 * std::sin(th)};
        Vec out = {3.000001 * std::cos(th), 3.000001 * std::sin(th)};
        CHECK(S.value(in) == doctest::Approx(S.value(out)).epsilon(1e-4));
        CHECK(S.value(in) == doctest::Approx(T.value(in)).epsilon(1e-10));
        Vec far = {6.000001 * std::cos(th), 6.000001 * std::sin(th)};
        CHECK(S.value(far) == doctest::Approx(std::pow(6.000001, 2.5)).epsilon(1e-8));
    }
}

TEST_CASE("class verification separates the three forms") {
    ConditionReport dw = verify_class(build_double_well(), 2000, 2.0);
    CHECK(dw.minima_vanish);
    CHECK(dw.hessians_pd);
    CHECK(dw.positive_away);
    CHECK(dw.w1_ok);
    CHECK(dw.w2_ok);
    CHECK(dw.w3_ok);
    CHECK(dw.all_pass());
    CHECK(dw.w0 == "pending");

    // pure degree-six product growth is supercritical in two dimensions
    ConditionReport pure = verify_class(build_product_triple_well({1, 0}, {0, 1}), 2000, 2.0);
    CHECK(pure.minima_vanish);
    CHECK(pure.hessians_pd);
    CHECK(!pure.w3_ok);
    CHECK(pure.p1_fit == doctest::Approx(6.0).epsilon(0.05));

    ConditionReport spl = verify_class(
        build_product_triple_well({1, 0}, {0, 1}, SpliceRecord{3.0, 0.5}), 2000, 2.0);
    CHECK(spl.minima_vanish);
    CHECK(spl.w3_ok);
    CHECK(spl.p1_fit == doctest::Approx(2.5).epsilon(0.05));
    CHECK(spl.subcritical);
}

TEST_CASE("a perturbed non-vanishing minimum is flagged") {
    std::vector<Vec> minima = {{1, 0}, {0, 1}, {0.02, 0.0}};
    Potential bad(PotentialForm::ProductTripleWell, 2, 3, minima,
                  GrowthRecord{6, 6, 0.1, 10, 4});
    ConditionReport rep = verify_class(bad, 500, 2.0);
    CHECK(!rep.minima_vanish);
    CHECK(!rep.all_pass());
}

TEST_CASE("degenerate minima are rejected at construction") {
    CHECK_THROWS_AS(build_product_triple_well({1, 0}, {2, 0}), DegenerateMinima);
    CHECK_THROWS_AS(build_product_triple_well({0, 0}, {0, 1}), DegenerateMinima);
    CHECK_THROWS_AS(build_product_triple_well({-1, 0}, {0, 1}), DegenerateMinima);
}

TEST_CASE("potential serialization round trip") {
    Potential S = build_product_triple_well({1, 0}, {0, 1}, SpliceRecord{3.0, 0.5});
    Potential back = potential_from_text(potential_to_text(S));
    CHECK(back.form() == PotentialForm::Spliced);
    CHECK(back.m() == 2);
    CHECK(back.N() == 3);
    CHECK(back.minimum(0) == Vec{1, 0});
    CHECK(back.splice()->radius == 3.0);
    CHECK(back.splice()->tau == 0.5);
    Rng rng(3);
    for (int s = 0; s < 20; ++s) {
        Vec z = {rng.uniform(-4, 7), rng.uniform(-4, 7)};
        CHECK(S.value(z) == doctest::Approx(back.value(z)).epsilon(1e-14));
    }

    Potential dw = potential_from_text(potential_to_text(build_double_well()));
    CHECK(dw.form() == PotentialForm::ScalarDoubleWell);
    CHECK(dw.value({0.5}) == doctest::Approx(1.0 / 16.0));

    CHECK_THROWS_AS(potential_from_text("m = 2\n"), ConfigError);
    CHECK_THROWS_AS(
        potential_from_text("form = product-triple-well\nm = 2\nN = 3\n"
                            "minima = 1 0 0 1 0 0\nsplice_radius = 3\n"),
        ConfigError);
}
