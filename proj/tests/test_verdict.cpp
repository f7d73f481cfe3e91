#include <catch2/catch_amalgamated.hpp>

#include "oscindex/parse.hpp"
#include "oscindex/verdict.hpp"

using namespace oscindex;

static GrowthPair pair_of(int num, int den, int log_power = 0) {
    GrowthPair g;
    g.g = make_rational(num, den);
    g.log_power = log_power;
    return g;
}

TEST_CASE("threshold is the larger of 2 and the reciprocal index") {
    HessianInfo curved = classify_hessian(parse_expression("x^2 + y^2"));

    MaximalVerdict flat = maximal_verdict(pair_of(1, 1), curved, Rational(0));
    REQUIRE(flat.has_threshold);
    CHECK(flat.threshold == Rational(2)); // 1/g = 1 loses to 2

    MaximalVerdict cusp = maximal_verdict(pair_of(5, 6), curved, Rational(0));
    CHECK(cusp.threshold == Rational(2)); // 6/5 still below 2

    MaximalVerdict steep = maximal_verdict(pair_of(1, 5), curved, Rational(0));
    CHECK(steep.threshold == Rational(5)); // reciprocal takes over past 1/2
}

TEST_CASE("vanishing determinant suppresses the threshold") {
    HessianInfo ruled = classify_hessian(parse_expression("(x + y)^3"));
    REQUIRE(ruled.degenerate);
    MaximalVerdict v = maximal_verdict(pair_of(1, 3), ruled, Rational(1));
    CHECK_FALSE(v.has_threshold);
    CHECK_FALSE(v.sharp);
}

TEST_CASE("sharpness tracks the surface height at the origin") {
    HessianInfo curved = classify_hessian(parse_expression("y^2 - x^3"));
    CHECK_FALSE(maximal_verdict(pair_of(5, 6), curved, Rational(0)).sharp);
    CHECK(maximal_verdict(pair_of(5, 6), curved, Rational(1)).sharp);
    CHECK(maximal_verdict(pair_of(5, 6), curved, make_rational(-3, 7)).sharp);
}

TEST_CASE("large index gives the full triangle") {
    for (auto idx : {pair_of(1, 1), pair_of(5, 6), pair_of(1, 2)}) {
        SobolevRegion r = radon_region(idx);
        CHECK(r.triangle);
        REQUIRE(r.vertices.size() == 3);
        CHECK(r.vertices[2].x == make_rational(1, 2));
        CHECK(r.vertices[2].y == make_rational(1, 2));
    }
}

TEST_CASE("small index truncates the triangle to a trapezoid") {
    SobolevRegion r = radon_region(pair_of(1, 4));
    CHECK_FALSE(r.triangle);
    REQUIRE(r.vertices.size() == 4);
    CHECK(r.vertices[2].x == make_rational(3, 4));
    CHECK(r.vertices[2].y == make_rational(1, 4));
    CHECK(r.vertices[3].x == make_rational(1, 4));
    CHECK(r.vertices[3].y == make_rational(1, 4));
}

TEST_CASE("membership is strict interior membership") {
    SobolevRegion tri = radon_region(pair_of(1, 1));
    CHECK(region_contains(tri, make_rational(1, 2), make_rational(1, 4)));
    CHECK_FALSE(region_contains(tri, make_rational(1, 2), make_rational(1, 2))); // apex
    CHECK_FALSE(region_contains(tri, Rational(0), Rational(0)));                 // corner
    CHECK_FALSE(region_contains(tri, make_rational(1, 2), Rational(0)));         // edge
    CHECK_FALSE(region_contains(tri, Rational(2), Rational(0)));                 // outside

    SobolevRegion trap = radon_region(pair_of(1, 4));
    CHECK(region_contains(trap, make_rational(1, 2), make_rational(1, 8)));
    CHECK(region_contains(trap, make_rational(1, 2), make_rational(6, 25))); // under the lid
    CHECK_FALSE(region_contains(trap, make_rational(1, 2), make_rational(1, 4))); // on the lid
    CHECK_FALSE(region_contains(trap, make_rational(1, 2), make_rational(3, 8))); // above
}

TEST_CASE("derived verdicts combine the pieces") {
    SurfaceSpec spec;
    spec.expr_text = "x^5*y^2";
    spec.label = spec.expr_text;
    spec.expr = parse_expression(spec.expr_text);
    spec.z0 = Rational(1);
    VerdictSet set = derive_verdicts(spec, pair_of(1, 5));
    CHECK_FALSE(set.hessian.degenerate);
    REQUIRE(set.maximal.has_threshold);
    CHECK(set.maximal.threshold == Rational(5));
    CHECK(set.maximal.sharp);
    CHECK_FALSE(set.radon.triangle);
    CHECK(set.radon.vertices.size() == 4);
}
