// Growth formulas for single pieces and their aggregation.
//
// Oracle values are worked by hand from the sublevel integral of the ruling
// monomial c * u^alpha * w^yexp over each region shape, with weight u^-beta:
// the measure of {|monomial| < eps} intersected with the region splits at the
// scale where the sublevel boundary crosses the region boundary, giving one
// exponent per boundary and a logarithm exactly on ties.

#include "oscindex/growth.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace oscindex;

namespace {
PieceShape bottom_shape(Rational alpha, int yexp, Rational hi_exp) {
    PieceShape s;
    s.alpha = alpha;
    s.yexp = yexp;
    s.hi_exp = hi_exp;
    return s;
}

PieceShape washer_shape(Rational alpha, int yexp, Rational hi_exp, Rational lo_exp) {
    PieceShape s = bottom_shape(alpha, yexp, hi_exp);
    s.has_lower = true;
    s.lo_exp = lo_exp;
    return s;
}
} // namespace

TEST_CASE("flat ruling monomial gives the single-regime exponent") {
    // Band or bottom ruled by c*u^2 under w < H*u: measure eps^((2-beta)/2).
    for (auto beta : {make_rational(0), make_rational(1, 2), make_rational(1),
                      make_rational(3, 2)}) {
        GrowthPair g = piece_growth(bottom_shape(Rational(2), 0, Rational(1)), beta);
        CHECK(g.g == (Rational(2) - beta) / 2);
        CHECK(g.log_power == 0);
    }
}

TEST_CASE("pure power bottom piece ties into a logarithm at the right weight") {
    // Ruled by w^4 under w < H*u: exponents (2-beta)/4 from the cap and 1/4
    // from the free w direction; they tie exactly at beta = 1.
    PieceShape s = bottom_shape(Rational(0), 4, Rational(1));
    GrowthPair g0 = piece_growth(s, Rational(0));
    CHECK(g0.g == make_rational(1, 4));
    CHECK(g0.log_power == 0);
    GrowthPair g1 = piece_growth(s, Rational(1));
    CHECK(g1.g == make_rational(1, 4));
    CHECK(g1.log_power == 1);
}

TEST_CASE("crossed-axes bottom piece carries its logarithm at beta zero") {
    // Ruled by u^2 w^2 under w < u: both regimes give 1/2 at beta = 0.
    GrowthPair g = piece_growth(bottom_shape(Rational(2), 2, Rational(1)), Rational(0));
    CHECK(g.g == make_rational(1, 2));
    CHECK(g.log_power == 1);
}

TEST_CASE("widening washer takes the smaller of its two boundary exponents") {
    // Ruled by u w^2 between w ~ u^(3/2) and w ~ u: exponents (2-beta)/3 and
    // (5/2-beta)/4; at beta = 0 the deeper boundary wins with 5/8.
    PieceShape s = washer_shape(Rational(1), 2, Rational(1), make_rational(3, 2));
    GrowthPair g = piece_growth(s, Rational(0));
    CHECK(g.g == make_rational(5, 8));
    CHECK(g.log_power == 0);
}

TEST_CASE("fixed-ratio slab is a single regime even with a w power") {
    // Both boundaries at the same scale: no second regime, no tie logarithm.
    PieceShape s = washer_shape(Rational(0), 2, Rational(1), Rational(1));
    GrowthPair g = piece_growth(s, Rational(0));
    CHECK(g.g == Rational(1));
    CHECK(g.log_power == 0);
}

TEST_CASE("washer boundary tie produces a logarithm") {
    // Ruled by w^2 between w ~ u^2 and w ~ u at beta = 1/2: exponents
    // (2-beta)/2 and (3-beta)/4 are both 3/4... they differ; instead build an
    // exact tie: ruled by u w between w ~ u^2 and w ~ u at beta = 0 gives
    // (1+1)/(1+1) = 1 and (1+2)/(1+2) = 1.
    PieceShape s = washer_shape(Rational(1), 1, Rational(1), Rational(2));
    GrowthPair g = piece_growth(s, Rational(0));
    CHECK(g.g == Rational(1));
    CHECK(g.log_power == 1);
}

TEST_CASE("constant ruling monomial is rejected") {
    CHECK_THROWS_AS(piece_growth(bottom_shape(Rational(0), 0, Rational(1)), Rational(0)),
                    std::domain_error);
}

TEST_CASE("aggregation keeps the smallest exponent and its strongest logarithm") {
    GrowthPair a{make_rational(5, 8), 0};
    GrowthPair b{make_rational(2, 3), 0};
    GrowthPair c{make_rational(5, 8), 1};
    GrowthPair d{make_rational(1, 2), 0};
    GrowthPair e{make_rational(3, 4), 1};

    GrowthPair r1 = aggregate_growth({a, b, c});
    CHECK(r1.g == make_rational(5, 8));
    CHECK(r1.log_power == 1);

    GrowthPair r2 = aggregate_growth({d, e});
    CHECK(r2.g == make_rational(1, 2));
    CHECK(r2.log_power == 0);

    CHECK_THROWS_AS(aggregate_growth({}), std::domain_error);
}
