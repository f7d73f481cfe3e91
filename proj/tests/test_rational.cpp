#include <catch2/catch_amalgamated.hpp>

#include "oscindex/rational.hpp"

using namespace oscindex;

TEST_CASE("make_rational reduces and normalizes sign") {
    CHECK(make_rational(6, 4) == make_rational(3, 2));
    CHECK(make_rational(-6, 4) == make_rational(3, -2));
    CHECK(to_string(make_rational(-6, 4)) == "-3/2");
    CHECK(to_string(make_rational(8, 4)) == "2");
    CHECK_THROWS(make_rational(1, 0));
}

TEST_CASE("floor and ceil agree with mathematical convention on negatives") {
    CHECK(floor_big(make_rational(7, 2)) == 3);
    CHECK(floor_big(make_rational(-7, 2)) == -4);
    CHECK(ceil_big(make_rational(7, 2)) == 4);
    CHECK(ceil_big(make_rational(-7, 2)) == -3);
    CHECK(floor_big(make_rational(-6, 2)) == -3);
    CHECK(ceil_big(make_rational(-6, 2)) == -3);
}

TEST_CASE("pow_rational covers negative exponents and rejects 0^negative") {
    CHECK(pow_rational(make_rational(2, 3), 3) == make_rational(8, 27));
    CHECK(pow_rational(make_rational(2, 3), -2) == make_rational(9, 4));
    CHECK(pow_rational(make_rational(-2, 1), 3) == make_rational(-8, 1));
    CHECK(pow_rational(make_rational(5, 7), 0) == 1);
    CHECK_THROWS(pow_rational(Rational(0), -1));
}

TEST_CASE("rational_from_string accepts integers, fractions, decimals") {
    CHECK(rational_from_string("42") == 42);
    CHECK(rational_from_string("-42") == -42);
    CHECK(rational_from_string("3/4") == make_rational(3, 4));
    CHECK(rational_from_string("-3/4") == make_rational(-3, 4));
    CHECK(rational_from_string("0.5") == make_rational(1, 2));
    CHECK(rational_from_string("1.5") == make_rational(3, 2));
    CHECK(rational_from_string("-0.25") == make_rational(-1, 4));
    CHECK(rational_from_string(".5") == make_rational(1, 2));
    CHECK_THROWS(rational_from_string(""));
    CHECK_THROWS(rational_from_string("1/0"));
    CHECK_THROWS(rational_from_string("1.2.3"));
    CHECK_THROWS(rational_from_string("x"));
}

TEST_CASE("sign_of and abs_rational") {
    CHECK(sign_of(make_rational(-3, 7)) == -1);
    CHECK(sign_of(Rational(0)) == 0);
    CHECK(sign_of(make_rational(3, 7)) == 1);
    CHECK(abs_rational(make_rational(-3, 7)) == make_rational(3, 7));
}

TEST_CASE("to_double roundtrips simple values") {
    CHECK(to_double(make_rational(1, 2)) == 0.5);
    CHECK(to_double(make_rational(-5, 8)) == -0.625);
}

TEST_CASE("rational_near snaps doubles to dyadic rationals") {
    CHECK(rational_near(0.5) == make_rational(1, 2));
    CHECK(to_double(rational_near(0.333333333)) == Catch::Approx(1.0 / 3).epsilon(1e-5));
}
