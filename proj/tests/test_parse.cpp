#include <catch2/catch_amalgamated.hpp>

#include "oscindex/parse.hpp"

#include <sstream>

using namespace oscindex;

TEST_CASE("expressions parse to the expected polynomials") {
    CHECK(to_string(parse_expression("x^2+y^2")) == "y^2 + x^2");
    CHECK(to_string(parse_expression("x^2*y + y^4")) == "y^4 + x^2*y");
    CHECK(to_string(parse_expression("(y - x^2)^2")) == "y^2 - 2*x^2*y + x^4");
    CHECK(to_string(parse_expression("-y")) == "-y");
    CHECK(to_string(parse_expression("2*x - 3*y")) == "-3*y + 2*x");
    CHECK(to_string(parse_expression("x^2/4")) == "1/4*x^2");
    CHECK(to_string(parse_expression("0.5*x*y")) == "1/2*x*y");
    CHECK(to_string(parse_expression("x - x")) == "0");
    CHECK(to_string(parse_expression("((x))")) == "x");
    CHECK(to_string(parse_expression(" ( y + x ) ^ 2 ")) == "y^2 + 2*x*y + x^2");
}

TEST_CASE("parse errors carry byte offsets") {
    auto offset_of = [](const std::string& text) -> size_t {
        try {
            parse_expression(text);
        } catch (const ParseError& e) {
            return e.offset;
        }
        return static_cast<size_t>(-1);
    };
    CHECK(offset_of("x +") == 3);       // ends after the operator
    CHECK(offset_of("x ^ z") == 4);     // bad exponent
    CHECK(offset_of("(x + y") == 0);    // unbalanced paren reported at the opener
    CHECK(offset_of("x @ y") == 2);     // stray operator
    CHECK(offset_of("x / y") == 2);     // non-constant divisor reported at the slash
    CHECK(offset_of("x^999") == 2);     // exponent cap
    CHECK(offset_of("x y") == 2);       // implicit product rejected
}

TEST_CASE("surface files load with defaults") {
    std::istringstream in(
        "# a comment\n"
        "label = beak\n"
        "expr  = x^2*y + y^4\n"
        "beta  = 1/2\n"
        "radius= 0.25\n");
    SurfaceSpec spec = parse_surface_stream(in, "test");
    CHECK(spec.label == "beak");
    CHECK(to_string(spec.expr) == "y^4 + x^2*y");
    CHECK(spec.beta == make_rational(1, 2));
    CHECK(spec.radius == make_rational(1, 4));
    CHECK(spec.z0 == 0);

    std::istringstream bare("expr = y^2\n");
    SurfaceSpec plain = parse_surface_stream(bare, "test");
    CHECK(plain.label == "y^2"); // label defaults to the expression text
    CHECK(plain.beta == 0);
    CHECK(plain.radius == 1);
}

TEST_CASE("surface file errors are located") {
    std::istringstream missing("beta = 1\n");
    CHECK_THROWS_AS(parse_surface_stream(missing, "test"), ValidationError);
    std::istringstream unknown("expr = y\nfoo = 1\n");
    CHECK_THROWS_WITH(parse_surface_stream(unknown, "test"),
                      Catch::Matchers::ContainsSubstring("unknown key"));
    std::istringstream badbeta("expr = y\nbeta = nope\n");
    CHECK_THROWS_WITH(parse_surface_stream(badbeta, "test"),
                      Catch::Matchers::ContainsSubstring("test:2"));
}

TEST_CASE("validation enforces the analytic frame") {
    SurfaceSpec s;
    s.expr = parse_expression("x^2 + y^2");
    CHECK_NOTHROW(validate_surface(s));
    s.beta = Rational(2);
    CHECK_THROWS_AS(validate_surface(s), ValidationError);
    s.beta = make_rational(1, 2);
    CHECK_NOTHROW(validate_surface(s));
    s.expr = parse_expression("x^2 + 1");
    CHECK_THROWS_WITH(validate_surface(s), Catch::Matchers::ContainsSubstring("vanish"));
    s.expr = parse_expression("x - x");
    CHECK_THROWS_WITH(validate_surface(s), Catch::Matchers::ContainsSubstring("zero"));
    s.expr = parse_expression("y^2");
    s.radius = Rational(2);
    CHECK_THROWS_WITH(validate_surface(s), Catch::Matchers::ContainsSubstring("radius"));
}
