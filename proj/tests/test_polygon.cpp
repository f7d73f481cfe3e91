#include <catch2/catch_amalgamated.hpp>

#include "oscindex/parse.hpp"
#include "oscindex/polygon.hpp"

using namespace oscindex;

TEST_CASE("circle: one edge of exponent 1") {
    NewtonPolygon P = newton_polygon(parse_expression("x^2 + y^2"));
    REQUIRE(P.vertices.size() == 2);
    CHECK(P.top() == PolygonVertex{Rational(0), 2});
    CHECK(P.bottom() == PolygonVertex{Rational(2), 0});
    REQUIRE(P.edges.size() == 1);
    CHECK(P.edges[0].exponent == 1);
    CHECK(P.edges[0].level == 2);
    CHECK(P.edges[0].edge_poly.c == std::vector<Rational>{Rational(1), Rational(0), Rational(1)});
    CHECK(newton_distance(P) == 1);
}

TEST_CASE("beak: fractional edge exponent and distance") {
    NewtonPolygon P = newton_polygon(parse_expression("x^2*y + y^4"));
    REQUIRE(P.vertices.size() == 2);
    CHECK(P.top() == PolygonVertex{Rational(0), 4});
    CHECK(P.bottom() == PolygonVertex{Rational(2), 1});
    REQUIRE(P.edges.size() == 1);
    CHECK(P.edges[0].exponent == make_rational(2, 3));
    // E(t) = t^4 + t
    CHECK(P.edges[0].edge_poly.degree() == 4);
    CHECK(P.edges[0].edge_poly.c[1] == 1);
    CHECK(newton_distance(P) == make_rational(8, 5));
}

TEST_CASE("collinear interior points merge into one edge") {
    // (y - x^2)^2: support (0,2), (2,1), (4,0) all on a + 2b = 4
    NewtonPolygon P = newton_polygon(parse_expression("(y - x^2)^2"));
    REQUIRE(P.vertices.size() == 2);
    REQUIRE(P.edges.size() == 1);
    CHECK(P.edges[0].exponent == 2);
    // E(t) = (t - 1)^2
    CHECK(P.edges[0].edge_poly.c ==
          std::vector<Rational>{Rational(1), Rational(-2), Rational(1)});
    CHECK(newton_distance(P) == make_rational(4, 3));
}

TEST_CASE("single vertex cases and ray crossings") {
    NewtonPolygon sq = newton_polygon(parse_expression("x^2*y^2"));
    CHECK(sq.single_vertex());
    CHECK(sq.top() == PolygonVertex{Rational(2), 2});
    CHECK(newton_distance(sq) == 2); // vertical ray from (2,2)

    NewtonPolygon quartic = newton_polygon(parse_expression("y^4"));
    CHECK(quartic.single_vertex());
    CHECK(newton_distance(quartic) == 4); // horizontal ray from (0,4)

    NewtonPolygon line = newton_polygon(parse_expression("x^3"));
    CHECK(line.single_vertex());
    CHECK(newton_distance(line) == 3); // vertical ray from (3,0)
}

TEST_CASE("two-edge staircase keeps only corner vertices") {
    // y^3 + x*y + x^3: support (0,3), (1,1), (3,0)
    NewtonPolygon P = newton_polygon(parse_expression("y^3 + x*y + x^3"));
    REQUIRE(P.vertices.size() == 3);
    CHECK(P.vertices[0] == PolygonVertex{Rational(0), 3});
    CHECK(P.vertices[1] == PolygonVertex{Rational(1), 1});
    CHECK(P.vertices[2] == PolygonVertex{Rational(3), 0});
    REQUIRE(P.edges.size() == 2);
    CHECK(P.edges[0].exponent == make_rational(1, 2));
    CHECK(P.edges[1].exponent == 2);
    // dominated point (2,2) would change nothing
    NewtonPolygon Q = newton_polygon(parse_expression("y^3 + x*y + x^3 + x^2*y^2"));
    CHECK(Q.vertices.size() == 3);
}

TEST_CASE("cusp distance") {
    NewtonPolygon P = newton_polygon(parse_expression("y^2 - x^3"));
    CHECK(P.edges.size() == 1);
    CHECK(P.edges[0].exponent == make_rational(3, 2));
    CHECK(newton_distance(P) == make_rational(6, 5));
}

TEST_CASE("principal part picks the lowest total-degree form") {
    XYPoly s = parse_expression("x^2*y + y^4");
    CHECK(to_string(principal_part(s)) == "x^2*y");
    CHECK(min_total_degree(s) == 3);
    XYPoly c = parse_expression("x^2 + y^2");
    CHECK(to_string(principal_part(c)) == "y^2 + x^2");
    XYPoly m = parse_expression("y^2 - 2*x^2*y + x^4 + x^5");
    CHECK(to_string(principal_part(m)) == "y^2");
}
