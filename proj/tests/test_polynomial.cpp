#include <catch2/catch_amalgamated.hpp>

#include "oscindex/polynomial.hpp"

using namespace oscindex;

namespace {

XYPoly xterm(long long c, long long a, int b) {
    return XYPoly::term(Rational(c), Rational(a), b);
}

} // namespace

TEST_CASE("arithmetic keeps terms pruned") {
    XYPoly p = xy_add(xterm(1, 2, 0), xterm(1, 0, 2)); // x^2 + y^2
    XYPoly q = xy_sub(p, xterm(1, 2, 0));
    CHECK(q.term_count() == 1);
    CHECK(q.coefficient(Rational(0), 2) == 1);
    CHECK(xy_sub(p, p).is_zero());
    // (x + y)^2 = x^2 + 2xy + y^2
    XYPoly s = xy_pow(xy_add(xterm(1, 1, 0), xterm(1, 0, 1)), 2);
    CHECK(s.term_count() == 3);
    CHECK(s.coefficient(Rational(1), 1) == 2);
}

TEST_CASE("evaluation matches hand arithmetic") {
    // s = x^2*y - y^4 at (2, 3): 12 - 81 = -69
    XYPoly s = xy_sub(XYPoly::term(Rational(1), Rational(2), 1), xterm(1, 0, 4));
    CHECK(s.eval(Rational(2), Rational(3)) == -69);
    CHECK(s.eval(2.0, 3.0) == Catch::Approx(-69.0));
    // Fractional exponent: double path only.
    XYPoly f = XYPoly::term(Rational(1), make_rational(3, 2), 0);
    CHECK(f.eval(4.0, 1.0) == Catch::Approx(8.0));
    CHECK_THROWS(f.eval(Rational(4), Rational(1)));
}

TEST_CASE("derivatives drop constants and guard x-exponent underflow") {
    XYPoly s = xy_add(xterm(3, 2, 1), xterm(5, 0, 0)); // 3x^2 y + 5
    XYPoly sx = xy_dx(s);
    CHECK(sx.coefficient(Rational(1), 1) == 6);
    CHECK(sx.term_count() == 1);
    XYPoly sy = xy_dy(s);
    CHECK(sy.coefficient(Rational(2), 0) == 3);
    XYPoly frac = XYPoly::term(Rational(1), make_rational(1, 2), 0);
    CHECK_THROWS(xy_dx(frac));
    XYPoly lau = xy_dx(frac, true);
    CHECK(lau.coefficient(make_rational(-1, 2), 0) == make_rational(1, 2));
}

TEST_CASE("linear composition and axis operations") {
    // s = y^2 under y -> y + x: (x + y)^2
    XYPoly s = xterm(1, 0, 2);
    LinearMap2 L{Rational(1), Rational(0), Rational(1), Rational(1)};
    XYPoly c = compose_linear(s, L);
    CHECK(c.coefficient(Rational(2), 0) == 1);
    CHECK(c.coefficient(Rational(1), 1) == 2);
    CHECK(c.coefficient(Rational(0), 2) == 1);
    // Swap: x^2*y -> y^2*x
    XYPoly m = XYPoly::term(Rational(1), Rational(2), 1);
    XYPoly sw = swap_xy(m);
    CHECK(sw.coefficient(Rational(1), 2) == 1);
    // Reflection x -> -x on x^3 + x^2 flips only the odd power.
    XYPoly r = reflect(xy_add(xterm(1, 3, 0), xterm(1, 2, 0)), -1, 1);
    CHECK(r.coefficient(Rational(3), 0) == -1);
    CHECK(r.coefficient(Rational(2), 0) == 1);
}

TEST_CASE("printing is canonical") {
    XYPoly s = xy_sub(XYPoly::term(Rational(1), Rational(2), 1), xterm(1, 0, 4));
    CHECK(to_string(s) == "-y^4 + x^2*y");
    CHECK(to_string(xterm(-3, 1, 0)) == "-3*x");
    CHECK(to_string(XYPoly::zero()) == "0");
    CHECK(to_string(XYPoly::term(make_rational(1, 2), make_rational(3, 2), 2)) ==
          "1/2*x^(3/2)*y^2");
}

TEST_CASE("squarefree-in-y part separates distinct branches") {
    XYPoly x2 = xterm(1, 2, 0), y1 = xterm(1, 0, 1);

    // (y - x^2)^2 -> y - x^2
    XYPoly p = xy_pow(xy_sub(y1, x2), 2);
    XYPoly sf = y_squarefree_part(p);
    CHECK(to_string(sf) == "y - x^2");

    // x^2 y^2 -> y (x-content dropped)
    XYPoly q = xy_mul(x2, xy_pow(y1, 2));
    CHECK(to_string(y_squarefree_part(q)) == "y");

    // y^2 - x^3 is already squarefree in y
    XYPoly cusp = xy_sub(xy_pow(y1, 2), xterm(1, 3, 0));
    CHECK(to_string(y_squarefree_part(cusp)) == "y^2 - x^3");

    // (y - x)^2 (y + x) -> y^2 - x^2
    XYPoly mixed = xy_mul(xy_pow(xy_sub(y1, xterm(1, 1, 0)), 2), xy_add(y1, xterm(1, 1, 0)));
    CHECK(to_string(y_squarefree_part(mixed)) == "y^2 - x^2");

    // x^2 + y^2: no real y-branch structure to strip
    XYPoly circ = xy_add(x2, xy_pow(y1, 2));
    CHECK(to_string(y_squarefree_part(circ)) == "y^2 + x^2");
}
