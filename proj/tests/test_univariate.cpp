#include <catch2/catch_amalgamated.hpp>

#include "oscindex/univariate.hpp"

using namespace oscindex;

namespace {

UniPoly poly(std::initializer_list<long long> ascending) {
    UniPoly p;
    for (long long v : ascending) p.c.push_back(Rational(v));
    p.trim();
    return p;
}

} // namespace

TEST_CASE("arithmetic and exact division") {
    // (t - 1)(t - 2) = t^2 - 3t + 2
    UniPoly a = uni_mul(poly({-1, 1}), poly({-2, 1}));
    CHECK(a.c == poly({2, -3, 1}).c);
    auto [q, r] = uni_divmod(a, poly({-2, 1}));
    CHECK(q.c == poly({-1, 1}).c);
    CHECK(r.is_zero());
    auto [q2, r2] = uni_divmod(poly({1, 0, 1}), poly({1, 1}));
    CHECK(q2.c == poly({-1, 1}).c);
    CHECK(r2.c == poly({2}).c);
}

TEST_CASE("gcd and squarefree part strip repeated factors") {
    // p = (t-1)^2 (t+2)
    UniPoly p = uni_mul(uni_mul(poly({-1, 1}), poly({-1, 1})), poly({2, 1}));
    UniPoly g = uni_gcd(p, uni_derivative(p));
    CHECK(g.c == poly({-1, 1}).c); // monic t - 1
    UniPoly sf = uni_squarefree(p);
    CHECK(sf.degree() == 2);
    CHECK(sf.eval(Rational(1)) == 0);
    CHECK(sf.eval(Rational(-2)) == 0);
}

TEST_CASE("sturm counts real roots in intervals") {
    // (t-1)(t-2)(t-3): three real roots
    UniPoly p = uni_mul(uni_mul(poly({-1, 1}), poly({-2, 1})), poly({-3, 1}));
    auto chain = sturm_chain(p);
    CHECK(sturm_count(chain, Rational(0), Rational(4)) == 3);
    CHECK(sturm_count(chain, Rational(0), make_rational(3, 2)) == 1);
    CHECK(sturm_count(chain, make_rational(3, 2), Rational(4)) == 2);
    // Half-open convention: root at the left endpoint is excluded, right included.
    CHECK(sturm_count(chain, Rational(1), Rational(3)) == 2);
    // t^2 + 1 has no real roots.
    auto chain2 = sturm_chain(poly({1, 0, 1}));
    CHECK(sturm_count(chain2, Rational(-10), Rational(10)) == 0);
}

TEST_CASE("root modulus bounds bracket the actual roots") {
    // roots 1, 2, 3
    UniPoly p = uni_mul(uni_mul(poly({-1, 1}), poly({-2, 1})), poly({-3, 1}));
    CHECK(cauchy_upper_bound(p) > 3);
    CHECK(cauchy_lower_bound(p) < 1);
    CHECK(cauchy_lower_bound(p) > 0);
    // t^2 * (t - 5): zero roots ignored by the lower bound
    UniPoly q = uni_mul(poly({0, 0, 1}), poly({-5, 1}));
    CHECK(cauchy_lower_bound(q) > 0);
    CHECK(cauchy_lower_bound(q) <= 5);
    CHECK(cauchy_upper_bound(q) > 5);
}

TEST_CASE("simplest rational in an interval") {
    CHECK(simplest_in_interval(make_rational(1, 3), make_rational(2, 3)) == make_rational(1, 2));
    CHECK(simplest_in_interval(make_rational(-1, 2), make_rational(1, 5)) == 0);
    CHECK(simplest_in_interval(make_rational(5, 2), make_rational(7, 2)) == 3);
    CHECK(simplest_in_interval(make_rational(13, 10), make_rational(7, 5)) == make_rational(4, 3));
    CHECK(simplest_in_interval(make_rational(-2, 3), make_rational(-1, 3)) == make_rational(-1, 2));
}

TEST_CASE("rational root scan finds roots with multiplicities") {
    // p = (t - 1/2)^2 (t + 3) (t^2 + 1)
    UniPoly half = poly({-1, 2}); // 2t - 1, root 1/2
    UniPoly p = uni_mul(uni_mul(uni_mul(half, half), poly({3, 1})), poly({1, 0, 1}));
    RootScan scan = rational_roots_in(p, Rational(-10), Rational(10));
    REQUIRE(scan.roots.size() == 2);
    CHECK(scan.roots[0].value == make_rational(1, 2));
    CHECK(scan.roots[0].multiplicity == 2);
    CHECK(scan.roots[1].value == Rational(-3));
    CHECK(scan.roots[1].multiplicity == 1);
    CHECK(scan.real_unrecognized == 0);
    CHECK(scan.complex_pairs_hint == 1);
}

TEST_CASE("rational root scan respects open interval bounds") {
    UniPoly p = uni_mul(uni_mul(poly({-1, 1}), poly({-2, 1})), poly({-3, 1}));
    RootScan scan = rational_roots_in(p, Rational(1), Rational(3));
    REQUIRE(scan.roots.size() == 1);
    CHECK(scan.roots[0].value == 2);
    RootScan all = rational_roots_in(p, Rational(0), Rational(4));
    CHECK(all.roots.size() == 3);
}

TEST_CASE("irrational real roots are reported, not silently dropped") {
    // t^2 - 2: two irrational real roots
    RootScan scan = rational_roots_in(poly({-2, 0, 1}), Rational(-10), Rational(10));
    CHECK(scan.roots.empty());
    CHECK(scan.real_unrecognized == 2);
    // Mixed: (t - 1)(t^2 - 2)
    UniPoly p = uni_mul(poly({-1, 1}), poly({-2, 0, 1}));
    RootScan mixed = rational_roots_in(p, Rational(0), Rational(10));
    REQUIRE(mixed.roots.size() == 1);
    CHECK(mixed.roots[0].value == 1);
    CHECK(mixed.real_unrecognized == 1);
}

TEST_CASE("clustered rational roots separate correctly") {
    // Roots at 1/1024 and 1/1023 are close together; bisection must split them.
    UniPoly a; a.c = {make_rational(-1, 1024), Rational(1)};
    UniPoly b; b.c = {make_rational(-1, 1023), Rational(1)};
    RootScan scan = rational_roots_in(uni_mul(a, b), Rational(0), Rational(1));
    REQUIRE(scan.roots.size() == 2);
    CHECK(scan.roots[0].value == make_rational(1, 1023));
    CHECK(scan.roots[1].value == make_rational(1, 1024));
}
