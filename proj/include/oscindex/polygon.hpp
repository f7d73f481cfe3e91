#pragma once

// Support polygon of a bivariate polynomial: the convex hull of the support
// translated by the positive quadrant.  Exposed as the vertex chain from the
// top vertex (highest y-degree) to the bottom vertex, the compact edges with
// their exponents p = da/(-db) and one-variable edge polynomials, and the
// diagonal crossing distance.

#include "oscindex/polynomial.hpp"

#include <vector>

namespace oscindex {

struct PolygonVertex {
    Rational a; // x-exponent
    int b = 0;  // y-degree
    bool operator==(const PolygonVertex& o) const { return a == o.a && b == o.b; }
};

struct PolygonEdge {
    PolygonVertex upper, lower; // upper.b > lower.b, upper.a < lower.a
    Rational exponent;          // p = (lower.a - upper.a) / (upper.b - lower.b)
    Rational level;             // a + p*b, constant along the edge
    UniPoly edge_poly;          // E(t) = sum of c_(a,b) t^b over edge terms
};

struct NewtonPolygon {
    std::vector<PolygonVertex> vertices; // top (max b) first, bottom last
    std::vector<PolygonEdge> edges;      // between consecutive vertices, exponent ascending

    const PolygonVertex& top() const { return vertices.front(); }
    const PolygonVertex& bottom() const { return vertices.back(); }
    bool single_vertex() const { return vertices.size() == 1; }
};

inline NewtonPolygon newton_polygon(const XYPoly& f) {
    if (f.is_zero()) throw std::domain_error("polygon of the zero polynomial");
    // Pareto staircase: per y-degree the minimal x-exponent, kept only when it
    // strictly undercuts every lower row.
    std::map<int, Rational> min_a;
    for (const auto& [e, c] : f.t) {
        auto it = min_a.find(e.second);
        if (it == min_a.end() || e.first < it->second) min_a[e.second] = e.first;
    }
    std::vector<PolygonVertex> stairs; // ascending b
    Rational best;
    bool have_best = false;
    for (const auto& [b, a] : min_a) {
        if (!have_best || a < best) {
            stairs.push_back({a, b});
            best = a;
            have_best = true;
        }
    }
    // Hull walk from bottom (low b) to top; left turns only, collinear merged.
    std::vector<PolygonVertex> chain;
    for (const auto& v : stairs) {
        while (chain.size() >= 2) {
            const PolygonVertex& u = chain[chain.size() - 2];
            const PolygonVertex& w = chain.back();
            // cross of (w - u) x (v - w); <= 0 means w is not a corner.
            Rational cross = (w.a - u.a) * Rational(v.b - w.b) - Rational(w.b - u.b) * (v.a - w.a);
            if (cross >= 0)
                chain.pop_back();
            else
                break;
        }
        chain.push_back(v);
    }
    NewtonPolygon P;
    P.vertices.assign(chain.rbegin(), chain.rend()); // top first
    for (size_t i = 0; i + 1 < P.vertices.size(); ++i) {
        PolygonEdge e;
        e.upper = P.vertices[i];
        e.lower = P.vertices[i + 1];
        e.exponent = (e.lower.a - e.upper.a) / Rational(e.upper.b - e.lower.b);
        e.level = e.upper.a + e.exponent * Rational(e.upper.b);
        e.edge_poly.c.assign(static_cast<size_t>(e.upper.b) + 1, Rational(0));
        for (const auto& [ex, c] : f.t)
            if (ex.first + e.exponent * Rational(ex.second) == e.level)
                e.edge_poly.c[static_cast<size_t>(ex.second)] += c;
        e.edge_poly.trim();
        P.edges.push_back(e);
    }
    return P;
}

// Coordinate of the first diagonal point (t, t) inside the polygon.
inline Rational newton_distance(const NewtonPolygon& P) {
    const PolygonVertex& t = P.top();
    if (t.a >= Rational(t.b)) return t.a; // diagonal meets the vertical ray
    for (const auto& e : P.edges) {
        Rational cross = (e.upper.a + e.exponent * Rational(e.upper.b)) / (Rational(1) + e.exponent);
        if (Rational(e.lower.b) <= cross && cross <= Rational(e.upper.b)) return cross;
    }
    return Rational(P.bottom().b); // diagonal meets the horizontal ray
}

inline Rational min_total_degree(const XYPoly& f) {
    bool first = true;
    Rational m(0);
    for (const auto& [e, c] : f.t) {
        Rational d = e.first + Rational(e.second);
        if (first || d < m) {
            m = d;
            first = false;
        }
    }
    return m;
}

// Terms of minimal total degree: the form controlling generic radial behavior.
inline XYPoly principal_part(const XYPoly& f) {
    XYPoly r;
    if (f.is_zero()) return r;
    Rational m = min_total_degree(f);
    for (const auto& [e, c] : f.t)
        if (e.first + Rational(e.second) == m) r.t[e] = c;
    return r;
}

} // namespace oscindex
