#pragma once

// Exact univariate polynomials over the rationals: arithmetic, Sturm chains,
// and rational root extraction.  Real roots are isolated by Sturm bisection
// and recognized as rationals via the simplest-fraction-in-interval trick,
// then verified by exact evaluation, so no divisor enumeration is needed.

#include "oscindex/rational.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace oscindex {

// Coefficients ascending by degree; invariant: no trailing zeros.
struct UniPoly {
    std::vector<Rational> c;

    static UniPoly zero() { return {}; }
    static UniPoly constant(const Rational& v) {
        UniPoly p;
        if (v != 0) p.c = {v};
        return p;
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero
    const Rational& lead() const { return c.back(); }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    Rational eval(const Rational& x) const {
        Rational acc(0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    double eval(double x) const {
        double acc = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + to_double(*it);
        return acc;
    }
};

inline UniPoly uni_add(const UniPoly& a, const UniPoly& b) {
    UniPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    r.trim();
    return r;
}

inline UniPoly uni_neg(const UniPoly& a) {
    UniPoly r = a;
    for (auto& v : r.c) v = -v;
    return r;
}

inline UniPoly uni_sub(const UniPoly& a, const UniPoly& b) { return uni_add(a, uni_neg(b)); }

inline UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly::zero();
    UniPoly r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

inline UniPoly uni_scale(const UniPoly& a, const Rational& s) {
    if (s == 0) return UniPoly::zero();
    UniPoly r = a;
    for (auto& v : r.c) v *= s;
    return r;
}

inline UniPoly uni_derivative(const UniPoly& a) {
    UniPoly r;
    for (size_t i = 1; i < a.c.size(); ++i) r.c.push_back(a.c[i] * Rational(static_cast<long long>(i)));
    r.trim();
    return r;
}

// Field division: a = q*b + r with deg r < deg b.
inline std::pair<UniPoly, UniPoly> uni_divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw std::domain_error("univariate division by zero");
    UniPoly r = a, q;
    if (a.degree() >= b.degree()) q.c.assign(a.degree() - b.degree() + 1, Rational(0));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        int shift = r.degree() - b.degree();
        Rational f = r.lead() / b.lead();
        q.c[shift] = f;
        for (size_t i = 0; i < b.c.size(); ++i) r.c[i + shift] -= f * b.c[i];
        r.trim();
    }
    q.trim();
    return {q, r};
}

inline UniPoly uni_monic(const UniPoly& a) {
    if (a.is_zero()) return a;
    return uni_scale(a, Rational(1) / a.lead());
}

inline UniPoly uni_gcd(UniPoly a, UniPoly b) {
    while (!b.is_zero()) {
        auto [q, r] = uni_divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    return uni_monic(a);
}

inline UniPoly uni_squarefree(const UniPoly& a) {
    if (a.degree() <= 0) return a;
    UniPoly g = uni_gcd(a, uni_derivative(a));
    if (g.degree() <= 0) return a;
    return uni_divmod(a, g).first;
}

// ---- Sturm machinery -------------------------------------------------------

inline std::vector<UniPoly> sturm_chain(const UniPoly& p) {
    std::vector<UniPoly> chain;
    chain.push_back(p);
    chain.push_back(uni_derivative(p));
    while (!chain.back().is_zero() && chain.back().degree() >= 0) {
        const UniPoly& a = chain[chain.size() - 2];
        const UniPoly& b = chain.back();
        if (b.is_zero()) break;
        UniPoly r = uni_divmod(a, b).second;
        if (r.is_zero()) break;
        chain.push_back(uni_neg(r));
    }
    return chain;
}

inline int sign_changes(const std::vector<int>& signs) {
    int n = 0, prev = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++n;
        prev = s;
    }
    return n;
}

inline int sturm_variations_at(const std::vector<UniPoly>& chain, const Rational& x) {
    std::vector<int> signs;
    for (const auto& p : chain) signs.push_back(sign_of(p.is_zero() ? Rational(0) : p.eval(x)));
    return sign_changes(signs);
}

// Number of distinct real roots of squarefree p in the half-open interval (a, b].
inline int sturm_count(const std::vector<UniPoly>& chain, const Rational& a, const Rational& b) {
    return sturm_variations_at(chain, a) - sturm_variations_at(chain, b);
}

// ---- Root modulus bounds ---------------------------------------------------

// Strict upper bound on |z| over all complex roots.
inline Rational cauchy_upper_bound(const UniPoly& p) {
    if (p.degree() <= 0) return Rational(0);
    Rational m(0);
    for (int i = 0; i < p.degree(); ++i) {
        Rational v = abs_rational(p.c[i] / p.lead());
        if (v > m) m = v;
    }
    return Rational(1) + m;
}

// Strict lower bound on |z| over all nonzero complex roots: factor out t^k first.
inline Rational cauchy_lower_bound(const UniPoly& p) {
    size_t k = 0;
    while (k < p.c.size() && p.c[k] == 0) ++k;
    if (k >= p.c.size()) return Rational(0);
    UniPoly q;
    q.c.assign(p.c.begin() + static_cast<long>(k), p.c.end());
    if (q.degree() <= 0) return Rational(0); // no nonzero roots
    Rational m(0);
    for (size_t i = 1; i < q.c.size(); ++i) {
        Rational v = abs_rational(q.c[i] / q.c[0]);
        if (v > m) m = v;
    }
    return Rational(1) / (Rational(1) + m);
}

// ---- Rational recognition --------------------------------------------------

// Simplest rational (smallest denominator) in the closed interval [lo, hi].
inline Rational simplest_in_interval(Rational lo, Rational hi) {
    if (lo > hi) std::swap(lo, hi);
    if (lo <= 0 && hi >= 0) return Rational(0);
    if (lo < 0) return -simplest_in_interval(-hi, -lo);
    BigInt fl = floor_big(lo);
    if (Rational(fl) == lo) return lo;
    if (ceil_big(lo) <= floor_big(hi)) return Rational(ceil_big(lo));
    Rational fr = Rational(fl);
    return fr + Rational(1) / simplest_in_interval(Rational(1) / (hi - fr), Rational(1) / (lo - fr));
}

struct RationalRoot {
    Rational value;
    int multiplicity = 0;
};

struct RootScan {
    std::vector<RationalRoot> roots;  // rational real roots found in range, descending
    int real_unrecognized = 0;        // real roots in range that resisted rational recognition
    int complex_pairs_hint = 0;       // (degree - real count)/2 over the whole line, informational
};

// All real roots of p inside the open interval (lo, hi), recognized as exact
// rationals with multiplicities.  Roots that fail recognition (irrational) are
// counted in real_unrecognized rather than silently dropped.
inline RootScan rational_roots_in(const UniPoly& p, const Rational& lo, const Rational& hi) {
    RootScan scan;
    if (p.degree() <= 0) return scan;
    UniPoly sf = uni_squarefree(p);
    auto chain = sturm_chain(sf);

    // Count over the whole line for the complex hint.
    Rational big = cauchy_upper_bound(sf) + 1;
    int total_real = sturm_count(chain, -big, big);
    scan.complex_pairs_hint = (sf.degree() - total_real) / 2;

    struct Interval { Rational a, b; };
    std::vector<Interval> work, isolated;
    {
        Rational a = lo, b = hi;
        if (a < -big) a = -big;
        if (b > big) b = big;
        if (a >= b) return scan;
        work.push_back({a, b});
    }
    while (!work.empty()) {
        Interval iv = work.back();
        work.pop_back();
        int n = sturm_count(chain, iv.a, iv.b);
        if (sf.eval(iv.b) == 0 && iv.b >= hi) --n; // exclude a root exactly at the open upper end
        if (n <= 0) continue;
        if (n == 1) {
            isolated.push_back(iv);
            continue;
        }
        // Half-open counting puts a root landing exactly on mid in the left piece.
        Rational mid = (iv.a + iv.b) / 2;
        work.push_back({iv.a, mid});
        work.push_back({mid, iv.b});
    }

    for (auto iv : isolated) {
        bool found = false;
        for (int round = 0; round < 240 && !found; ++round) {
            Rational cand = simplest_in_interval(iv.a, iv.b);
            // The interval's root lives in (a, b]; a candidate landing exactly on
            // the open left end may be a different, already-counted root of p.
            if (cand > iv.a && cand <= iv.b && cand > lo && cand < hi && p.eval(cand) == 0) {
                // Multiplicity by repeated exact division.
                UniPoly rem = p, lin;
                lin.c = {-cand, Rational(1)};
                int mult = 0;
                while (true) {
                    auto [q, r] = uni_divmod(rem, lin);
                    if (!r.is_zero()) break;
                    rem = q;
                    ++mult;
                }
                scan.roots.push_back({cand, mult});
                found = true;
                break;
            }
            // Tighten by one bisection step and retry.
            Rational mid = (iv.a + iv.b) / 2;
            if (sf.eval(mid) == 0) {
                if (mid > lo && mid < hi && p.eval(mid) == 0) {
                    UniPoly rem = p, lin;
                    lin.c = {-mid, Rational(1)};
                    int mult = 0;
                    while (true) {
                        auto [q, r] = uni_divmod(rem, lin);
                        if (!r.is_zero()) break;
                        rem = q;
                        ++mult;
                    }
                    scan.roots.push_back({mid, mult});
                    found = true;
                }
                break;
            }
            if (sturm_count(chain, iv.a, mid) == 1)
                iv.b = mid;
            else
                iv.a = mid;
        }
        if (!found) ++scan.real_unrecognized;
    }
    std::sort(scan.roots.begin(), scan.roots.end(),
              [](const RationalRoot& x, const RationalRoot& y) { return x.value > y.value; });
    return scan;
}

} // namespace oscindex
