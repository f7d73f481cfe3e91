#pragma once

// Bivariate polynomials in (x, y) with rational x-exponents and integer
// y-degrees.  Rational x-exponents appear after ramified substitutions
// x -> u^(1/N); y-degrees stay integral under every transform we use.
// Internally (comparability checks) negative x-exponents are permitted;
// the public derivative refuses to create them unless asked.

#include "oscindex/rational.hpp"
#include "oscindex/univariate.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oscindex {

using ExpPair = std::pair<Rational, int>; // (x-exponent, y-degree)

struct XYPoly {
    std::map<ExpPair, Rational> t; // exponent -> nonzero coefficient

    static XYPoly zero() { return {}; }
    static XYPoly term(const Rational& c, const Rational& a, int b) {
        XYPoly p;
        if (c != 0) p.t[{a, b}] = c;
        return p;
    }
    static XYPoly constant(const Rational& c) { return term(c, Rational(0), 0); }

    bool is_zero() const { return t.empty(); }
    size_t term_count() const { return t.size(); }

    void prune() {
        for (auto it = t.begin(); it != t.end();)
            it = (it->second == 0) ? t.erase(it) : std::next(it);
    }

    bool integer_exponents() const {
        for (const auto& [e, c] : t)
            if (!is_integer(e.first) || e.first < 0) return false;
        return true;
    }

    int max_y_degree() const {
        int m = 0;
        for (const auto& [e, c] : t) m = std::max(m, e.second);
        return m;
    }

    Rational coefficient(const Rational& a, int b) const {
        auto it = t.find({a, b});
        return it == t.end() ? Rational(0) : it->second;
    }

    // Exact evaluation; requires nonnegative integer exponents.
    Rational eval(const Rational& x, const Rational& y) const {
        Rational acc(0);
        for (const auto& [e, c] : t) {
            if (!is_integer(e.first) || e.first < 0)
                throw std::domain_error("exact evaluation needs integer exponents");
            long long a = static_cast<long long>(floor_big(e.first));
            acc += c * pow_rational(x, a) * pow_rational(y, e.second);
        }
        return acc;
    }

    // Floating evaluation; fractional exponents need x > 0.
    double eval(double x, double y) const {
        double acc = 0;
        for (const auto& [e, c] : t) {
            double xa = is_integer(e.first)
                            ? std::pow(x, static_cast<double>(floor_big(e.first).convert_to<long long>()))
                            : std::pow(x, to_double(e.first));
            acc += to_double(c) * xa * std::pow(y, e.second);
        }
        return acc;
    }
};

inline XYPoly xy_add(const XYPoly& p, const XYPoly& q) {
    XYPoly r = p;
    for (const auto& [e, c] : q.t) r.t[e] += c;
    r.prune();
    return r;
}

inline XYPoly xy_neg(const XYPoly& p) {
    XYPoly r = p;
    for (auto& [e, c] : r.t) c = -c;
    return r;
}

inline XYPoly xy_sub(const XYPoly& p, const XYPoly& q) { return xy_add(p, xy_neg(q)); }

inline XYPoly xy_scale(const XYPoly& p, const Rational& s) {
    if (s == 0) return XYPoly::zero();
    XYPoly r = p;
    for (auto& [e, c] : r.t) c *= s;
    return r;
}

inline XYPoly xy_mul(const XYPoly& p, const XYPoly& q) {
    XYPoly r;
    for (const auto& [e1, c1] : p.t)
        for (const auto& [e2, c2] : q.t)
            r.t[{e1.first + e2.first, e1.second + e2.second}] += c1 * c2;
    r.prune();
    return r;
}

// Multiply by the monomial c * x^a * y^b (b may be negative only if every
// y-degree stays nonnegative; caller's responsibility).
inline XYPoly xy_shift(const XYPoly& p, const Rational& c, const Rational& a, int b) {
    XYPoly r;
    if (c == 0) return r;
    for (const auto& [e, k] : p.t) r.t[{e.first + a, e.second + b}] = k * c;
    return r;
}

inline XYPoly xy_pow(const XYPoly& p, int n) {
    if (n < 0) throw std::domain_error("negative polynomial power");
    XYPoly r = XYPoly::constant(Rational(1));
    XYPoly base = p;
    while (n > 0) {
        if (n & 1) r = xy_mul(r, base);
        n >>= 1;
        if (n) base = xy_mul(base, base);
    }
    return r;
}

// d/dx.  A term with fractional exponent in (0,1) would leave the polynomial
// ring; refuse unless the caller explicitly works with generalized terms.
inline XYPoly xy_dx(const XYPoly& p, bool allow_negative_exponents = false) {
    XYPoly r;
    for (const auto& [e, c] : p.t) {
        if (e.first == 0) continue;
        Rational na = e.first - 1;
        if (na < 0 && !allow_negative_exponents)
            throw std::domain_error("derivative would create a negative x-exponent");
        r.t[{na, e.second}] += c * e.first;
    }
    r.prune();
    return r;
}

inline XYPoly xy_dy(const XYPoly& p) {
    XYPoly r;
    for (const auto& [e, c] : p.t) {
        if (e.second == 0) continue;
        r.t[{e.first, e.second - 1}] += c * Rational(e.second);
    }
    r.prune();
    return r;
}

// ---- Linear changes of variables ------------------------------------------

struct LinearMap2 {
    // (x, y) -> (m00*x + m01*y, m10*x + m11*y)
    Rational m00, m01, m10, m11;

    static LinearMap2 identity() { return {Rational(1), Rational(0), Rational(0), Rational(1)}; }
    static LinearMap2 swap_axes() { return {Rational(0), Rational(1), Rational(1), Rational(0)}; }
    Rational det() const { return m00 * m11 - m01 * m10; }
    bool is_identity() const { return m00 == 1 && m01 == 0 && m10 == 0 && m11 == 1; }
};

// p(L(x,y)); requires integer exponents.
inline XYPoly compose_linear(const XYPoly& p, const LinearMap2& L) {
    if (!p.integer_exponents())
        throw std::domain_error("linear composition needs integer exponents");
    XYPoly lx = xy_add(XYPoly::term(L.m00, Rational(1), 0), XYPoly::term(L.m01, Rational(0), 1));
    XYPoly ly = xy_add(XYPoly::term(L.m10, Rational(1), 0), XYPoly::term(L.m11, Rational(0), 1));
    // Build power tables up to the needed degrees.
    int dx_max = 0, dy_max = p.max_y_degree();
    for (const auto& [e, c] : p.t)
        dx_max = std::max(dx_max, static_cast<int>(floor_big(e.first).convert_to<long long>()));
    std::vector<XYPoly> px{XYPoly::constant(Rational(1))}, py{XYPoly::constant(Rational(1))};
    for (int i = 1; i <= dx_max; ++i) px.push_back(xy_mul(px.back(), lx));
    for (int i = 1; i <= dy_max; ++i) py.push_back(xy_mul(py.back(), ly));
    XYPoly r;
    for (const auto& [e, c] : p.t) {
        int a = static_cast<int>(floor_big(e.first).convert_to<long long>());
        r = xy_add(r, xy_scale(xy_mul(px[a], py[e.second]), c));
    }
    return r;
}

// Reflections x -> sx*x, y -> sy*y with sx, sy in {+1, -1}: exponentwise sign flips.
inline XYPoly reflect(const XYPoly& p, int sx, int sy) {
    XYPoly r;
    for (const auto& [e, c] : p.t) {
        Rational f(1);
        if (sx < 0 && !is_integer(e.first))
            throw std::domain_error("reflection of fractional x-exponent");
        if (sx < 0 && floor_big(e.first) % 2 != 0) f = -f;
        if (sy < 0 && e.second % 2 != 0) f = -f;
        r.t[e] = c * f;
    }
    return r;
}

inline XYPoly swap_xy(const XYPoly& p) {
    XYPoly r;
    for (const auto& [e, c] : p.t) {
        if (!is_integer(e.first) || e.first < 0)
            throw std::domain_error("axis swap needs integer exponents");
        r.t[{Rational(e.second), static_cast<int>(floor_big(e.first).convert_to<long long>())}] = c;
    }
    return r;
}

// ---- Pretty printing -------------------------------------------------------

inline std::string exponent_string(const Rational& e) {
    return is_integer(e) ? to_string(e) : "(" + to_string(e) + ")";
}

inline std::string to_string(const XYPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest y-degree first, then highest x-exponent: matches hand-written forms.
    std::vector<std::pair<ExpPair, Rational>> terms(p.t.begin(), p.t.end());
    std::sort(terms.begin(), terms.end(), [](const auto& u, const auto& v) {
        if (u.first.second != v.first.second) return u.first.second > v.first.second;
        return u.first.first > v.first.first;
    });
    for (const auto& [e, c] : terms) {
        Rational ac = abs_rational(c);
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool has_var = (e.first != 0) || (e.second != 0);
        if (ac != 1 || !has_var) os << to_string(ac);
        if (e.first != 0) {
            if (ac != 1) os << "*";
            os << "x";
            if (e.first != 1) os << "^" << exponent_string(e.first);
        }
        if (e.second != 0) {
            if (ac != 1 || e.first != 0) os << "*";
            os << "y";
            if (e.second != 1) os << "^" << e.second;
        }
    }
    return os.str();
}

// ---- Rational functions of x, and gcd structure in y -----------------------

// Reduced fraction of univariate polynomials; denominator monic.
struct RatFunc {
    UniPoly num, den;

    static RatFunc zero() { return {UniPoly::zero(), UniPoly::constant(Rational(1))}; }
    static RatFunc from(const UniPoly& p) { return {p, UniPoly::constant(Rational(1))}; }
    bool is_zero() const { return num.is_zero(); }

    void reduce() {
        if (num.is_zero()) {
            den = UniPoly::constant(Rational(1));
            return;
        }
        UniPoly g = uni_gcd(num, den);
        if (g.degree() > 0) {
            num = uni_divmod(num, g).first;
            den = uni_divmod(den, g).first;
        }
        Rational lead = den.lead();
        num = uni_scale(num, Rational(1) / lead);
        den = uni_scale(den, Rational(1) / lead);
    }
};

inline RatFunc rf_add(const RatFunc& a, const RatFunc& b) {
    RatFunc r{uni_add(uni_mul(a.num, b.den), uni_mul(b.num, a.den)), uni_mul(a.den, b.den)};
    r.reduce();
    return r;
}
inline RatFunc rf_neg(const RatFunc& a) { return {uni_neg(a.num), a.den}; }
inline RatFunc rf_sub(const RatFunc& a, const RatFunc& b) { return rf_add(a, rf_neg(b)); }
inline RatFunc rf_mul(const RatFunc& a, const RatFunc& b) {
    RatFunc r{uni_mul(a.num, b.num), uni_mul(a.den, b.den)};
    r.reduce();
    return r;
}
inline RatFunc rf_div(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    RatFunc r{uni_mul(a.num, b.den), uni_mul(a.den, b.num)};
    r.reduce();
    return r;
}

// Polynomial in y over the field of rational functions of x.
struct YOverRatFunc {
    std::vector<RatFunc> c; // ascending y-degree, trailing zeros trimmed

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
};

inline YOverRatFunc y_lift(const XYPoly& p) {
    if (!p.integer_exponents())
        throw std::domain_error("field-of-fractions view needs integer exponents");
    YOverRatFunc r;
    r.c.assign(static_cast<size_t>(p.max_y_degree()) + 1, RatFunc::zero());
    for (const auto& [e, k] : p.t) {
        int a = static_cast<int>(floor_big(e.first).convert_to<long long>());
        UniPoly mono;
        mono.c.assign(static_cast<size_t>(a) + 1, Rational(0));
        mono.c[static_cast<size_t>(a)] = k;
        r.c[static_cast<size_t>(e.second)] = rf_add(r.c[static_cast<size_t>(e.second)], RatFunc::from(mono));
    }
    r.trim();
    return r;
}

inline YOverRatFunc y_divmod_rem(const YOverRatFunc& a, const YOverRatFunc& b) {
    YOverRatFunc r = a;
    while (!r.is_zero() && r.degree() >= b.degree()) {
        RatFunc f = rf_div(r.c.back(), b.c.back());
        int shift = r.degree() - b.degree();
        for (size_t i = 0; i < b.c.size(); ++i)
            r.c[i + static_cast<size_t>(shift)] =
                rf_sub(r.c[i + static_cast<size_t>(shift)], rf_mul(f, b.c[i]));
        r.trim();
    }
    return r;
}

inline YOverRatFunc y_divmod_quot(const YOverRatFunc& a, const YOverRatFunc& b) {
    YOverRatFunc r = a, q;
    if (a.degree() >= b.degree()) q.c.assign(static_cast<size_t>(a.degree() - b.degree()) + 1, RatFunc::zero());
    while (!r.is_zero() && r.degree() >= b.degree()) {
        RatFunc f = rf_div(r.c.back(), b.c.back());
        int shift = r.degree() - b.degree();
        q.c[static_cast<size_t>(shift)] = f;
        for (size_t i = 0; i < b.c.size(); ++i)
            r.c[i + static_cast<size_t>(shift)] =
                rf_sub(r.c[i + static_cast<size_t>(shift)], rf_mul(f, b.c[i]));
        r.trim();
    }
    q.trim();
    return q;
}

inline YOverRatFunc y_derivative(const YOverRatFunc& a) {
    YOverRatFunc r;
    for (size_t i = 1; i < a.c.size(); ++i)
        r.c.push_back(rf_mul(a.c[i], RatFunc::from(UniPoly::constant(Rational(static_cast<long long>(i))))));
    r.trim();
    return r;
}

inline YOverRatFunc y_gcd(YOverRatFunc a, YOverRatFunc b) {
    while (!b.is_zero()) {
        YOverRatFunc r = y_divmod_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) {
        RatFunc lead = a.c.back();
        for (auto& v : a.c) v = rf_div(v, lead);
    }
    return a;
}

// Clear denominators and rational content; sign so the top term is positive.
inline XYPoly y_lower(const YOverRatFunc& p) {
    if (p.is_zero()) return XYPoly::zero();
    UniPoly den_lcm = UniPoly::constant(Rational(1));
    for (const auto& v : p.c) {
        if (v.is_zero()) continue;
        UniPoly g = uni_gcd(den_lcm, v.den);
        den_lcm = uni_mul(uni_divmod(den_lcm, g).first, v.den);
    }
    XYPoly out;
    for (size_t b = 0; b < p.c.size(); ++b) {
        if (p.c[b].is_zero()) continue;
        UniPoly scaled = uni_mul(p.c[b].num, uni_divmod(den_lcm, p.c[b].den).first);
        for (size_t a = 0; a < scaled.c.size(); ++a)
            if (scaled.c[a] != 0)
                out.t[{Rational(static_cast<long long>(a)), static_cast<int>(b)}] = scaled.c[a];
    }
    // Strip any common monomial x^k, make coefficients coprime integers,
    // and fix the sign of the top term.
    if (!out.is_zero()) {
        Rational amin = out.t.begin()->first.first;
        for (const auto& [e, c] : out.t) amin = std::min(amin, e.first);
        BigInt den_lcm_i(1), num_gcd(0);
        for (const auto& [e, c] : out.t) {
            BigInt d = denominator(c);
            den_lcm_i = den_lcm_i / boost::multiprecision::gcd(den_lcm_i, d) * d;
        }
        for (const auto& [e, c] : out.t)
            num_gcd = boost::multiprecision::gcd(num_gcd, numerator(c * Rational(den_lcm_i)));
        Rational content = Rational(num_gcd, den_lcm_i);
        XYPoly norm;
        for (const auto& [e, c] : out.t) norm.t[{e.first - amin, e.second}] = c / content;
        // Positive sign on the leading-in-y term.
        const std::pair<const ExpPair, Rational>* top = nullptr;
        for (const auto& ec : norm.t)
            if (!top || ec.first.second > top->first.second ||
                (ec.first.second == top->first.second && ec.first.first > top->first.first))
                top = &ec;
        if (top && top->second < 0) norm = xy_neg(norm);
        return norm;
    }
    return out;
}

// The product of the distinct y-irreducible factors of s that involve y.
// Content in x alone is dropped: this object only feeds branch separation,
// where x-content contributes no y-branches.
inline XYPoly y_squarefree_part(const XYPoly& s) {
    YOverRatFunc f = y_lift(s);
    if (f.degree() <= 0) return XYPoly::zero();
    YOverRatFunc g = y_gcd(f, y_derivative(f));
    if (g.degree() <= 0) return y_lower(f);
    return y_lower(y_divmod_quot(f, g));
}

} // namespace oscindex
