#pragma once

// Fractional-power prefixes and the shift substitution v -> sigma*w + k(u).
// Prefixes hold exact rational coefficients and exponents; an optional cutoff
// discards u-exponents at or above a chosen order.  Since shifts only raise
// u-exponents, a cutoff applied throughout a computation bounds term growth
// while leaving everything below the cutoff exact.

#include "oscindex/polynomial.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace oscindex {

// k(u) = sum_j c_j * u^(p_j), exponents strictly increasing, all positive.
struct PuiseuxPrefix {
    std::vector<std::pair<Rational, Rational>> terms; // (exponent, coefficient)

    bool empty() const { return terms.empty(); }

    void append(const Rational& exponent, const Rational& coefficient) {
        if (coefficient == 0) return;
        if (!terms.empty() && exponent <= terms.back().first)
            throw std::domain_error("prefix exponents must increase");
        terms.push_back({exponent, coefficient});
    }

    // Like append, but a term at the current deepest exponent folds into it
    // (a floor shift at the scale that created this window lands there).
    void append_merge(const Rational& exponent, const Rational& coefficient) {
        if (coefficient == 0) return;
        if (!terms.empty() && exponent == terms.back().first) {
            terms.back().second += coefficient;
            if (terms.back().second == 0) terms.pop_back();
            return;
        }
        append(exponent, coefficient);
    }

    // Exponent of the next admissible term: anything beyond the last one.
    Rational depth() const { return terms.empty() ? Rational(0) : terms.back().first; }

    double eval(double u) const {
        double acc = 0;
        for (const auto& [p, c] : terms) acc += to_double(c) * std::pow(u, to_double(p));
        return acc;
    }

    XYPoly to_poly() const {
        XYPoly r;
        for (const auto& [p, c] : terms) r.t[{p, 0}] = c;
        return r;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [p, c] : terms) {
            if (first) {
                if (c < 0) os << "-";
                first = false;
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            Rational ac = abs_rational(c);
            if (ac != 1) os << to_string(ac) << "*";
            os << "u";
            if (p != 1) os << "^" << exponent_string(p);
        }
        return os.str();
    }
};

// Cutoff semantics: keep u-exponents strictly below the value; no value = keep all.
using Cutoff = std::optional<Rational>;

inline Cutoff tighter(const Cutoff& a, const Cutoff& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

inline XYPoly truncate_at(const XYPoly& f, const Cutoff& cutoff) {
    if (!cutoff) return f;
    XYPoly r;
    for (const auto& [e, c] : f.t)
        if (e.first < *cutoff) r.t[e] = c;
    return r;
}

// f(u, sigma*w + k(u)), truncated.  sigma is +1 or -1 and carries the side of
// the reference branch the new chart looks at.
inline XYPoly substitute_shift(const XYPoly& f, int sigma, const PuiseuxPrefix& k,
                               const Cutoff& cutoff) {
    if (sigma != 1 && sigma != -1) throw std::domain_error("shift sign must be +1 or -1");
    XYPoly base = xy_add(XYPoly::term(Rational(sigma), Rational(0), 1), k.to_poly());
    int top = f.max_y_degree();
    std::vector<XYPoly> powers{XYPoly::constant(Rational(1))};
    for (int i = 1; i <= top; ++i)
        powers.push_back(truncate_at(xy_mul(powers.back(), base), cutoff));
    XYPoly r;
    for (const auto& [e, c] : f.t)
        r = xy_add(r, truncate_at(xy_shift(powers[static_cast<size_t>(e.second)], c, e.first, 0),
                                  cutoff));
    return r;
}

} // namespace oscindex
