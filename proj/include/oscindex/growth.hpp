#pragma once

// Growth bookkeeping for decomposition pieces.  Each piece carries a region
//   { 0 < u < r,  lo_coeff*u^lo_exp < w < hi_coeff*u^hi_exp }
// on which the working polynomial is comparable to d * u^alpha * w^yexp, and
// the u-weight is u^(-beta).  The sublevel measure mu(eps) of such a piece
// behaves like eps^g * |ln eps|^log_power; the exponent distinguishes three
// shapes:
//   * equal boundary exponents (a fixed ratio window, bands included):
//       one scaling regime, g = (1 + hi_exp - beta)/(alpha + yexp*hi_exp);
//   * widening window (lo_exp > hi_exp) with yexp >= 1: two regimes meet,
//       E1 at the top boundary, E2 at the bottom; g = min, tie -> log;
//   * no lower boundary (bottom pieces): the second regime degenerates to
//       1/yexp; same min/tie rule.  With yexp = 0 the w-extent is passive and
//       only the top regime exists.
// The weighted integrability threshold sup{t : integral |f|^-t u^-beta < inf}
// of a piece equals the same number, so one casework serves both readings.

#include "oscindex/rational.hpp"

#include <optional>
#include <vector>

namespace oscindex {

struct GrowthPair {
    Rational g;
    int log_power = 0;

    bool operator==(const GrowthPair& o) const { return g == o.g && log_power == o.log_power; }
};

struct PieceShape {
    Rational alpha;      // u-exponent of the dominant monomial
    int yexp = 0;        // w-exponent of the dominant monomial
    Rational hi_exp;     // upper boundary w < hi_coeff * u^hi_exp
    bool has_lower = false;
    Rational lo_exp;     // lower boundary exponent, meaningful when has_lower
};

inline GrowthPair piece_growth(const PieceShape& s, const Rational& beta) {
    Rational top_den = s.alpha + Rational(s.yexp) * s.hi_exp;
    if (top_den <= 0) throw std::domain_error("piece with a constant dominant term");
    Rational e1 = (Rational(1) + s.hi_exp - beta) / top_den;
    if (s.yexp == 0) return {e1, 0};
    if (s.has_lower) {
        if (s.lo_exp == s.hi_exp) return {e1, 0}; // fixed-ratio window: one regime
        Rational e2 = (Rational(1) + s.lo_exp - beta) / (s.alpha + Rational(s.yexp) * s.lo_exp);
        if (e1 == e2) return {e1, 1};
        return {std::min(e1, e2), 0};
    }
    Rational e2 = Rational(1) / Rational(s.yexp);
    if (e1 == e2) return {e1, 1};
    return {std::min(e1, e2), 0};
}

// Minimum growth wins; among pieces attaining it the strongest log factor
// survives.  Equal exponents across pieces only add constants, never logs.
inline GrowthPair aggregate_growth(const std::vector<GrowthPair>& parts) {
    if (parts.empty()) throw std::domain_error("no pieces to aggregate");
    GrowthPair best = parts.front();
    for (const auto& p : parts) {
        if (p.g < best.g || (p.g == best.g && p.log_power > best.log_power)) best = p;
    }
    return best;
}

} // namespace oscindex
