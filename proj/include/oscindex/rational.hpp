#pragma once

// Exact rational arithmetic used throughout the analyzer.  Backed by
// boost::multiprecision so coefficients and exponents never overflow or
// round; values are always stored reduced with a positive denominator.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oscindex {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; } // underlying type wants positive denominators
    return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

// Largest integer <= q.
inline BigInt floor_big(const Rational& q) {
    BigInt n = numerator(q), d = denominator(q);
    BigInt t = n / d;
    if (n < 0 && t * d != n) --t;
    return t;
}

inline BigInt ceil_big(const Rational& q) { return -floor_big(-q); }

// q^e for integer e (e < 0 requires q != 0).
inline Rational pow_rational(const Rational& q, long long e) {
    if (e == 0) return Rational(1);
    if (q == 0) {
        if (e < 0) throw std::domain_error("zero to a negative power");
        return Rational(0);
    }
    bool neg = e < 0;
    unsigned long long k = neg ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    Rational base = q, acc(1);
    while (k) {
        if (k & 1ULL) acc *= base;
        base *= base;
        k >>= 1ULL;
    }
    if (neg) acc = Rational(1) / acc;
    return acc;
}

inline Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline int sign_of(const Rational& q) { return q < 0 ? -1 : (q > 0 ? 1 : 0); }

inline std::string to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

// Parse "p", "p/q", or a decimal like "-0.125" (at most 12 fractional digits).
inline Rational rational_from_string(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt n(text.substr(0, slash));
        BigInt d(text.substr(slash + 1));
        if (d == 0) throw std::domain_error("rational with zero denominator");
        return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(BigInt(text));
    std::string head = text.substr(0, dot), frac = text.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument("decimal literal with more than 12 fractional digits");
    if (frac.empty()) throw std::invalid_argument("decimal literal missing digits after '.'");
    for (char c : frac)
        if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal literal");
    bool neg = !head.empty() && head[0] == '-';
    std::string ipart = neg ? head.substr(1) : (!head.empty() && head[0] == '+' ? head.substr(1) : head);
    if (ipart.empty()) ipart = "0";
    BigInt scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt n = BigInt(ipart) * scale + BigInt(frac);
    Rational q(n, scale);
    return neg ? Rational(-q) : q;
}

// Nearest rational with denominator 2^20; good enough for reporting
// calibrated constants without dragging long decimal strings around.
inline Rational rational_near(double x) {
    if (!(x > -1e300 && x < 1e300)) throw std::domain_error("cannot rationalize non-finite value");
    const long long den = 1LL << 20;
    double scaled = x * static_cast<double>(den);
    long long num = static_cast<long long>(scaled >= 0 ? scaled + 0.5 : scaled - 0.5);
    return Rational(BigInt(num), BigInt(den));
}

} // namespace oscindex
