#pragma once

// Expression parser for polynomial surfaces in x and y, plus the on-disk
// surface description format (key=value lines).
//
// Grammar:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*     '/' needs a constant divisor
//   unary := '-' unary | power
//   power := atom ('^' nonneg-integer)?
//   atom  := number | 'x' | 'y' | '(' expr ')'
// Numbers are integers or decimals; exponents are capped to keep expansion
// sizes sane.  Errors carry the byte offset of the offending character.

#include "oscindex/polynomial.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oscindex {

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& message, size_t at)
        : std::runtime_error(message + " (at byte " + std::to_string(at) + ")"), offset(at) {}
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

class ExprParser {
  public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    XYPoly run() {
        XYPoly r = expr();
        skip_ws();
        if (pos_ < s_.size()) throw ParseError("unexpected trailing input", pos_);
        return r;
    }

  private:
    static constexpr int kMaxExponent = 64;

    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool at(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool eat(char c) {
        if (!at(c)) return false;
        ++pos_;
        return true;
    }

    XYPoly expr() {
        XYPoly r = term();
        for (;;) {
            if (eat('+'))
                r = xy_add(r, term());
            else if (eat('-'))
                r = xy_sub(r, term());
            else
                return r;
        }
    }

    XYPoly term() {
        XYPoly r = unary();
        for (;;) {
            if (eat('*')) {
                r = xy_mul(r, unary());
            } else if (at('/')) {
                size_t slash = pos_;
                ++pos_;
                XYPoly d = unary();
                if (d.term_count() != 1 || d.t.begin()->first != ExpPair{Rational(0), 0})
                    throw ParseError("divisor must be a nonzero constant", slash);
                r = xy_scale(r, Rational(1) / d.t.begin()->second);
            } else {
                return r;
            }
        }
    }

    XYPoly unary() {
        if (eat('-')) return xy_neg(unary());
        return power();
    }

    XYPoly power() {
        XYPoly base = atom();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            long long e = read_uint();
            if (e > kMaxExponent) throw ParseError("exponent too large", start);
            return xy_pow(base, static_cast<int>(e));
        }
        return base;
    }

    XYPoly atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '(') {
            size_t open = pos_;
            ++pos_;
            XYPoly r = expr();
            if (!eat(')')) throw ParseError("unbalanced parenthesis", open);
            return r;
        }
        if (c == 'x') {
            ++pos_;
            return XYPoly::term(Rational(1), Rational(1), 0);
        }
        if (c == 'y') {
            ++pos_;
            return XYPoly::term(Rational(1), Rational(0), 1);
        }
        if ((c >= '0' && c <= '9') || c == '.') return XYPoly::constant(read_number());
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    long long read_uint() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9')
            throw ParseError("expected a nonnegative integer", pos_);
        long long v = 0;
        while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
            v = v * 10 + (s_[pos_] - '0');
            if (v > 1000000) throw ParseError("integer out of range", pos_);
            ++pos_;
        }
        return v;
    }

    Rational read_number() {
        size_t start = pos_;
        while (pos_ < s_.size() &&
               ((s_[pos_] >= '0' && s_[pos_] <= '9') || s_[pos_] == '.'))
            ++pos_;
        try {
            return rational_from_string(s_.substr(start, pos_ - start));
        } catch (const std::exception& e) {
            throw ParseError(e.what(), start);
        }
    }
};

} // namespace detail

inline XYPoly parse_expression(const std::string& text) {
    return detail::ExprParser(text).run();
}

// A surface z = s(x, y) studied on the disc of the given radius, with the
// weight exponent beta and the vertical offset z0 of the associated bound.
struct SurfaceSpec {
    std::string label;
    std::string expr_text;
    XYPoly expr;
    Rational beta = Rational(0);
    Rational radius = Rational(1);
    Rational z0 = Rational(0);
};

inline void validate_surface(const SurfaceSpec& spec) {
    if (spec.expr.is_zero()) throw ValidationError("surface polynomial is identically zero");
    if (!spec.expr.integer_exponents())
        throw ValidationError("surface polynomial needs nonnegative integer exponents");
    if (spec.expr.eval(Rational(0), Rational(0)) != 0)
        throw ValidationError("surface must vanish at the origin");
    if (spec.beta < 0 || spec.beta >= 2)
        throw ValidationError("weight exponent must lie in [0, 2)");
    if (spec.radius <= 0 || spec.radius > 1)
        throw ValidationError("radius must lie in (0, 1]");
}

// key=value lines; '#' starts a comment; keys: label, expr, beta, radius, z0.
inline SurfaceSpec parse_surface_stream(std::istream& in, const std::string& origin) {
    SurfaceSpec spec;
    bool have_expr = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& t) {
            size_t i = t.find_first_not_of(" \t");
            size_t j = t.find_last_not_of(" \t");
            t = (i == std::string::npos) ? "" : t.substr(i, j - i + 1);
        };
        strip(key);
        strip(value);
        try {
            if (key == "label") {
                spec.label = value;
            } else if (key == "expr") {
                spec.expr_text = value;
                spec.expr = parse_expression(value);
                have_expr = true;
            } else if (key == "beta") {
                spec.beta = rational_from_string(value);
            } else if (key == "radius") {
                spec.radius = rational_from_string(value);
            } else if (key == "z0") {
                spec.z0 = rational_from_string(value);
            } else {
                throw ValidationError("unknown key '" + key + "'");
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_expr) throw ValidationError(origin + ": missing expr");
    if (spec.label.empty()) spec.label = spec.expr_text;
    return spec;
}

inline SurfaceSpec load_surface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open surface file: " + path);
    return parse_surface_stream(in, path);
}

} // namespace oscindex
