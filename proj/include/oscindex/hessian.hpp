#pragma once

// Second-order degeneracy of z = s(x, y): the exact determinant
// s_xx*s_yy - s_xy^2, and, when it vanishes identically, the linear
// straightening that puts the lowest-order form onto the y-axis.  For a
// vanishing determinant the lowest form is necessarily a power of a single
// linear form, so a failed reconstruction signals an internal inconsistency
// and raises.

#include "oscindex/polygon.hpp"

namespace oscindex {

struct HessianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HessianInfo {
    bool degenerate = false;
    XYPoly det;

    // Set when degenerate: lowest form = scale * (coeff_x*x + coeff_y*y)^power.
    int power = 0;
    Rational scale, coeff_x, coeff_y;
    LinearMap2 normal_map = LinearMap2::identity();
    XYPoly normal_form;
    bool swapped = false;      // straightening used the axis swap
    bool axis_vertex = false;  // normal form's polygon is the single vertex (0, power)
};

inline HessianInfo classify_hessian(const XYPoly& s) {
    HessianInfo info;
    XYPoly sxx = xy_dx(xy_dx(s));
    XYPoly syy = xy_dy(xy_dy(s));
    XYPoly sxy = xy_dy(xy_dx(s));
    info.det = xy_sub(xy_mul(sxx, syy), xy_mul(sxy, sxy));
    info.degenerate = info.det.is_zero();
    if (!info.degenerate) return info;

    XYPoly pp = principal_part(s);
    Rational ndeg = min_total_degree(s);
    if (!is_integer(ndeg)) throw HessianError("non-integer lowest degree");
    int n = static_cast<int>(floor_big(ndeg).convert_to<long long>());
    info.power = n;

    Rational A = pp.coefficient(Rational(n), 0);
    if (A != 0) {
        // Normalize the form as scale * (x + d*y)^power.
        info.coeff_x = Rational(1);
        info.scale = A;
        info.coeff_y = pp.coefficient(Rational(n - 1), 1) / (Rational(n) * A);
        XYPoly lin = xy_add(XYPoly::term(Rational(1), Rational(1), 0),
                            XYPoly::term(info.coeff_y, Rational(0), 1));
        if (!xy_sub(pp, xy_scale(xy_pow(lin, n), info.scale)).is_zero())
            throw HessianError("vanishing determinant with a non-power lowest form");
        if (info.coeff_y == 0) {
            info.normal_map = LinearMap2::swap_axes();
            info.swapped = true;
        } else {
            // y -> y - x/coeff_y kills the x-component of the form.
            info.normal_map =
                LinearMap2{Rational(1), Rational(0), -Rational(1) / info.coeff_y, Rational(1)};
        }
    } else {
        if (pp.term_count() != 1 || pp.coefficient(Rational(0), n) == 0)
            throw HessianError("vanishing determinant with a non-power lowest form");
        info.coeff_x = Rational(0);
        info.coeff_y = Rational(1);
        info.scale = pp.coefficient(Rational(0), n);
        info.normal_map = LinearMap2::identity();
    }
    info.normal_form = compose_linear(s, info.normal_map);
    if (n >= 2) {
        NewtonPolygon P = newton_polygon(info.normal_form);
        info.axis_vertex =
            P.single_vertex() && P.top().a == 0 && P.top().b == n;
        if (!info.axis_vertex)
            throw HessianError("straightened form has off-axis support");
    }
    return info;
}

} // namespace oscindex
