#pragma once

// Boundedness verdicts driven by the growth index.  The averaging operator
// over the surface admits an L^p threshold exactly when the Hessian
// determinant is not identically zero, and the companion transform is bounded
// on the interior of an explicit convex polygon in the (1/p, smoothness)
// plane whose shape depends only on whether the index reaches 1/2.

#include "oscindex/growth.hpp"
#include "oscindex/hessian.hpp"
#include "oscindex/parse.hpp"

#include <vector>

namespace oscindex {

struct MaximalVerdict {
    bool has_threshold = false; // vanishing determinant leaves no L^p range
    Rational threshold;         // bounded on L^p for every p > threshold
    bool sharp = false;         // attained when the surface misses the origin
};

struct RegionVertex {
    Rational x, y; // (1/p, smoothness order)
};

struct SobolevRegion {
    std::vector<RegionVertex> vertices; // counterclockwise boundary
    bool triangle = false;              // index at least 1/2 collapses the top side
};

inline MaximalVerdict maximal_verdict(const GrowthPair& index, const HessianInfo& hessian,
                                      const Rational& z0) {
    MaximalVerdict v;
    if (hessian.degenerate) return v;
    v.has_threshold = true;
    v.threshold = std::max(Rational(2), Rational(1) / index.g);
    v.sharp = z0 != 0;
    return v;
}

inline SobolevRegion radon_region(const GrowthPair& index) {
    SobolevRegion region;
    const Rational g = index.g;
    const Rational half = make_rational(1, 2);
    if (g >= half) {
        region.triangle = true;
        region.vertices = {{Rational(0), Rational(0)},
                           {Rational(1), Rational(0)},
                           {half, half}};
    } else {
        region.vertices = {{Rational(0), Rational(0)},
                           {Rational(1), Rational(0)},
                           {Rational(1) - g, g},
                           {g, g}};
    }
    return region;
}

// Strict interior membership of the convex counterclockwise boundary.
inline bool region_contains(const SobolevRegion& region, const Rational& x, const Rational& y) {
    const size_t n = region.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const RegionVertex& a = region.vertices[i];
        const RegionVertex& b = region.vertices[(i + 1) % n];
        Rational cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        if (cross <= 0) return false;
    }
    return true;
}

struct VerdictSet {
    HessianInfo hessian;
    MaximalVerdict maximal;
    SobolevRegion radon;
};

inline VerdictSet derive_verdicts(const SurfaceSpec& spec, const GrowthPair& index) {
    VerdictSet set;
    set.hessian = classify_hessian(spec.expr);
    set.maximal = maximal_verdict(index, set.hessian, spec.z0);
    set.radon = radon_region(index);
    return set;
}

} // namespace oscindex
