#pragma once

// Numerical cross-checks, independent of the symbolic pipeline:
//
//   * sublevel measure: a Monte Carlo estimator with the radial weight folded
//     into its sampling density, and a deterministic stratified-ray
//     integrator whose per-ray interval arithmetic resolves thresholds down
//     to ~2^-26;
//   * growth fitting: least squares over the two admitted asymptotic shapes,
//     a pure power of epsilon and a power times one logarithm;
//   * a mollified oscillatory integral with frequency-sized quadrature
//     panels, and the fitted decay exponent over a frequency ladder;
//   * a comparability audit that recomposes the original polynomial with
//     each piece's recorded chart by direct expansion, checks the recorded
//     working polynomial against it up to the truncation threshold, and
//     samples the monomial ratios and scaled derivative ratios;
//   * an ordering and stability audit of the damping records on refined
//     pieces.

#include "oscindex/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace oscindex {

// ---- Deterministic reduction ----------------------------------------------

// Sums in a fixed pairwise tree. The value depends only on the entries, not
// on how the work that produced them was scheduled, and the tree keeps the
// rounding error logarithmic in the length.
inline double pairwise_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    for (size_t width = 1; width < v.size(); width *= 2)
        for (size_t i = 0; i + width < v.size(); i += 2 * width)
            v[i] += v[i + width];
    return v[0];
}

// ---- Sublevel measure estimators ------------------------------------------

struct MeasurePoint {
    double epsilon = 0;
    double measure = 0;
};

// Threshold ladder 2^-4 .. 2^-26, twelve points.
inline std::vector<double> default_epsilons() {
    std::vector<double> eps;
    for (int k = 4; k <= 26; k += 2) eps.push_back(std::exp2(-k));
    return eps;
}

// Monte Carlo weighted sublevel measure. Sampling rho = r * U^(1/(2-beta))
// draws radii with density proportional to rho^(1-beta), which is exactly
// the polar form of the weight, so the estimator is the weighted disc mass
// times a plain hit fraction. Hits are integer counts per shard, making the
// result independent of how shards would be scheduled.
inline double mc_sublevel_measure(const SurfaceSpec& spec, double epsilon,
                                  long long samples, uint64_t seed) {
    const double beta = to_double(spec.beta);
    const double r = to_double(spec.radius);
    const double expo = 2.0 - beta;
    const double mass = 2.0 * std::numbers::pi * std::pow(r, expo) / expo;
    const int shards = 256;
    long long hits = 0, done = 0;
    for (int k = 0; k < shards; ++k) {
        long long quota = samples / shards + (k < samples % shards ? 1 : 0);
        detail::SampleRng rng(seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(k + 1));
        for (long long i = 0; i < quota; ++i) {
            double rho = r * std::pow(rng.next(), 1.0 / expo);
            double th = 2.0 * std::numbers::pi * rng.next();
            double sv = spec.expr.eval(rho * std::cos(th), rho * std::sin(th));
            if (std::abs(sv) < epsilon) ++hits;
        }
        done += quota;
    }
    return mass * static_cast<double>(hits) / static_cast<double>(done);
}

namespace detail {

inline int int_exponent(const Rational& q) {
    if (!is_integer(q)) throw std::domain_error("exponent is not an integer");
    return static_cast<int>(numerator(q).template convert_to<long long>());
}

// The surface restricted to a ray through the origin: a univariate
// polynomial in the radius.
struct RayPoly {
    std::vector<double> c;

    double operator()(double rho) const {
        double acc = 0;
        for (size_t k = c.size(); k-- > 0;) acc = acc * rho + c[k];
        return acc;
    }

    RayPoly derivative() const {
        RayPoly d;
        if (c.size() > 1) {
            d.c.resize(c.size() - 1);
            for (size_t k = 1; k < c.size(); ++k)
                d.c[k - 1] = c[k] * static_cast<double>(k);
        }
        return d;
    }

    bool all_zero() const {
        for (double v : c)
            if (v != 0) return false;
        return true;
    }
};

inline RayPoly restrict_to_ray(const XYPoly& p, double ct, double st) {
    RayPoly r;
    for (const auto& [e, c] : p.t) {
        int a = int_exponent(e.first);
        int b = e.second;
        size_t k = static_cast<size_t>(a + b);
        if (r.c.size() <= k) r.c.resize(k + 1, 0.0);
        r.c[k] += to_double(c) * std::pow(ct, a) * std::pow(st, b);
    }
    return r;
}

template <class F>
double bisect(F&& f, double a, double b, double fa) {
    for (int i = 0; i < 80; ++i) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Weighted length of {rho in (0, r): |g(rho)| < eps}. Critical points of g,
// located by derivative sign changes over a geometric scan, cut (0, r) into
// monotone segments; on a monotone segment the band crossings are simple
// bisections and each sublevel interval contributes its weight integral
// exactly. Tangential dips that never cross zero between two scan nodes are
// the only structures this can miss, and those carry vanishing measure.
inline double ray_sublevel_weight(const RayPoly& g, double r, double eps,
                                  double beta, int scan, long long& evals) {
    const double q = 2.0 - beta;
    auto weight_to = [q](double rho) { return std::pow(rho, q) / q; };
    if (g.all_zero()) return weight_to(r);
    auto gv = [&](double t) {
        ++evals;
        return g(t);
    };
    RayPoly dg = g.derivative();
    auto dgv = [&](double t) {
        ++evals;
        return dg(t);
    };
    std::vector<double> brk;
    brk.reserve(static_cast<size_t>(scan) + 16);
    double prev = r * std::exp2(-44.0);
    double dprev = dgv(prev);
    brk.push_back(prev);
    for (int j = 1; j <= scan; ++j) {
        double rho = (j == scan)
                         ? r
                         : r * std::exp2(-44.0 * (1.0 - static_cast<double>(j) / scan));
        double d = dgv(rho);
        if ((d < 0) != (dprev < 0)) brk.push_back(bisect(dgv, prev, rho, dprev));
        brk.push_back(rho);
        prev = rho;
        dprev = d;
    }
    double total = 0;
    // The sliver below the innermost node: g(0) = 0, so it is inside the
    // band exactly when its outer endpoint is.
    double a = brk.front(), ga = gv(a);
    if (std::abs(ga) < eps) total += weight_to(a);
    auto habs = [&](double t) { return std::abs(gv(t)) - eps; };
    for (size_t i = 1; i < brk.size(); ++i) {
        double b = brk[i], gb = gv(b);
        bool ia = std::abs(ga) < eps, ib = std::abs(gb) < eps;
        if (ia && ib) {
            total += weight_to(b) - weight_to(a);
        } else if (ia) {
            double c = bisect(habs, a, b, std::abs(ga) - eps);
            total += weight_to(c) - weight_to(a);
        } else if (ib) {
            double c = bisect(habs, a, b, std::abs(ga) - eps);
            total += weight_to(b) - weight_to(c);
        } else if ((ga < 0) != (gb < 0)) {
            // Monotone and fully through the band: one entry, one exit.
            double z = bisect(gv, a, b, ga);
            double c1 = bisect(habs, a, z, std::abs(ga) - eps);
            double c2 = bisect(habs, z, b, -eps);
            total += weight_to(c2) - weight_to(c1);
        }
        a = b;
        ga = gb;
    }
    return total;
}

struct ThetaEnv {
    const XYPoly* s = nullptr;
    double r = 1, eps = 0, beta = 0;
    int scan = 512;
    long long evals = 0;
};

inline double theta_measure(ThetaEnv& env, double th) {
    RayPoly g = restrict_to_ray(*env.s, std::cos(th), std::sin(th));
    return ray_sublevel_weight(g, env.r, env.eps, env.beta, env.scan, env.evals);
}

// Adaptive midpoint refinement of the angular integral. Cells split where
// the trapezoid and midpoint estimates disagree, which concentrates rays
// around directions where the restriction degenerates.
inline double theta_refine(ThetaEnv& env, double a, double b, double ma,
                           double mb, double tol, int depth) {
    double mid = 0.5 * (a + b);
    double mm = theta_measure(env, mid);
    double coarse = 0.5 * (ma + mb);
    double fine = 0.25 * (ma + 2.0 * mm + mb);
    if (depth <= 0 || std::abs(fine - coarse) * (b - a) <= tol)
        return fine * (b - a);
    return theta_refine(env, a, mid, ma, mm, 0.5 * tol, depth - 1) +
           theta_refine(env, mid, b, mm, mb, 0.5 * tol, depth - 1);
}

} // namespace detail

struct RayMeasureOptions {
    int base_rays = 256;   // uniform angular stratification
    int scan = 512;        // geometric radial scan nodes per ray
    int max_splits = 26;   // adaptive angular refinement depth
    double rel_tol = 2e-3; // target relative accuracy of the angular sum
};

// Deterministic weighted sublevel measure by stratified rays. Every ray
// contributes the exact weight of its sublevel intervals, so thin
// neighbourhoods of root branches are resolved no matter how small the
// threshold; the angular refinement handles directions where the surface
// vanishes along the ray.
inline double ray_sublevel_measure(const SurfaceSpec& spec, double epsilon,
                                   const RayMeasureOptions& opt = {},
                                   long long* evaluations = nullptr) {
    detail::ThetaEnv env;
    env.s = &spec.expr;
    env.r = to_double(spec.radius);
    env.eps = epsilon;
    env.beta = to_double(spec.beta);
    env.scan = opt.scan;
    const double two_pi = 2.0 * std::numbers::pi;
    const int n = opt.base_rays;
    std::vector<double> m(static_cast<size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        m[static_cast<size_t>(j)] = detail::theta_measure(env, two_pi * j / n);
    std::vector<double> cells(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        cells[static_cast<size_t>(j)] =
            0.5 * (m[static_cast<size_t>(j)] + m[static_cast<size_t>(j) + 1]) * (two_pi / n);
    const double rough = pairwise_sum(cells);
    const double tol_cell = opt.rel_tol * std::max(rough, 1e-300) / n;
    for (int j = 0; j < n; ++j)
        cells[static_cast<size_t>(j)] = detail::theta_refine(
            env, two_pi * j / n, two_pi * (j + 1) / n, m[static_cast<size_t>(j)],
            m[static_cast<size_t>(j) + 1], tol_cell, opt.max_splits);
    if (evaluations) *evaluations = env.evals;
    return pairwise_sum(cells);
}

// Measure at each threshold of the ladder; evaluation counts accumulate.
inline std::vector<MeasurePoint> measure_sweep(const SurfaceSpec& spec,
                                               const std::vector<double>& epsilons = default_epsilons(),
                                               const RayMeasureOptions& opt = {},
                                               long long* evaluations = nullptr) {
    std::vector<MeasurePoint> pts;
    pts.reserve(epsilons.size());
    long long total = 0;
    for (double eps : epsilons) {
        long long n = 0;
        pts.push_back({eps, ray_sublevel_measure(spec, eps, opt, &n)});
        total += n;
    }
    if (evaluations) *evaluations = total;
    return pts;
}

// ---- Growth fitting --------------------------------------------------------

struct GrowthFit {
    double g = 0;          // fitted decay exponent
    double intercept = 0;  // log of the fitted constant
    bool log_model = false; // the |log eps| factor improved the residual
    double g_stderr = 0;   // standard error of the slope under the chosen model
    double rss_plain = 0;
    double rss_log = 0;
    int used = 0;
};

// Least squares of log(measure) against log(eps), for the two admitted
// shapes C eps^g and C eps^g |log eps|. The log factor is forced, not
// fitted, so both models carry two parameters and the smaller residual
// picks the shape.
inline GrowthFit fit_growth(const std::vector<MeasurePoint>& pts) {
    std::vector<double> x, y;
    for (const auto& p : pts)
        if (p.measure > 0 && p.epsilon > 0 && p.epsilon < 1) {
            x.push_back(std::log(p.epsilon));
            y.push_back(std::log(p.measure));
        }
    if (x.size() < 3)
        throw std::domain_error("growth fit needs at least three positive measures");
    auto line = [](const std::vector<double>& xs, const std::vector<double>& ys,
                   double& slope, double& icept) {
        double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        icept = (sy - slope * sx) / n;
        double rss = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - (icept + slope * xs[i]);
            rss += e * e;
        }
        return rss;
    };
    GrowthFit f;
    f.used = static_cast<int>(x.size());
    double g1 = 0, c1 = 0, g2 = 0, c2 = 0;
    f.rss_plain = line(x, y, g1, c1);
    std::vector<double> y2(y);
    for (size_t i = 0; i < y2.size(); ++i) y2[i] -= std::log(-x[i]);
    f.rss_log = line(x, y2, g2, c2);
    f.log_model = f.rss_log < f.rss_plain;
    f.g = f.log_model ? g2 : g1;
    f.intercept = f.log_model ? c2 : c1;
    double sx = 0, sxx = 0;
    for (double v : x) {
        sx += v;
        sxx += v * v;
    }
    double n = static_cast<double>(x.size());
    double sxx_centered = sxx - sx * sx / n;
    double rss = f.log_model ? f.rss_log : f.rss_plain;
    if (x.size() > 2 && sxx_centered > 0)
        f.g_stderr = std::sqrt(rss / ((n - 2.0) * sxx_centered));
    return f;
}

// ---- Oscillatory decay -----------------------------------------------------

namespace detail {

// Smooth radial cutoff: 1 at the origin, vanishing to all orders at 1, so
// the boundary contributes nothing to the decay rate.
inline double mollifier(double t) {
    double u = 1.0 - t * t;
    return u > 1e-12 ? std::exp(1.0 - 1.0 / u) : 0.0;
}

inline constexpr double kGl8Node[4] = {0.1834346424956498, 0.5255324099163290,
                                       0.7966664774136267, 0.9602898564975363};
inline constexpr double kGl8Weight[4] = {0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

} // namespace detail

// Frequency ladder 2^4 .. 2^14.
inline std::vector<double> default_frequencies() {
    return {16.0, 64.0, 256.0, 1024.0, 4096.0, 16384.0};
}

// Mollified oscillatory integral of the surface over the weighted disc at
// one frequency. Polar form: trapezoid in the angle (periodic, so the rule
// is spectrally accurate) and composite Gauss panels per radial binade,
// with panel counts sized to the local phase span. Both the angle count and
// the panel density refine until two levels agree.
inline std::complex<double> oscillatory_integral(const SurfaceSpec& spec, double lambda,
                                                 int base_theta = 64, int max_levels = 4,
                                                 double rel_tol = 3e-3,
                                                 bool* converged = nullptr) {
    const double r = to_double(spec.radius);
    const double beta = to_double(spec.beta);
    const double two_pi = 2.0 * std::numbers::pi;
    std::complex<double> prev{0.0, 0.0};
    for (int level = 0; level < max_levels; ++level) {
        const int ntheta = base_theta << level;
        const double span_target = 4.0 / (1 << level);
        std::vector<double> res(static_cast<size_t>(ntheta));
        std::vector<double> ims(static_cast<size_t>(ntheta));
        for (int j = 0; j < ntheta; ++j) {
            const double th = two_pi * (j + 0.5) / ntheta;
            detail::RayPoly g = detail::restrict_to_ray(spec.expr, std::cos(th), std::sin(th));
            double are = 0, aim = 0;
            for (int k = 0; k < 52; ++k) {
                const double hi = r * std::exp2(-static_cast<double>(k));
                const double lo = 0.5 * hi;
                double gmin = 0, gmax = 0;
                for (int t = 0; t <= 4; ++t) {
                    double v = g(lo + (hi - lo) * t / 4.0);
                    if (t == 0 || v < gmin) gmin = v;
                    if (t == 0 || v > gmax) gmax = v;
                }
                int panels = 1 + static_cast<int>(std::min(1.6e4, lambda * (gmax - gmin) / span_target));
                const double h = (hi - lo) / panels;
                for (int pnl = 0; pnl < panels; ++pnl) {
                    const double c = lo + h * (pnl + 0.5), hw = 0.5 * h;
                    for (int i = 0; i < 4; ++i) {
                        for (int sgn = -1; sgn <= 1; sgn += 2) {
                            const double rho = c + sgn * hw * detail::kGl8Node[i];
                            const double amp = detail::mollifier(rho / r) *
                                               std::pow(rho, 1.0 - beta) *
                                               detail::kGl8Weight[i] * hw;
                            const double ph = lambda * g(rho);
                            are += amp * std::cos(ph);
                            aim += amp * std::sin(ph);
                        }
                    }
                }
            }
            res[static_cast<size_t>(j)] = are;
            ims[static_cast<size_t>(j)] = aim;
        }
        std::complex<double> cur(pairwise_sum(std::move(res)), pairwise_sum(std::move(ims)));
        cur *= two_pi / ntheta;
        if (level > 0 && std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) {
            if (converged) *converged = true;
            return cur;
        }
        prev = cur;
    }
    // Levels exhausted without two consecutive refinements agreeing: the
    // value is unreliable and the caller must not fit through it.
    if (converged) *converged = false;
    return prev;
}

// Fitted decay exponent of the oscillatory integral's modulus over a
// frequency ladder. Feeding 1/lambda as the abscissa reuses the growth
// model: |I| ~ C lambda^-o reads as C (1/lambda)^o.
struct DecayHealth {
    int requested = 0;      // ladder points asked for
    int reliable = 0;       // leading points whose quadrature self-certified
    int extended = 0;       // points appended past the ladder to outrun a crawl
    double lambda_max = 0;  // deepest frequency the fit actually used
    double tail_slope = 0;  // decay slope of the last reliable pair
    double drift = 0;       // |tail_slope - fitted g|: preasymptotic crawl marker
    bool converged = false; // three reliable points and drift under the gate
};

// Largest drift between the fitted exponent and the deepest pairwise slope
// that still counts as settled. Calibrated against the bundled corpus: the
// surfaces whose ladders sit in the asymptotic regime stay under 0.021,
// while a preasymptotic crawl shows 0.125.
inline constexpr double kDecayDriftGate = 0.05;

// Fits the modulus decay over the reliable prefix of the frequency ladder:
// quadrature difficulty grows with the frequency, so the first point whose
// refinement failed to settle truncates the window, and the drift between
// the fit and the deepest pairwise slope flags ladders that have not
// reached the asymptotic regime yet. A ladder that is fully reliable but
// still drifting is extended geometrically (while the quadrature keeps
// certifying, up to lambda = 2^26) and refit over the trailing window, so
// slowly separating exponent pairs get the deeper frequencies they need.
inline GrowthFit oscillatory_decay(const SurfaceSpec& spec,
                                   const std::vector<double>& lambdas = default_frequencies(),
                                   DecayHealth* health = nullptr,
                                   std::vector<MeasurePoint>* points = nullptr) {
    std::vector<MeasurePoint> pts;
    pts.reserve(lambdas.size());
    DecayHealth h;
    h.requested = static_cast<int>(lambdas.size());
    auto probe = [&](double l) {
        bool ok = false;
        // Six refinement levels: the angular trapezoid converges spectrally,
        // so certification needs the level after the accurate one to agree
        // with it; deep cusp windows only reach that around level five.
        std::complex<double> val = oscillatory_integral(spec, l, 64, 6, 3e-3, &ok);
        if (ok) pts.push_back({1.0 / l, std::abs(val)});
        return ok;
    };
    for (double l : lambdas)
        if (!probe(l)) break;
    h.reliable = static_cast<int>(pts.size());
    const size_t window = lambdas.size();
    auto refit = [&](GrowthFit& fit) {
        std::vector<MeasurePoint> tail(pts.end() - std::min(pts.size(), window), pts.end());
        fit = fit_growth(tail);
        const MeasurePoint& a = tail[tail.size() - 2];
        const MeasurePoint& b = tail[tail.size() - 1];
        h.tail_slope = std::log(a.measure / b.measure) / std::log(a.epsilon / b.epsilon);
        h.drift = std::abs(h.tail_slope - fit.g);
        h.converged = h.drift <= kDecayDriftGate;
        h.lambda_max = 1.0 / tail.back().epsilon;
    };
    GrowthFit fit;
    if (h.reliable >= 3) {
        refit(fit);
        if (!h.converged && h.reliable == h.requested && lambdas.size() >= 2) {
            const double step = lambdas[lambdas.size() - 1] / lambdas[lambdas.size() - 2];
            double l = 1.0 / pts.back().epsilon;
            while (!h.converged && l * step <= 67108864.0 && step > 1.0) {
                l *= step;
                if (!probe(l)) break;
                ++h.extended;
                refit(fit);
            }
        }
    }
    if (health) *health = h;
    if (points) *points = pts;
    return fit;
}

// ---- Comparability audit ---------------------------------------------------

namespace detail {

// Composition with a piece's chart by direct expansion: v = sigma*w + k(u),
// the two original coordinates as polynomials in (u, w), then a plain sum
// over the terms with memoized powers. This is a different route from the
// incremental shift chain that produced the piece, so agreement checks that
// chain.
struct ChartComposer {
    XYPoly X, Y;
    std::vector<XYPoly> xpow{XYPoly::constant(Rational(1))};
    std::vector<XYPoly> ypow{XYPoly::constant(Rational(1))};

    explicit ChartComposer(const DomainPiece& p) {
        XYPoly v = xy_add(XYPoly::term(Rational(p.sigma), Rational(0), 1), p.prefix.to_poly());
        XYPoly u = XYPoly::term(Rational(1), Rational(1), 0);
        X = xy_add(xy_scale(u, p.embed.m00), xy_scale(v, p.embed.m01));
        Y = xy_add(xy_scale(u, p.embed.m10), xy_scale(v, p.embed.m11));
    }

    const XYPoly& power(std::vector<XYPoly>& cache, const XYPoly& base, int n) {
        while (static_cast<int>(cache.size()) <= n)
            cache.push_back(xy_mul(cache.back(), base));
        return cache[static_cast<size_t>(n)];
    }

    XYPoly compose(const XYPoly& s) {
        XYPoly out;
        for (const auto& [e, c] : s.t) {
            int a = int_exponent(e.first);
            XYPoly term = xy_mul(power(xpow, X, a), power(ypow, Y, e.second));
            out = xy_add(out, xy_scale(term, c));
        }
        return out;
    }
};

// True when every term sits at or past the truncation threshold, i.e. the
// difference is explained by dropped tail terms alone.
inline bool clears_threshold(const XYPoly& diff, const Rational& threshold) {
    for (const auto& [e, c] : diff.t)
        if (e.first < threshold) return false;
    return true;
}

inline XYPoly shift_exponents(const XYPoly& g, int da, int db) {
    XYPoly r;
    for (const auto& [e, c] : g.t) r.t[{e.first + da, e.second + db}] = c;
    return r;
}

// A polynomial flattened against a ruling monomial: each term becomes
// sign * 2^(logc + da*log2(u) + db*log2(w)), so the ruling term is exactly
// +-1 and dominated terms underflow to zero at tiny scales instead of
// overflowing a difference.
struct FlatPoly {
    struct Term {
        double logc, da, db, sign;
    };
    std::vector<Term> terms;

    double sum(double lu, double lw) const {
        double acc = 0;
        for (const auto& t : terms)
            acc += t.sign * std::exp2(t.logc + t.da * lu + t.db * lw);
        return acc;
    }
};

inline FlatPoly flatten_ratio(const XYPoly& g, const Rational& coeff,
                              const Rational& a0, int b0) {
    FlatPoly fp;
    fp.terms.reserve(g.t.size());
    const double logc0 = std::log2(std::abs(to_double(coeff)));
    const double av = to_double(a0);
    const double s0 = to_double(coeff) < 0 ? -1.0 : 1.0;
    for (const auto& [e, c] : g.t) {
        double cv = to_double(c);
        fp.terms.push_back({std::log2(std::abs(cv)) - logc0, to_double(e.first) - av,
                            static_cast<double>(e.second - b0),
                            (cv < 0 ? -1.0 : 1.0) * s0});
    }
    return fp;
}

} // namespace detail

struct PieceAudit {
    size_t piece = 0;
    bool excluded = false;
    std::string exclusion;
    bool chart_consistent = true; // recomposition matches below the threshold
    long samples = 0;
    long violations = 0;
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    double derivative_max = 0.0;
};

struct ComparabilityAudit {
    std::vector<PieceAudit> pieces;
    long checked = 0;
    long excluded = 0;
    long violations = 0;
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    double derivative_max = 0.0;
};

struct AuditOptions {
    long samples = 4096;           // log-uniform points per piece
    double ratio_lo = 0.5;         // two-sided comparability window
    double ratio_hi = 2.0;
    int derivative_order = 2;      // all mixed orders up to this, per variable
    double derivative_bound = 50.0;
    uint64_t seed = 0xA11D17ull;
};

// Audits every piece of a decomposition against the original polynomial:
// recomposes it with the recorded chart by direct expansion, requires the
// recorded working polynomial to agree up to dropped tail terms, then
// samples |truth / ruling monomial| against the comparability window and
// |u^a w^b * d^(a+b) truth| / |truth| against the derivative bound, factor
// by factor on refined pieces. Absorbed tails are excluded with a reason:
// those pieces make no monomial claim by construction.
inline ComparabilityAudit audit_comparability(const Decomposition& dec,
                                              const AuditOptions& opt = {}) {
    ComparabilityAudit out;
    const XYPoly& s = dec.spec.expr;
    const XYPoly sx = xy_dx(s), sy = xy_dy(s);
    const XYPoly sxx = xy_dx(sx), sxy = xy_dy(sx), syy = xy_dy(sy);
    for (size_t pi = 0; pi < dec.pieces.size(); ++pi) {
        const DomainPiece& p = dec.pieces[pi];
        PieceAudit pa;
        pa.piece = pi;
        if (p.tail_absorbed) {
            pa.excluded = true;
            pa.exclusion = "absorbed tail: no monomial claim to audit";
            ++out.excluded;
            out.pieces.push_back(std::move(pa));
            continue;
        }
        detail::ChartComposer chart(p);
        struct Target {
            XYPoly truth;
            const XYPoly* recorded;
            Rational coeff, a;
            int b;
            bool sign_free; // odd derivative order may flip under later shifts
        };
        std::vector<Target> targets;
        if (p.stage == 2 && p.factor_polys.size() == 3) {
            const Rational sg(p.sigma);
            const Rational& e01 = p.embed.m01;
            const Rational& e11 = p.embed.m11;
            XYPoly tw = xy_scale(
                xy_add(xy_scale(chart.compose(sx), e01), xy_scale(chart.compose(sy), e11)), sg);
            XYPoly tww = xy_add(
                xy_add(xy_scale(chart.compose(sxx), e01 * e01),
                       xy_scale(chart.compose(sxy), 2 * e01 * e11)),
                xy_scale(chart.compose(syy), e11 * e11));
            targets.push_back({chart.compose(s), &p.factor_polys[0], p.factor_f.coeff,
                               p.factor_f.a, p.factor_f.b, false});
            targets.push_back({std::move(tw), &p.factor_polys[1], p.factor_fw.coeff,
                               p.factor_fw.a, p.factor_fw.b, true});
            targets.push_back({std::move(tww), &p.factor_polys[2], p.factor_fww.coeff,
                               p.factor_fww.a, p.factor_fww.b, false});
        } else {
            targets.push_back({chart.compose(s), &p.local, p.dom_coeff, p.alpha, p.yexp, false});
        }
        for (const Target& t : targets) {
            bool ok = detail::clears_threshold(xy_sub(t.truth, *t.recorded), dec.cutoff);
            if (!ok && t.sign_free)
                ok = detail::clears_threshold(xy_add(t.truth, *t.recorded), dec.cutoff);
            if (!ok) {
                pa.chart_consistent = false;
                ++pa.violations;
            }
        }
        std::vector<detail::FlatPoly> ratio_polys;
        std::vector<detail::FlatPoly> deriv_polys;
        std::vector<size_t> deriv_base;
        for (size_t ti = 0; ti < targets.size(); ++ti) {
            const Target& t = targets[ti];
            ratio_polys.push_back(detail::flatten_ratio(t.truth, t.coeff, t.a, t.b));
            XYPoly dyb = t.truth;
            for (int db = 0; db <= opt.derivative_order; ++db) {
                XYPoly dab = dyb;
                for (int da = 0; da <= opt.derivative_order; ++da) {
                    if (da + db > 0) {
                        deriv_polys.push_back(detail::flatten_ratio(
                            detail::shift_exponents(dab, da, db), t.coeff, t.a, t.b));
                        deriv_base.push_back(ti);
                    }
                    if (da < opt.derivative_order) dab = xy_dx(dab, true);
                }
                if (db < opt.derivative_order) dyb = xy_dy(dyb);
            }
        }
        detail::SampleRng rng(opt.seed ^ (0x9e3779b97f4a7c15ull * (pi + 1)));
        const double lr = std::log2(to_double(dec.radius));
        const double hi_c = to_double(p.hi_coeff), hi_e = to_double(p.hi_exp);
        const double lo_c = to_double(p.lo_coeff), lo_e = to_double(p.lo_exp);
        std::vector<double> base_abs(targets.size());
        for (long i = 0; i < opt.samples; ++i) {
            double lu = lr - 20.0 * rng.next();
            double lcap = std::log2(hi_c) + hi_e * lu;
            double lfloor = p.lo_coeff == 0 ? lcap - 20.0 : std::log2(lo_c) + lo_e * lu;
            if (!(lfloor < lcap)) continue;
            double lw = lfloor + (lcap - lfloor) * rng.next();
            ++pa.samples;
            for (size_t ti = 0; ti < targets.size(); ++ti) {
                double v = std::abs(ratio_polys[ti].sum(lu, lw));
                if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
                base_abs[ti] = v;
                pa.ratio_min = std::min(pa.ratio_min, v);
                pa.ratio_max = std::max(pa.ratio_max, v);
                if (v < opt.ratio_lo || v > opt.ratio_hi) ++pa.violations;
            }
            for (size_t di = 0; di < deriv_polys.size(); ++di) {
                double dv = std::abs(deriv_polys[di].sum(lu, lw));
                double ratio = dv / base_abs[deriv_base[di]];
                if (!std::isfinite(ratio)) {
                    ++pa.violations;
                    continue;
                }
                pa.derivative_max = std::max(pa.derivative_max, ratio);
                if (ratio > opt.derivative_bound) ++pa.violations;
            }
        }
        ++out.checked;
        out.violations += pa.violations;
        out.ratio_min = std::min(out.ratio_min, pa.ratio_min);
        out.ratio_max = std::max(out.ratio_max, pa.ratio_max);
        out.derivative_max = std::max(out.derivative_max, pa.derivative_max);
        out.pieces.push_back(std::move(pa));
    }
    return out;
}

// ---- Damping audit ---------------------------------------------------------

struct DampingAudit {
    size_t piece = 0;
    int vertex_b = 0;
    double intercept = 0;    // b-axis intercept of the deep edge
    double order_left = 0;   // sampled constant in w^B' <= C u^A w^B
    double order_right = 0;  // sampled constant in u^A w^B <= C' u^G w^(D+2)
    double integral_coarse = 0;
    double integral_fine = 0;
    double rel_change = 1.0;
    bool stable = false;
};

struct DampingOptions {
    double exponent_margin = 0.9; // damping exponent as a fraction of the index
    int depth = 44;               // binade cutoff of the coarse integral
    double tol = 0.05;            // stability target under 2x refinement
    int grid_u = 64, grid_w = 16; // ordering-constant sample grid
};

// For refined pieces whose deep vertex has w-order at least two: samples
// the two-sided monomial ordering that chains the b-axis intercept, the
// deep vertex, and the second-derivative monomial, then integrates the
// damping weight |w^B' * f|^(-margin*g/2) |(x,y)|^-beta over the piece and
// checks stability when the depth cutoff doubles.
inline std::vector<DampingAudit> audit_damping(const Decomposition& dec,
                                               const DampingOptions& opt = {}) {
    std::vector<DampingAudit> out;
    const double gidx = to_double(dec.index.g);
    const double beta = to_double(dec.spec.beta);
    const double lr = std::log2(to_double(dec.radius));
    for (size_t pi = 0; pi < dec.pieces.size(); ++pi) {
        const DomainPiece& p = dec.pieces[pi];
        if (p.stage != 2 || !p.damping.defined || p.damping.vertex_b < 2) continue;
        if (p.factor_polys.size() != 3 || !p.factor_f.defined || !p.factor_fww.defined) continue;
        DampingAudit da;
        da.piece = pi;
        da.vertex_b = p.damping.vertex_b;
        da.intercept = to_double(p.damping.intercept);
        const double va = to_double(p.damping.vertex_a);
        const double vb = p.damping.vertex_b;
        const double bp = da.intercept;
        const double ga = to_double(p.factor_fww.a);
        const double gb = p.factor_fww.b;
        const double hi_c = to_double(p.hi_coeff), hi_e = to_double(p.hi_exp);
        const double lo_c = to_double(p.lo_coeff), lo_e = to_double(p.lo_exp);
        const double lmc = std::log2(std::abs(to_double(p.factor_f.coeff)));
        const double lma = to_double(p.factor_f.a);
        const int lmb = p.factor_f.b;
        detail::FlatPoly ff =
            detail::flatten_ratio(p.factor_polys[0], p.factor_f.coeff, p.factor_f.a, p.factor_f.b);
        for (int iu = 0; iu < opt.grid_u; ++iu) {
            double lu = lr - 20.0 * (iu + 0.5) / opt.grid_u;
            double lcap = std::log2(hi_c) + hi_e * lu;
            double lfloor = p.lo_coeff == 0 ? lcap - 20.0 : std::log2(lo_c) + lo_e * lu;
            if (!(lfloor < lcap)) continue;
            for (int iw = 0; iw < opt.grid_w; ++iw) {
                double lw = lfloor + (lcap - lfloor) * (iw + 0.5) / opt.grid_w;
                da.order_left = std::max(da.order_left, std::exp2(bp * lw - va * lu - vb * lw));
                da.order_right =
                    std::max(da.order_right, std::exp2(va * lu + vb * lw - ga * lu - (gb + 2) * lw));
            }
        }
        auto integral = [&](int depth_u, double floor_depth) {
            const int nu = 3 * depth_u, nw = 28;
            std::vector<double> cells;
            cells.reserve(static_cast<size_t>(nu));
            const double dtau = static_cast<double>(depth_u) / nu;
            for (int iu = 0; iu < nu; ++iu) {
                double lu = lr - depth_u * (iu + 0.5) / nu;
                double lcap = std::log2(hi_c) + hi_e * lu;
                double lfloor =
                    p.lo_coeff == 0 ? lcap - floor_depth : std::log2(lo_c) + lo_e * lu;
                if (!(lfloor < lcap)) {
                    cells.push_back(0.0);
                    continue;
                }
                const double dom = (lcap - lfloor) / nw;
                double acc = 0;
                for (int iw = 0; iw < nw; ++iw) {
                    double lw = lfloor + (lcap - lfloor) * (iw + 0.5) / nw;
                    double fr = std::abs(ff.sum(lu, lw));
                    if (!(fr > 0) || !std::isfinite(fr)) continue;
                    double lf = std::log2(fr) + lmc + lma * lu + lmb * lw;
                    double vu = p.sigma * std::exp2(lw - lu);
                    for (const auto& [pe, pc] : p.prefix.terms)
                        vu += to_double(pc) * std::exp2((to_double(pe) - 1.0) * lu);
                    double dx = to_double(p.embed.m00) + to_double(p.embed.m01) * vu;
                    double dy = to_double(p.embed.m10) + to_double(p.embed.m11) * vu;
                    double lrho = lu + 0.5 * std::log2(dx * dx + dy * dy);
                    double lint =
                        -0.5 * opt.exponent_margin * gidx * (bp * lw + lf) - beta * lrho;
                    acc += std::exp2(lint + lu + lw);
                }
                cells.push_back(acc * dom * dtau);
            }
            return pairwise_sum(std::move(cells)) * (std::numbers::ln2 * std::numbers::ln2);
        };
        da.integral_coarse = integral(opt.depth, 20.0);
        da.integral_fine = integral(2 * opt.depth, 40.0);
        da.rel_change = std::abs(da.integral_fine - da.integral_coarse) /
                        std::max(std::abs(da.integral_fine), 1e-300);
        da.stable = da.rel_change < opt.tol;
        out.push_back(da);
    }
    return out;
}

} // namespace oscindex
