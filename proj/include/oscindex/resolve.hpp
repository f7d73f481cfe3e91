#pragma once

// Two-stage decomposition of the disc into monomial-comparable pieces.
//
// Stage 1 slices the disc into eight sectors along directions where the
// lowest form does not vanish, normalizes each to {u > 0, 0 < w < H*u},
// and recursively splits every window along its support polygon:
//   * washers between consecutive edge scales, ruled by a vertex monomial;
//   * bands at an edge scale where the edge polynomial stays away from zero,
//     ruled by the edge value at a rational reference slope, subdivided until
//     the sampled variation is within the target window;
//   * root windows around each positive rational root of an edge polynomial,
//     re-entered recursively through the shift v = sigma*w + k(u);
//   * a bottom piece under the deepest processed scale.
// Working polynomials stay exact until the truncation budget drops a term;
// from that point the window is marked lossy and its bottom piece absorbs
// the (provably non-binding) tail without claiming comparability on it.
//
// Stage 2 revisits pieces whose ruling monomial is flat in w and whose chart
// follows a curved branch, re-decomposing the product f * f_w * f_ww there so
// that each derivative factor is itself monomial-ruled; these refined pieces
// replace their parents and carry the damping data used by the transform
// bounds.

#include "oscindex/growth.hpp"
#include "oscindex/parse.hpp"
#include "oscindex/polygon.hpp"
#include "oscindex/puiseux.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace oscindex {

struct DecompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PieceKind { band, washer, bottom };

inline const char* to_string(PieceKind k) {
    switch (k) {
        case PieceKind::band: return "band";
        case PieceKind::washer: return "washer";
        default: return "bottom";
    }
}

struct FactorMonomial {
    bool defined = false;
    Rational coeff, a;
    int b = 0;
};

struct DampingRecord {
    bool defined = false;
    Rational vertex_a;        // upper vertex of the deepest compact edge
    int vertex_b = 0;
    Rational intercept;       // level/exponent: b-axis intercept of that edge line
    Rational weight_u, weight_w; // damping weight exponents (alpha/2, intercept/2)
    bool intercept_identity = false; // intercept * exponent == edge level, cross-checked
};

struct DomainPiece {
    int sector = 0;
    std::string sector_name;
    LinearMap2 embed;            // sector chart -> original coordinates
    PuiseuxPrefix prefix;        // v = sigma*w + k(u)
    int sigma = 1;
    PieceKind kind = PieceKind::bottom;
    Rational hi_coeff, hi_exp;   // region upper boundary hi_coeff * u^hi_exp
    Rational lo_coeff, lo_exp;   // lower boundary; lo_coeff == 0 on bottom pieces
    Rational dom_coeff, alpha;   // ruling monomial dom_coeff * u^alpha * w^yexp
    int yexp = 0;
    GrowthPair growth;
    bool tail_absorbed = false;  // no comparability claim (absorbed branch tail)
    int stage = 1;
    XYPoly local;                // window polynomial in this chart (exact unless tail)
    FactorMonomial factor_f, factor_fw, factor_fww; // stage-2 records
    std::vector<XYPoly> factor_polys; // stage-2: f, f_w, f_ww in this chart
    DampingRecord damping;
};

struct SectorFrame {
    std::string name;
    LinearMap2 embed;
    XYPoly poly;
    Rational cap; // window: 0 < w < cap * u
};

struct ResolveOptions {
    Rational eta = make_rational(1, 10);
    int max_depth = 1000;
    int max_band_splits = 40;
    int max_terms = 20000;
    bool simultaneous = true;
    int calibration_grid = 8;
    int max_radius_halvings = 40;
    // Emission-time ceiling on sampled derivative-to-value ratios; kept a
    // notch under the downstream audit bound so grid sampling has headroom.
    double derivative_budget = 48.0;
    int max_layout_attempts = 200;
};

struct Decomposition {
    SurfaceSpec spec;
    ResolveOptions options;
    Rational mplus, mminus;            // slicing slopes
    bool axis_x_in_zero_set = false;   // lowest form vanishes along the x-axis
    bool axis_y_in_zero_set = false;
    std::vector<SectorFrame> sectors;
    std::vector<DomainPiece> pieces;
    Rational budget;                   // claim horizon: no piece structure past this scale
    Rational cutoff;                   // truncation threshold (deeper than the horizon)
    Rational separation;               // branch separation depth found by the probe
    GrowthPair index;                  // aggregated (g, log exponent)
    bool any_tail = false;
    Rational radius;                   // calibrated working radius
    int radius_halvings = 0;
};

namespace detail {

// Deterministic splitmix-style generator for sampling grids.
struct SampleRng {
    uint64_t state;
    explicit SampleRng(uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ull) {}
    double next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

inline Rational rational_mid_geom(const Rational& a, const Rational& b) {
    double g = std::sqrt(to_double(a) * to_double(b));
    Rational m = rational_near(g);
    if (m <= a || m >= b) m = (a + b) / 2;
    return m;
}

// A polynomial divided by a reference monomial, flattened for evaluation in
// log2 space: each term keeps its signed magnitude and relative exponents,
// so sums stay finite even at depths where raw monomial values underflow.
struct RatioPoly {
    struct Term {
        double logc, da, db, sign;
    };
    std::vector<Term> terms;
    double sum(double lu, double lw) const {
        double acc = 0;
        for (const auto& t : terms) acc += t.sign * std::exp2(t.logc + t.da * lu + t.db * lw);
        return acc;
    }
};

inline RatioPoly ratio_flatten(const XYPoly& g, const Rational& coeff, const Rational& a0,
                               int b0) {
    RatioPoly r;
    const double lc = std::log2(std::abs(to_double(coeff)));
    const double a0d = to_double(a0);
    for (const auto& [e, c] : g.t) {
        double cd = to_double(c);
        if (cd == 0) continue;
        RatioPoly::Term t;
        t.logc = std::log2(std::abs(cd)) - lc;
        t.da = to_double(e.first) - a0d;
        t.db = static_cast<double>(e.second - b0);
        t.sign = cd > 0 ? 1.0 : -1.0;
        r.terms.push_back(t);
    }
    return r;
}

// u^a w^b * d^(a+b) g / (du^a dw^b): the scaled mixed derivative whose size
// relative to g itself is what the emitted claims must keep bounded.
inline XYPoly scaled_derivative(const XYPoly& g, int da, int db) {
    XYPoly d = g;
    for (int i = 0; i < db; ++i) d = xy_dy(d);
    for (int i = 0; i < da; ++i) d = xy_dx(d, true);
    XYPoly r;
    for (const auto& [e, c] : d.t) r.t[{e.first + da, e.second + db}] = c;
    return r;
}

} // namespace detail

class Resolver {
  public:
    Resolver(const SurfaceSpec& spec, ResolveOptions options = {})
        : spec_(spec), opt_(options) {}

    Decomposition run() {
        validate_surface(spec_);
        out_ = Decomposition{};
        out_.spec = spec_;
        out_.options = opt_;
        choose_slopes();
        build_sectors();
        out_.separation = separation_depth();
        // Edges past this scale are never chased: beyond the separation depth
        // a window holds at most one branch cluster, so the absorbed bottom's
        // two-regime formula is already exact there. Cutting the chase this
        // early also keeps claim levels small, which is what keeps the
        // derivative-to-value ratios of the claimed pieces bounded.
        break_scale_ = std::max(out_.separation, Rational(1));
        // The truncation constants must bound exponents in every chart, and
        // the steep charts swap the roles of the two variables.
        for (const auto& fr : out_.sectors)
            for (const auto& [e, c] : fr.poly.t) {
                amax_ = std::max(amax_, e.first);
                bmax_ = std::max(bmax_, e.second);
            }
        out_.budget = claim_horizon();
        // Terms truncated away sit at u-exponent >= cutoff, so their weighted
        // value A + q*B >= cutoff at every scale q > 0; keeping the cutoff
        // equal to the level horizon means no dropped term can ever undercut
        // an edge the break rule trusts (level < horizon). The budget exceeds
        // the break scale by construction, so the horizon covers every edge
        // the chase is still willing to process.
        level_horizon_ = out_.budget + amax_ + 2;
        out_.cutoff = level_horizon_;
        for (size_t i = 0; i < out_.sectors.size(); ++i) {
            WindowCtx ctx;
            ctx.sector = static_cast<int>(i);
            ctx.f = out_.sectors[i].poly;
            ctx.cap_coeff = out_.sectors[i].cap;
            ctx.cap_exp = Rational(1);
            ctx.sigma = 1;
            analyze_window(ctx);
        }
        if (opt_.simultaneous) refine_simultaneous();
        std::vector<GrowthPair> parts;
        for (const auto& p : out_.pieces) {
            parts.push_back(p.growth);
            out_.any_tail = out_.any_tail || p.tail_absorbed;
        }
        out_.index = aggregate_growth(parts);
        calibrate_radius();
        return std::move(out_);
    }

  private:
    SurfaceSpec spec_;
    ResolveOptions opt_;
    Decomposition out_;
    Rational amax_;
    int bmax_ = 0;
    Rational level_horizon_;
    Rational break_scale_;

    struct WindowCtx {
        int sector = 0;
        XYPoly f;
        bool lossy = false;
        PuiseuxPrefix prefix;
        int sigma = 1;
        Rational cap_coeff, cap_exp;
        int depth = 0;
        int stage = 1;
        std::optional<std::array<XYPoly, 3>> factors; // stage 2: f, f_w, f_ww in-chart
    };

    // ---- Stage-1 scaffolding ----------------------------------------------

    void choose_slopes() {
        XYPoly pp = principal_part(spec_.expr);
        Rational o = min_total_degree(spec_.expr);
        int oi = static_cast<int>(floor_big(o).convert_to<long long>());
        out_.axis_x_in_zero_set = pp.coefficient(o, 0) == 0;
        out_.axis_y_in_zero_set = pp.coefficient(Rational(0), oi) == 0;
        auto ok = [&](const Rational& m) { return pp.eval(Rational(1), m) != 0; };
        std::vector<Rational> candidates{Rational(1)};
        for (int j = 2; j <= 2 + pp.max_y_degree() + oi; ++j) {
            candidates.push_back(make_rational(1, j));
            candidates.push_back(Rational(j));
        }
        for (const auto& m : candidates)
            if (ok(m)) {
                out_.mplus = m;
                break;
            }
        for (const auto& m : candidates)
            if (ok(-m)) {
                out_.mminus = -m;
                break;
            }
        if (out_.mplus == 0 || out_.mminus == 0)
            throw DecompositionError("no admissible slicing slope");
    }

    void build_sectors() {
        const Rational mp = out_.mplus, mm = out_.mminus;
        auto add = [&](const std::string& name, const LinearMap2& embed, const Rational& cap) {
            SectorFrame fr;
            fr.name = name;
            fr.embed = embed;
            fr.poly = compose_linear(spec_.expr, embed);
            fr.cap = cap;
            out_.sectors.push_back(std::move(fr));
        };
        const Rational one(1), zero(0);
        // Shallow wedges around the x half-axes, split at the axis.
        add("+x upper", LinearMap2{one, zero, zero, one}, mp);
        add("+x lower", LinearMap2{one, zero, zero, -one}, -mm);
        add("-x upper", LinearMap2{-one, zero, zero, one}, -mm);
        add("-x lower", LinearMap2{-one, zero, zero, -one}, mp);
        // Steep wedges around the y half-axes, through the axis swap.
        add("+y right", LinearMap2{zero, one, one, zero}, one / mp);
        add("+y left", LinearMap2{zero, -one, one, zero}, -one / mm);
        add("-y right", LinearMap2{zero, one, -one, zero}, -one / mm);
        add("-y left", LinearMap2{zero, -one, -one, zero}, one / mp);
    }

    // Highest scale at which branch structure still distinguishes branches:
    // probe the squarefree-in-y part, descending only through multiple roots.
    Rational separation_depth() {
        Rational sep(0);
        for (const auto& fr : out_.sectors) {
            XYPoly sf = y_squarefree_part(fr.poly);
            if (sf.is_zero() || sf.max_y_degree() == 0) continue;
            probe_window(sf, Rational(0), 0, sep);
        }
        return sep;
    }

    void probe_window(const XYPoly& f, const Rational& floor_exp, int depth, Rational& sep) {
        if (depth > 32) throw DecompositionError("branch separation did not stabilize");
        if (f.is_zero() || f.max_y_degree() == 0) return;
        NewtonPolygon P = newton_polygon(f);
        for (const auto& e : P.edges) {
            if (e.exponent <= floor_exp) continue;
            if (e.exponent > sep) sep = e.exponent;
            UniPoly reduced = e.edge_poly;
            size_t low = 0;
            while (low < reduced.c.size() && reduced.c[low] == 0) ++low;
            reduced.c.erase(reduced.c.begin(), reduced.c.begin() + static_cast<long>(low));
            if (reduced.degree() <= 0) continue;
            Rational top = cauchy_upper_bound(reduced) + 1;
            RootScan scan = rational_roots_in(reduced, Rational(0), top);
            if (scan.real_unrecognized > 0)
                throw DecompositionError("irrational branch coefficient in separation probe");
            for (const auto& r : scan.roots) {
                if (r.multiplicity < 2) continue;
                PuiseuxPrefix step;
                step.append(e.exponent, r.value);
                probe_window(substitute_shift(f, 1, step, std::nullopt), e.exponent, depth + 1, sep);
                probe_window(substitute_shift(f, -1, step, std::nullopt), e.exponent, depth + 1, sep);
            }
        }
    }

    Rational claim_horizon() const {
        Rational nd = newton_distance(newton_polygon(spec_.expr));
        Rational b1 = 2 * nd + 4;
        Rational b2 = amax_ + Rational(bmax_) + 2;
        // A term's u-exponent grows by at most bmax * p over a prefix reaching
        // scale p (each unit of w-degree converts to at most p of u-degree),
        // so edge levels at scales up to the break scale stay under
        // amax + 2*bmax*break; keeping the horizon above that ensures no
        // window is cut off before its branch cluster has finished splitting.
        Rational b3 = 2 * break_scale_ * Rational(bmax_) + amax_ + 2;
        return std::max(std::max(b1, b2), b3);
    }

    // ---- Window analysis ---------------------------------------------------

    static UniPoly reduced_edge_poly(const PolygonEdge& e, int& low_degree) {
        UniPoly r = e.edge_poly;
        size_t low = 0;
        while (low < r.c.size() && r.c[low] == 0) ++low;
        low_degree = static_cast<int>(low);
        r.c.erase(r.c.begin(), r.c.begin() + static_cast<long>(low));
        return r;
    }

    // Vertex dominance thresholds for the edge slope variable t = w/u^p:
    // above zone_hi the upper vertex rules, below zone_lo the lower one,
    // with relative error eta/2 by the coefficient-sum bound.
    void dominance_zone(const UniPoly& reduced, Rational& zone_lo, Rational& zone_hi) const {
        const Rational delta = opt_.eta / 2;
        Rational top_sum(0), bot_sum(0);
        for (int i = 0; i < reduced.degree(); ++i)
            top_sum += abs_rational(reduced.c[static_cast<size_t>(i)] / reduced.lead());
        for (size_t i = 1; i < reduced.c.size(); ++i)
            bot_sum += abs_rational(reduced.c[i] / reduced.c[0]);
        zone_hi = std::max(Rational(1), Rational(top_sum / delta));
        zone_lo = Rational(1) / std::max(Rational(1), Rational(bot_sum / delta));
    }

    // A root window's arm to widen when a neighboring piece fails the
    // derivative budget: (edge exponent, root value, which side).
    struct WindowGuard {
        Rational exponent, root;
        int side = 0; // +1 widen the plus arm, -1 the minus arm
    };

    // A piece laid out but not yet committed, with the root windows adjacent
    // to its lower and upper boundaries (when any).
    struct StagedPiece {
        DomainPiece piece;
        std::optional<WindowGuard> lo_guard, hi_guard;
    };

    // A root window awaiting recursion, with per-side caps: the sub-window
    // reaches down to the window's own boundary on each side.
    struct PendingWindow {
        Rational exponent, root, cap_minus, cap_plus;
    };

    // (edge exponent, root) -> (minus arm, plus arm) of its window.
    using ArmMap = std::map<std::pair<Rational, Rational>, std::pair<Rational, Rational>>;

    void analyze_window(WindowCtx ctx) {
        if (ctx.depth > opt_.max_depth)
            throw DecompositionError("window recursion exceeded the depth bound");
        if (ctx.f.is_zero())
            throw DecompositionError("window polynomial collapsed to zero");
        if (ctx.f.term_count() > static_cast<size_t>(opt_.max_terms))
            throw DecompositionError("window polynomial grew past the term bound");

        NewtonPolygon P = newton_polygon(ctx.f);
        // Settling loop: stage the full piece layout, sample every claimed
        // piece's derivative-to-value ratios, and on a failure widen the root
        // window nearest the failing boundary and lay out again. Ratios near
        // a root grow like a power of one over the relative distance to it,
        // so doubling the arm settles within a few attempts.
        ArmMap arms;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= opt_.max_layout_attempts)
                throw DecompositionError(
                    "root windows failed to settle under the derivative budget");
            std::vector<StagedPiece> staged;
            std::vector<PendingWindow> pending;
            layout_window(ctx, P, arms, staged, pending);
            const StagedPiece* failing = nullptr;
            double rel = 0;
            for (const auto& s : staged) {
                if (s.piece.tail_absorbed) continue;
                double r = 0;
                if (!piece_bounds_ok(s.piece, r)) {
                    failing = &s;
                    rel = r;
                    break;
                }
            }
            if (!failing) {
                for (auto& s : staged) out_.pieces.push_back(std::move(s.piece));
                for (const auto& w : pending) recurse_window(ctx, w);
                return;
            }
            widen_arm(arms, *failing, rel);
        }
    }

    void layout_window(const WindowCtx& ctx, const NewtonPolygon& P, ArmMap& arms,
                       std::vector<StagedPiece>& staged, std::vector<PendingWindow>& pending) {
        Rational cur_coeff = ctx.cap_coeff, cur_exp = ctx.cap_exp;
        const PolygonVertex* next_vertex = nullptr; // rules the region below cur after processing

        // Entry vertex: minimizes a + q*b just below the cap scale.
        auto entry_vertex = [&]() -> const PolygonVertex* {
            const PolygonVertex* best = nullptr;
            Rational best_val;
            for (const auto& v : P.vertices) {
                Rational val = v.a + ctx.cap_exp * Rational(v.b);
                if (!best || val < best_val ||
                    (val == best_val && v.b < best->b)) {
                    best = &v;
                    best_val = val;
                }
            }
            return best;
        };
        next_vertex = entry_vertex();

        bool broke = false;
        std::optional<WindowGuard> bottom_guard;
        for (const auto& e : P.edges) {
            if (e.exponent < ctx.cap_exp) continue; // coarser than the window
            if (e.exponent > break_scale_ || e.level >= level_horizon_) {
                // Past the branch separation depth the region below an edge
                // holds at most one branch cluster, and then the bottom's
                // two-regime formula absorbs the remaining structure exactly;
                // stop claiming comparability on it rather than chase deeper
                // (deeper claims would also carry unbounded derivative
                // ratios from their growing edge levels).
                broke = true;
                break;
            }
            int low_degree = 0;
            UniPoly reduced = reduced_edge_poly(e, low_degree);
            if (reduced.degree() <= 0) {
                // Single-monomial edge cannot happen (edges join two vertices).
                throw DecompositionError("degenerate edge polynomial");
            }
            Rational zone_lo, zone_hi;
            dominance_zone(reduced, zone_lo, zone_hi);

            const bool cap_edge = (e.exponent == ctx.cap_exp);
            if (cap_edge && ctx.cap_coeff <= zone_lo) {
                // The whole zone sits above the window; the edge is invisible.
                continue;
            }

            Rational top = cauchy_upper_bound(reduced) + 1;
            RootScan scan = rational_roots_in(reduced, Rational(0),
                                              cap_edge ? std::min(top, ctx.cap_coeff) : top);
            if (scan.real_unrecognized > 0)
                throw DecompositionError(
                    "edge polynomial has an irrational positive root; branch coefficients "
                    "outside the rationals are not supported");

            std::vector<Rational> roots; // descending
            for (const auto& r : scan.roots) roots.push_back(r.value);

            // Root windows: arms seeded at a quarter of the free distance and
            // grown by the settling loop; overlapping windows merge, keeping
            // the highest member as the recursion center (the recursion
            // separates the other members at their own scales). The minus arm
            // keeps at least a sixteenth of the root below the window so the
            // window never swallows the w = 0 axis.
            struct Win {
                Rational lo, hi, center, lo_root, hi_root;
            };
            std::vector<Win> wins;
            for (size_t j = 0; j < roots.size(); ++j) {
                Rational seed = roots[j]; // distance to zero
                if (j > 0) seed = std::min(seed, Rational(roots[j - 1] - roots[j]));
                if (j + 1 < roots.size())
                    seed = std::min(seed, Rational(roots[j] - roots[j + 1]));
                if (cap_edge) seed = std::min(seed, Rational(ctx.cap_coeff - roots[j]));
                seed = seed / 4;
                auto key = std::make_pair(e.exponent, roots[j]);
                Rational am = seed, ap = seed;
                if (auto it = arms.find(key); it != arms.end()) {
                    am = std::max(am, it->second.first);
                    ap = std::max(ap, it->second.second);
                }
                am = std::min(am, Rational(roots[j] * 15 / 16));
                arms[key] = {am, ap}; // effective arms, read back by the widener
                Rational lo = roots[j] - am;
                Rational hi = roots[j] + ap;
                if (cap_edge) hi = std::min(hi, ctx.cap_coeff);
                if (!wins.empty() && hi >= wins.back().lo) {
                    Win& w = wins.back();
                    if (lo < w.lo) {
                        w.lo = lo;
                        w.lo_root = roots[j];
                    }
                    if (hi > w.hi) {
                        w.hi = hi;
                        w.hi_root = roots[j];
                    }
                } else {
                    wins.push_back({lo, hi, roots[j], roots[j], roots[j]});
                }
            }

            Rational zone_top = zone_hi, zone_bot = zone_lo;
            if (!wins.empty()) {
                zone_top = std::max(zone_top, wins.front().hi);
                zone_bot = std::min(zone_bot, wins.back().lo);
            }
            if (cap_edge) zone_top = std::min(zone_top, ctx.cap_coeff);

            // Washer between the current upper boundary and this edge's zone,
            // ruled by the edge's upper vertex (it rules all coarser scales,
            // and the above-zone slopes of a window-scale edge).
            if (!cap_edge || zone_top < ctx.cap_coeff) {
                std::optional<WindowGuard> lg;
                if (!wins.empty() && wins.front().hi == zone_top)
                    lg = WindowGuard{e.exponent, wins.front().hi_root, +1};
                stage_washer(ctx, cur_coeff, cur_exp, zone_top, e.exponent, e.upper, lg, staged);
            }

            // Bands between root windows, adaptively subdivided.
            Rational band_hi = zone_top;
            std::optional<WindowGuard> upper_guard;
            for (const auto& w : wins) {
                if (band_hi > w.hi)
                    stage_bands(ctx, e, reduced, low_degree, w.hi, band_hi,
                                WindowGuard{e.exponent, w.hi_root, +1}, upper_guard, staged);
                pending.push_back({e.exponent, w.center, Rational(w.center - w.lo),
                                   Rational(w.hi - w.center)});
                band_hi = w.lo;
                upper_guard = WindowGuard{e.exponent, w.lo_root, -1};
            }
            if (band_hi > zone_bot)
                stage_bands(ctx, e, reduced, low_degree, zone_bot, band_hi, std::nullopt,
                            upper_guard, staged);

            cur_coeff = zone_bot;
            cur_exp = e.exponent;
            next_vertex = &e.lower;
            bottom_guard.reset();
            if (!wins.empty() && wins.back().lo == zone_bot)
                bottom_guard = WindowGuard{e.exponent, wins.back().lo_root, -1};
        }

        // Bottom piece under everything processed.
        stage_bottom(ctx, cur_coeff, cur_exp, *next_vertex, ctx.lossy || broke, bottom_guard,
                     staged);
    }

    void recurse_window(const WindowCtx& ctx, const PendingWindow& w) {
        PuiseuxPrefix step;
        step.append(w.exponent, w.root);
        for (int side : {+1, -1}) {
            Rational cap = side > 0 ? w.cap_plus : w.cap_minus;
            if (cap <= 0) continue; // window flush against a boundary on this side
            XYPoly full = substitute_shift(ctx.f, side, step, std::nullopt);
            XYPoly cut = truncate_at(full, Cutoff(out_.cutoff));
            WindowCtx sub;
            sub.sector = ctx.sector;
            sub.f = cut;
            sub.lossy = ctx.lossy || (cut.term_count() != full.term_count());
            sub.prefix = ctx.prefix;
            sub.prefix.append_merge(w.exponent, Rational(ctx.sigma) * w.root);
            sub.sigma = side > 0 ? ctx.sigma : -ctx.sigma;
            sub.cap_coeff = cap;
            sub.cap_exp = w.exponent;
            sub.depth = ctx.depth + 1;
            sub.stage = ctx.stage;
            if (ctx.factors) {
                std::array<XYPoly, 3> fs;
                for (int i = 0; i < 3; ++i)
                    fs[static_cast<size_t>(i)] = truncate_at(
                        substitute_shift((*ctx.factors)[static_cast<size_t>(i)], side, step,
                                         std::nullopt),
                        Cutoff(out_.cutoff));
                sub.factors = fs;
            }
            analyze_window(std::move(sub));
        }
    }

    // ---- Derivative budget -------------------------------------------------

    // Sampled |u^a w^b * d^(a+b) g / (du^a dw^b)| / |g| over the piece region
    // for all orders a, b <= 2, one target per claimed ruling monomial.
    // Sampling sits well below the starting radius, where suppressed terms
    // have faded and the ratios are near their scale-free limits; the later
    // radius calibration guarantees the denominators stay gated on the
    // working radius. worst_rel reports where the worst sample sat between
    // the piece's lower (0) and upper (1) boundary, which tells the layout
    // which adjacent root window to widen.
    bool piece_bounds_ok(const DomainPiece& p, double& worst_rel) const {
        struct Target {
            const XYPoly* g;
            Rational coeff, a0;
            int b0;
        };
        std::vector<Target> targets;
        if (p.stage == 2 && p.factor_polys.size() == 3) {
            const FactorMonomial* ms[3] = {&p.factor_f, &p.factor_fw, &p.factor_fww};
            for (int i = 0; i < 3; ++i) {
                if (!ms[i]->defined) continue;
                targets.push_back({&p.factor_polys[static_cast<size_t>(i)], ms[i]->coeff,
                                   ms[i]->a, ms[i]->b});
            }
        } else {
            targets.push_back({&p.local, p.dom_coeff, p.alpha, p.yexp});
        }
        worst_rel = 0;
        double worst = 0;
        const double lr = std::log2(to_double(spec_.radius));
        const double hi_c = to_double(p.hi_coeff), hi_e = to_double(p.hi_exp);
        const double lo_c = to_double(p.lo_coeff), lo_e = to_double(p.lo_exp);
        for (const auto& tg : targets) {
            detail::RatioPoly base = detail::ratio_flatten(*tg.g, tg.coeff, tg.a0, tg.b0);
            std::vector<detail::RatioPoly> devs;
            for (int db = 0; db <= 2; ++db)
                for (int da = 0; da <= 2; ++da) {
                    if (da == 0 && db == 0) continue;
                    devs.push_back(detail::ratio_flatten(
                        detail::scaled_derivative(*tg.g, da, db), tg.coeff, tg.a0, tg.b0));
                }
            for (int iu = 1; iu <= 10; ++iu) {
                double lu = lr - 4.0 * iu;
                double lcap = std::log2(hi_c) + hi_e * lu;
                double lfloor =
                    p.lo_coeff == 0 ? lcap - 20.0 : std::log2(lo_c) + lo_e * lu;
                if (!(lfloor < lcap)) continue;
                for (int iw = 0; iw <= 12; ++iw) {
                    double rel = iw / 12.0;
                    double lw = lfloor + (lcap - lfloor) * rel;
                    double b = std::abs(base.sum(lu, lw));
                    // The derivative claim rides on the value claim: scales
                    // where the base ratio sits outside any calibrated gate
                    // are cut away by the radius calibration, so only samples
                    // near the gate constrain the layout.
                    if (!std::isfinite(b) || b < 1.0 / 3.0 || b > 3.0) continue;
                    for (const auto& d : devs) {
                        double r = std::abs(d.sum(lu, lw)) / b;
                        if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
                        if (r > worst) {
                            worst = r;
                            worst_rel = rel;
                        }
                    }
                }
            }
        }
        return worst <= opt_.derivative_budget;
    }

    void widen_arm(ArmMap& arms, const StagedPiece& s, double rel) const {
        const WindowGuard* g = nullptr;
        if (rel < 0.5)
            g = s.lo_guard ? &*s.lo_guard : (s.hi_guard ? &*s.hi_guard : nullptr);
        else
            g = s.hi_guard ? &*s.hi_guard : (s.lo_guard ? &*s.lo_guard : nullptr);
        if (!g)
            throw DecompositionError(
                "derivative budget failed on a piece with no adjacent root window");
        auto it = arms.find(std::make_pair(g->exponent, g->root));
        if (it == arms.end())
            throw DecompositionError("window arm bookkeeping lost a root");
        Rational& arm = g->side > 0 ? it->second.second : it->second.first;
        Rational next = arm * 2;
        if (g->side < 0) next = std::min(next, Rational(g->root * 15 / 16));
        if (next <= arm)
            throw DecompositionError("derivative budget failed against the axis guard");
        arm = next;
    }

    // ---- Piece emission ----------------------------------------------------

    DomainPiece base_piece(const WindowCtx& ctx, PieceKind kind) const {
        DomainPiece p;
        p.sector = ctx.sector;
        p.sector_name = out_.sectors[static_cast<size_t>(ctx.sector)].name;
        p.embed = out_.sectors[static_cast<size_t>(ctx.sector)].embed;
        p.prefix = ctx.prefix;
        p.sigma = ctx.sigma;
        p.kind = kind;
        p.stage = ctx.stage;
        p.local = ctx.f;
        return p;
    }

    // A washer or fixed-ratio slab ruled by a vertex monomial.
    void stage_washer(const WindowCtx& ctx, const Rational& hi_coeff, const Rational& hi_exp,
                      const Rational& lo_coeff, const Rational& lo_exp,
                      const PolygonVertex& vertex, const std::optional<WindowGuard>& lo_guard,
                      std::vector<StagedPiece>& staged) {
        DomainPiece p = base_piece(ctx, PieceKind::washer);
        p.hi_coeff = hi_coeff;
        p.hi_exp = hi_exp;
        p.lo_coeff = lo_coeff;
        p.lo_exp = lo_exp;
        p.dom_coeff = ctx.f.coefficient(vertex.a, vertex.b);
        p.alpha = vertex.a;
        p.yexp = vertex.b;
        finish_piece(ctx, p, staged, lo_guard, std::nullopt);
    }

    // Edge value of an arbitrary polynomial at slope weight (1, p): the
    // coefficient polynomial in t of the lowest u-power of g(u, t*u^p).
    static std::pair<UniPoly, Rational> edge_value_poly(const XYPoly& g, const Rational& p) {
        Rational level;
        bool have = false;
        for (const auto& [e, c] : g.t) {
            Rational val = e.first + p * Rational(e.second);
            if (!have || val < level) {
                level = val;
                have = true;
            }
        }
        UniPoly E;
        for (const auto& [e, c] : g.t) {
            if (e.first + p * Rational(e.second) != level) continue;
            if (E.c.size() <= static_cast<size_t>(e.second))
                E.c.resize(static_cast<size_t>(e.second) + 1, Rational(0));
            E.c[static_cast<size_t>(e.second)] += c;
        }
        E.trim();
        return {E, level};
    }

    void stage_bands(const WindowCtx& ctx, const PolygonEdge& e, const UniPoly& reduced,
                     int low_degree, const Rational& t_lo, const Rational& t_hi,
                     const std::optional<WindowGuard>& lo_guard,
                     const std::optional<WindowGuard>& hi_guard,
                     std::vector<StagedPiece>& staged) {
        if (t_lo >= t_hi) return;
        // Subdivide until the sampled variation of |E| fits the target window;
        // with derivative factors in play, each factor's edge value must
        // settle on the band as well.
        struct Span {
            Rational a, b;
            int splits;
        };
        std::vector<UniPoly> gate_polys{reduced};
        std::vector<int> gate_lows{low_degree};
        if (ctx.factors) {
            for (const auto& g : *ctx.factors) {
                auto [E, level] = edge_value_poly(g, e.exponent);
                (void)level;
                gate_polys.push_back(E); // E keeps any t^low factor; evaluated directly
                gate_lows.push_back(0);
            }
        }
        const double target = to_double((Rational(1) + opt_.eta) / (Rational(1) - opt_.eta));
        std::vector<Span> work{{t_lo, t_hi, 0}};
        while (!work.empty()) {
            Span s = work.back();
            work.pop_back();
            double lo = to_double(s.a), hi = to_double(s.b);
            double worst = 1.0;
            double vmin = 1.0;
            for (size_t gi = 0; gi < gate_polys.size(); ++gi) {
                double gmin = 0, gmax = 0;
                for (int i = 0; i <= 16; ++i) {
                    double t = lo * std::pow(hi / lo, i / 16.0);
                    double v = std::abs(gate_polys[gi].eval(t) *
                                        std::pow(t, gate_lows[gi]));
                    if (i == 0 || v < gmin) gmin = v;
                    if (i == 0 || v > gmax) gmax = v;
                }
                if (gmin <= 0) {
                    vmin = 0;
                    break;
                }
                worst = std::max(worst, gmax / gmin);
            }
            if (vmin <= 0 || worst > target) {
                if (s.splits >= opt_.max_band_splits)
                    throw DecompositionError("band subdivision failed to settle");
                Rational mid = detail::rational_mid_geom(s.a, s.b);
                work.push_back({s.a, mid, s.splits + 1});
                work.push_back({mid, s.b, s.splits + 1});
                continue;
            }
            DomainPiece p = base_piece(ctx, PieceKind::band);
            p.hi_coeff = s.b;
            p.hi_exp = e.exponent;
            p.lo_coeff = s.a;
            p.lo_exp = e.exponent;
            Rational tstar = simplest_in_interval(s.a, s.b);
            if (tstar <= s.a || tstar >= s.b) tstar = (s.a + s.b) / 2;
            p.dom_coeff = e.edge_poly.eval(tstar);
            p.alpha = e.level;
            p.yexp = 0;
            // Record the reference slope through the prefix notation: the ruling
            // monomial is E(t*) * u^level with t* implicit in dom_coeff.
            // Split sub-bands share the parent interval's guards: a failing
            // sub-band still widens the window nearest the parent interval.
            finish_piece(ctx, p, staged, lo_guard, hi_guard, tstar, &e);
        }
    }

    void stage_bottom(const WindowCtx& ctx, const Rational& hi_coeff, const Rational& hi_exp,
                      const PolygonVertex& vertex, bool absorbed,
                      const std::optional<WindowGuard>& hi_guard,
                      std::vector<StagedPiece>& staged) {
        DomainPiece p = base_piece(ctx, PieceKind::bottom);
        p.hi_coeff = hi_coeff;
        p.hi_exp = hi_exp;
        p.lo_coeff = Rational(0);
        p.lo_exp = Rational(0);
        p.dom_coeff = ctx.f.coefficient(vertex.a, vertex.b);
        p.alpha = vertex.a;
        p.yexp = vertex.b;
        p.tail_absorbed = absorbed;
        finish_piece(ctx, p, staged, std::nullopt, hi_guard);
    }

    void finish_piece(const WindowCtx& ctx, DomainPiece& p, std::vector<StagedPiece>& staged,
                      const std::optional<WindowGuard>& lo_guard,
                      const std::optional<WindowGuard>& hi_guard,
                      std::optional<Rational> band_ref = std::nullopt,
                      const PolygonEdge* band_edge = nullptr) {
        if (p.dom_coeff == 0)
            throw DecompositionError("piece without a ruling coefficient");
        PieceShape shape;
        shape.alpha = p.alpha;
        shape.yexp = p.yexp;
        shape.hi_exp = p.hi_exp;
        shape.has_lower = p.lo_coeff != 0;
        shape.lo_exp = p.lo_exp;
        p.growth = piece_growth(shape, spec_.beta);
        if (ctx.stage == 2 && ctx.factors) attach_factor_data(ctx, p, band_ref, band_edge);
        staged.push_back({std::move(p), lo_guard, hi_guard});
    }

    // ---- Stage 2 -----------------------------------------------------------

    static bool prefix_is_curved(const PuiseuxPrefix& k) {
        for (const auto& [e, c] : k.terms)
            if (e != 1) return true;
        return false;
    }

    // Consecutive pieces usually come from the same window, so the derivative
    // factors, their per-scale active faces, and the base factor's polygon are
    // cached across candidates.
    struct FactorCache {
        bool valid = false;
        XYPoly local, F, Fw, Fww;
        bool faces_valid = false;
        Rational scale;
        struct Face {
            UniPoly E; // edge value polynomial in t
            Rational level;
            std::vector<std::pair<ExpPair, Rational>> terms;
        };
        std::array<Face, 3> face;
        bool poly_valid = false;
        NewtonPolygon poly_f;
    };

    void refine_simultaneous() {
        std::vector<DomainPiece> stage1 = std::move(out_.pieces);
        out_.pieces.clear();
        FactorCache cache;
        for (auto& p : stage1) {
            bool candidate = p.yexp == 0 && !p.tail_absorbed && prefix_is_curved(p.prefix) &&
                             p.local.max_y_degree() >= 2;
            if (!candidate) {
                out_.pieces.push_back(std::move(p));
                continue;
            }
            size_t before = out_.pieces.size();
            try {
                refine_piece(p, cache);
            } catch (const DecompositionError&) {
                // Refinement must never lose the covering: fall back to the
                // unrefined piece if the product analysis cannot settle.
                out_.pieces.resize(before);
                out_.pieces.push_back(std::move(p));
                continue;
            }
        }
    }

    void refine_piece(const DomainPiece& p, FactorCache& cache) {
        if (!cache.valid || !(cache.local.t == p.local.t)) {
            cache.local = p.local;
            cache.F = p.local;
            cache.Fw = xy_dy(cache.F);
            cache.Fww = xy_dy(cache.Fw);
            cache.valid = true;
            cache.faces_valid = false;
            cache.poly_valid = false;
        }
        const XYPoly& F = cache.F;
        const XYPoly& Fw = cache.Fw;
        const XYPoly& Fww = cache.Fww;
        if (Fww.is_zero()) throw DecompositionError("flat second derivative");
        if (p.kind == PieceKind::band && try_refine_band_in_place(p, cache)) return;
        XYPoly product = xy_mul(xy_mul(F, Fw), Fww);

        WindowCtx ctx;
        ctx.sector = p.sector;
        ctx.prefix = p.prefix;
        ctx.sigma = p.sigma;
        ctx.depth = 0;
        ctx.stage = 2;
        if (p.kind == PieceKind::bottom) {
            ctx.f = product;
            ctx.factors = std::array<XYPoly, 3>{F, Fw, Fww};
            ctx.cap_coeff = p.hi_coeff;
            ctx.cap_exp = p.hi_exp;
        } else {
            // Shift the band floor to zero: w = lo_coeff*u^p + w'.
            PuiseuxPrefix step;
            step.append(p.hi_exp, p.lo_coeff);
            ctx.f = substitute_at_floor(product, step, ctx.lossy);
            ctx.factors = std::array<XYPoly, 3>{substitute_at_floor(F, step, ctx.lossy),
                                                substitute_at_floor(Fw, step, ctx.lossy),
                                                substitute_at_floor(Fww, step, ctx.lossy)};
            ctx.prefix.append_merge(p.hi_exp, Rational(p.sigma) * p.lo_coeff);
            ctx.cap_coeff = p.hi_coeff - p.lo_coeff;
            ctx.cap_exp = p.hi_exp;
        }
        analyze_window(std::move(ctx));
    }

    // A band clear of every derivative factor's roots refines in place: each
    // factor's edge value at the band scale settles across the band, so the
    // band is simultaneously comparable without any sub-decomposition. Only
    // bands straddling a critical-curve branch need the product analysis.
    bool try_refine_band_in_place(const DomainPiece& p, FactorCache& cache) {
        if (!cache.faces_valid || cache.scale != p.hi_exp) {
            const XYPoly* gs[3] = {&cache.F, &cache.Fw, &cache.Fww};
            for (int i = 0; i < 3; ++i) {
                FactorCache::Face& fc = cache.face[static_cast<size_t>(i)];
                fc.terms.clear();
                bool have = false;
                for (const auto& [e, c] : gs[i]->t) {
                    Rational val = e.first + p.hi_exp * Rational(e.second);
                    if (!have || val < fc.level) {
                        fc.level = val;
                        have = true;
                    }
                }
                UniPoly E;
                for (const auto& [e, c] : gs[i]->t) {
                    if (e.first + p.hi_exp * Rational(e.second) != fc.level) continue;
                    fc.terms.push_back({e, c});
                    if (E.c.size() <= static_cast<size_t>(e.second))
                        E.c.resize(static_cast<size_t>(e.second) + 1, Rational(0));
                    E.c[static_cast<size_t>(e.second)] += c;
                }
                E.trim();
                fc.E = std::move(E);
            }
            cache.scale = p.hi_exp;
            cache.faces_valid = true;
        }
        const double target = to_double((Rational(1) + opt_.eta) / (Rational(1) - opt_.eta));
        const double lo = to_double(p.lo_coeff), hi = to_double(p.hi_coeff);
        for (const FactorCache::Face& fc : cache.face) {
            double gmin = 0, gmax = 0;
            for (int i = 0; i <= 16; ++i) {
                double t = lo * std::pow(hi / lo, i / 16.0);
                double v = std::abs(fc.E.eval(t));
                if (i == 0 || v < gmin) gmin = v;
                if (i == 0 || v > gmax) gmax = v;
            }
            if (!(gmin > 0) || gmax / gmin > target) return false;
        }
        Rational tstar = simplest_in_interval(p.lo_coeff, p.hi_coeff);
        if (tstar <= p.lo_coeff || tstar >= p.hi_coeff) tstar = (p.lo_coeff + p.hi_coeff) / 2;
        FactorMonomial ms[3];
        for (int i = 0; i < 3; ++i) {
            const FactorCache::Face& fc = cache.face[static_cast<size_t>(i)];
            FactorMonomial& m = ms[i];
            if (fc.terms.size() == 1) {
                m.defined = true;
                m.coeff = fc.terms.front().second;
                m.a = fc.terms.front().first.first;
                m.b = fc.terms.front().first.second;
            } else {
                Rational val(0);
                for (const auto& [e, c] : fc.terms) val += c * pow_rational(tstar, e.second);
                if (val == 0) return false; // zero slipped between samples; use the full path
                m.defined = true;
                m.coeff = val;
                m.a = fc.level;
                m.b = 0;
            }
        }
        DomainPiece refined = p;
        refined.stage = 2;
        refined.factor_f = ms[0];
        refined.factor_fw = ms[1];
        refined.factor_fww = ms[2];
        refined.factor_polys.assign({cache.F, cache.Fw, cache.Fww});
        refined.dom_coeff = refined.factor_f.coeff;
        refined.alpha = refined.factor_f.a;
        refined.yexp = refined.factor_f.b;
        PieceShape shape;
        shape.alpha = refined.alpha;
        shape.yexp = refined.yexp;
        shape.hi_exp = refined.hi_exp;
        shape.has_lower = refined.lo_coeff != 0;
        shape.lo_exp = refined.lo_exp;
        refined.growth = piece_growth(shape, spec_.beta);
        double rel = 0;
        if (!piece_bounds_ok(refined, rel)) {
            // A factor's derivatives misbehave on the band as-is; the product
            // path re-windows it and runs the budget check on its own pieces.
            return false;
        }
        if (!cache.poly_valid) {
            cache.poly_f = newton_polygon(cache.F);
            cache.poly_valid = true;
        }
        attach_damping(refined, cache.poly_f);
        out_.pieces.push_back(std::move(refined));
        return true;
    }

    XYPoly substitute_at_floor(const XYPoly& f, const PuiseuxPrefix& step, bool& lossy) const {
        XYPoly full = substitute_shift(f, 1, step, std::nullopt);
        XYPoly cut = truncate_at(full, Cutoff(out_.cutoff));
        lossy = lossy || cut.term_count() != full.term_count();
        return cut;
    }

    // Ruling monomial of one factor on a refined piece: minimize a + q*b over
    // the factor's support at an interior scale q; at a band scale the active
    // face may be an edge, evaluated at the band's reference slope.
    FactorMonomial active_monomial(const XYPoly& g, const Rational& q,
                                   std::optional<Rational> tstar) const {
        FactorMonomial out;
        if (g.is_zero()) return out;
        Rational best;
        bool have = false;
        for (const auto& [e, c] : g.t) {
            Rational val = e.first + q * Rational(e.second);
            if (!have || val < best) {
                best = val;
                have = true;
            }
        }
        std::vector<std::pair<ExpPair, Rational>> active;
        for (const auto& [e, c] : g.t)
            if (e.first + q * Rational(e.second) == best) active.push_back({e, c});
        if (active.size() == 1) {
            out.defined = true;
            out.coeff = active.front().second;
            out.a = active.front().first.first;
            out.b = active.front().first.second;
            return out;
        }
        if (!tstar) return out; // ambiguous face off a band scale: leave undefined
        // Edge active at a band scale: collapse to E(t*) * u^level.
        Rational val(0);
        for (const auto& [e, c] : active) val += c * pow_rational(*tstar, e.second);
        if (val == 0) return out;
        out.defined = true;
        out.coeff = val;
        out.a = best;
        out.b = 0;
        return out;
    }

    void attach_factor_data(const WindowCtx& ctx, DomainPiece& p, std::optional<Rational> band_ref,
                            const PolygonEdge* band_edge) {
        (void)band_edge;
        Rational q;
        if (p.kind == PieceKind::bottom)
            q = p.hi_exp + 1;
        else if (p.lo_exp == p.hi_exp)
            q = p.hi_exp;
        else
            q = (p.hi_exp + p.lo_exp) / 2;
        const auto& fs = *ctx.factors;
        p.factor_f = active_monomial(fs[0], q, band_ref);
        p.factor_fw = active_monomial(fs[1], q, band_ref);
        p.factor_fww = active_monomial(fs[2], q, band_ref);
        if (!p.factor_f.defined || !p.factor_fw.defined || !p.factor_fww.defined)
            throw DecompositionError("derivative factor has no ruling monomial here");
        p.factor_polys.assign(fs.begin(), fs.end());

        // Ruling data for the growth formulas comes from the base factor, not
        // from the product the window recursion ran on.
        p.dom_coeff = p.factor_f.coeff;
        p.alpha = p.factor_f.a;
        p.yexp = p.factor_f.b;
        PieceShape shape;
        shape.alpha = p.alpha;
        shape.yexp = p.yexp;
        shape.hi_exp = p.hi_exp;
        shape.has_lower = p.lo_coeff != 0;
        shape.lo_exp = p.lo_exp;
        p.growth = piece_growth(shape, spec_.beta);

        attach_damping(p, newton_polygon(fs[0]));
    }

    // Damping record: deepest compact edge of the factor's polygon. The
    // identity flag records whether the ruling monomial sits on that
    // edge's line, tying the b-axis intercept to the ruling exponent.
    static void attach_damping(DomainPiece& p, const NewtonPolygon& P) {
        if (!P.edges.empty()) {
            const PolygonEdge& deep = P.edges.back();
            p.damping.defined = true;
            p.damping.vertex_a = deep.upper.a;
            p.damping.vertex_b = deep.upper.b;
            p.damping.intercept = deep.level / deep.exponent;
            p.damping.weight_u = p.alpha / 2;
            p.damping.weight_w = p.damping.intercept / 2;
            p.damping.intercept_identity =
                p.alpha + deep.exponent * Rational(p.yexp) == deep.level;
        }
    }

    // ---- Calibration -------------------------------------------------------

    void calibrate_radius() {
        Rational r = spec_.radius;
        const double lo_gate = 2.0 / 3.0, hi_gate = 1.5;
        auto passes = [&](size_t i, const Rational& rad) {
            const DomainPiece& p = out_.pieces[i];
            if (p.tail_absorbed) return true;
            double rmin = 0, rmax = 0;
            sample_piece_ratio(p, rad, opt_.calibration_grid, opt_.calibration_grid,
                               0x5EEDull + i, rmin, rmax);
            return rmin >= lo_gate && rmax <= hi_gate;
        };
        // Only pieces that failed the previous round are re-checked while the
        // radius shrinks; a full confirmation pass at the candidate radius
        // keeps the final claim about every piece.
        std::vector<size_t> active(out_.pieces.size());
        std::iota(active.begin(), active.end(), size_t{0});
        for (int halvings = 0; halvings <= opt_.max_radius_halvings; ++halvings) {
            std::vector<size_t> failures;
            for (size_t i : active)
                if (!passes(i, r)) failures.push_back(i);
            if (failures.empty()) {
                for (size_t i = 0; i < out_.pieces.size(); ++i)
                    if (!passes(i, r)) failures.push_back(i);
                if (failures.empty()) {
                    out_.radius = r;
                    out_.radius_halvings = halvings;
                    return;
                }
            }
            active = std::move(failures);
            r = r / 2;
        }
        throw DecompositionError("comparability calibration failed within the radius budget");
    }

  public:
    // Sampled |polynomial / ruling monomial| over a log grid of the piece
    // region; refined pieces check every derivative factor against its own
    // monomial. Shared by calibration and the external comparability check.
    void sample_piece_ratio(const DomainPiece& p, const Rational& radius, int nu, int nw,
                            uint64_t seed, double& rmin, double& rmax) const {
        // Each polynomial is flattened once against its ruling monomial: a term
        // becomes sign * 2^(logc + da*log2(u) + db*log2(w)), so the ruling term
        // contributes exactly +-1 and suppressed tails underflow cleanly to 0
        // instead of poisoning the ratio with inf/NaN at tiny scales.
        struct FlatTerm {
            double logc, da, db, sign;
        };
        struct FlatPoly {
            std::vector<FlatTerm> terms;
        };
        auto flatten = [](const XYPoly& g, const Rational& coeff, const Rational& alpha,
                          int yexp) {
            FlatPoly fp;
            fp.terms.reserve(g.t.size());
            const double logc0 = std::log2(std::abs(to_double(coeff)));
            const double a0 = to_double(alpha);
            const double s0 = to_double(coeff) < 0 ? -1.0 : 1.0;
            for (const auto& [e, c] : g.t) {
                double cv = to_double(c);
                fp.terms.push_back({std::log2(std::abs(cv)) - logc0,
                                    to_double(e.first) - a0,
                                    static_cast<double>(e.second - yexp),
                                    (cv < 0 ? -1.0 : 1.0) * s0});
            }
            return fp;
        };
        std::vector<FlatPoly> pairs;
        if (p.stage == 2 && p.factor_polys.size() == 3) {
            const FactorMonomial* ms[3] = {&p.factor_f, &p.factor_fw, &p.factor_fww};
            for (int i = 0; i < 3; ++i)
                pairs.push_back(flatten(p.factor_polys[static_cast<size_t>(i)],
                                        ms[i]->coeff, ms[i]->a, ms[i]->b));
        } else {
            pairs.push_back(flatten(p.local, p.dom_coeff, p.alpha, p.yexp));
        }
        detail::SampleRng rng(seed);
        const double r = to_double(radius);
        const double hi_c = to_double(p.hi_coeff), hi_e = to_double(p.hi_exp);
        const double lo_c = to_double(p.lo_coeff), lo_e = to_double(p.lo_exp);
        bool first = true;
        auto probe = [&](double lu, double lw) {
            for (const FlatPoly& fp : pairs) {
                double acc = 0;
                for (const FlatTerm& t : fp.terms)
                    acc += t.sign * std::exp2(t.logc + t.da * lu + t.db * lw);
                double ratio = std::abs(acc);
                if (!std::isfinite(ratio)) ratio = std::numeric_limits<double>::infinity();
                if (first || ratio < rmin) rmin = ratio;
                if (first || ratio > rmax) rmax = ratio;
                first = false;
            }
        };
        // Two passes: a deterministic grid that pins the region's corners
        // (ratios of suppressed corrections peak right at the radius and the
        // cap, which random placement rarely hits), concentrated near the
        // radius, then a random fill of the interior.
        for (int iu = 0; iu < nu; ++iu) {
            double f = nu > 1 ? static_cast<double>(iu) / (nu - 1) : 0.0;
            double lu = std::log2(r) - 20.0 * f * f;
            double lcap = std::log2(hi_c) + hi_e * lu;
            double lfloor = p.lo_coeff == 0 ? lcap - 20.0 : std::log2(lo_c) + lo_e * lu;
            if (!(lfloor < lcap)) continue;
            for (int iw = 0; iw < nw; ++iw) {
                double g = nw > 1 ? static_cast<double>(iw) / (nw - 1) : 1.0;
                probe(lu, lfloor + (lcap - lfloor) * g);
            }
        }
        for (int iu = 0; iu < nu; ++iu) {
            double lu = std::log2(r) - 20.0 * rng.next();
            double lcap = std::log2(hi_c) + hi_e * lu;
            double lfloor = p.lo_coeff == 0 ? lcap - 20.0 : std::log2(lo_c) + lo_e * lu;
            if (!(lfloor < lcap)) continue;
            for (int iw = 0; iw < nw; ++iw)
                probe(lu, lfloor + (lcap - lfloor) * rng.next());
        }
        if (first) {
            rmin = 1.0;
            rmax = 1.0;
        }
    }
};

inline Decomposition decompose(const SurfaceSpec& spec, ResolveOptions options = {}) {
    return Resolver(spec, options).run();
}

} // namespace oscindex
