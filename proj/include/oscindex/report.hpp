#pragma once

// Report assembly: the analysis artifacts flattened into one JSON document
// with a fixed field order, so identical inputs serialize byte-identically.
// Exact rationals travel as fraction strings; headline quantities carry the
// float alongside. The timestamp is the only run-dependent field and is
// omitted entirely in reproducible mode.

#include "oscindex/oracle.hpp"
#include "oscindex/verdict.hpp"
#include "oscindex/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

namespace oscindex {

using Json = nlohmann::ordered_json;

namespace detail {

// Headline value: exact fraction plus its double image.
inline Json exact(const Rational& q) {
    return Json{{"fraction", to_string(q)}, {"value", to_double(q)}};
}

inline Json map_json(const LinearMap2& m) {
    return Json::array({to_string(m.m00), to_string(m.m01), to_string(m.m10), to_string(m.m11)});
}

inline Json monomial_json(const Rational& coeff, const Rational& a, int b) {
    return Json{{"coeff", to_string(coeff)}, {"u_exp", to_string(a)}, {"w_exp", b}};
}

} // namespace detail

// ---- Symbolic blocks -------------------------------------------------------

inline Json report_surface(const SurfaceSpec& spec) {
    return Json{{"label", spec.label},
                {"expression", spec.expr_text},
                {"beta", detail::exact(spec.beta)},
                {"radius", detail::exact(spec.radius)},
                {"z0", detail::exact(spec.z0)}};
}

inline Json report_polygon(const NewtonPolygon& P) {
    Json vertices = Json::array();
    for (const PolygonVertex& v : P.vertices)
        vertices.push_back(Json{{"a", to_string(v.a)}, {"b", v.b}});
    Json edges = Json::array();
    for (const PolygonEdge& e : P.edges) {
        Json coeffs = Json::array();
        for (const Rational& c : e.edge_poly.c) coeffs.push_back(to_string(c));
        edges.push_back(Json{{"upper", Json{{"a", to_string(e.upper.a)}, {"b", e.upper.b}}},
                             {"lower", Json{{"a", to_string(e.lower.a)}, {"b", e.lower.b}}},
                             {"exponent", to_string(e.exponent)},
                             {"level", to_string(e.level)},
                             {"principal_coeffs", coeffs}});
    }
    return Json{{"vertices", vertices},
                {"edges", edges},
                {"newton_distance", detail::exact(newton_distance(P))}};
}

inline Json report_piece(const DomainPiece& p) {
    Json prefix = Json::array();
    for (const auto& [e, c] : p.prefix.terms)
        prefix.push_back(Json{{"exponent", to_string(e)}, {"coefficient", to_string(c)}});
    Json j{{"sector", p.sector},
           {"sector_name", p.sector_name},
           {"kind", to_string(p.kind)},
           {"stage", p.stage},
           {"tail_absorbed", p.tail_absorbed},
           {"embed", detail::map_json(p.embed)},
           {"prefix", prefix},
           {"sigma", p.sigma},
           {"hi_coeff", to_string(p.hi_coeff)},
           {"hi_exp", to_string(p.hi_exp)},
           {"lo_coeff", to_string(p.lo_coeff)},
           {"lo_exp", to_string(p.lo_exp)},
           {"ruling", detail::monomial_json(p.dom_coeff, p.alpha, p.yexp)},
           {"g", detail::exact(p.growth.g)},
           {"log_power", p.growth.log_power},
           {"local", to_string(p.local)}};
    if (p.stage == 2) {
        j["factors"] = Json{{"f", detail::monomial_json(p.factor_f.coeff, p.factor_f.a, p.factor_f.b)},
                            {"f_w", detail::monomial_json(p.factor_fw.coeff, p.factor_fw.a, p.factor_fw.b)},
                            {"f_ww", detail::monomial_json(p.factor_fww.coeff, p.factor_fww.a, p.factor_fww.b)}};
    }
    if (p.damping.defined) {
        j["damping"] = Json{{"vertex", Json{{"a", to_string(p.damping.vertex_a)}, {"b", p.damping.vertex_b}}},
                            {"intercept", to_string(p.damping.intercept)},
                            {"weight_u", to_string(p.damping.weight_u)},
                            {"weight_w", to_string(p.damping.weight_w)},
                            {"intercept_identity", p.damping.intercept_identity}};
    }
    return j;
}

inline Json report_decomposition(const Decomposition& dec) {
    Json pieces = Json::array();
    for (const DomainPiece& p : dec.pieces) pieces.push_back(report_piece(p));
    return Json{{"sectors", dec.sectors.size()},
                {"slope_plus", to_string(dec.mplus)},
                {"slope_minus", to_string(dec.mminus)},
                {"radius", detail::exact(dec.radius)},
                {"radius_halvings", dec.radius_halvings},
                {"budget", to_string(dec.budget)},
                {"cutoff", to_string(dec.cutoff)},
                {"separation", to_string(dec.separation)},
                {"any_tail", dec.any_tail},
                {"piece_count", dec.pieces.size()},
                {"pieces", pieces}};
}

inline Json report_hessian(const HessianInfo& h) {
    Json j{{"verdict", h.degenerate ? "degenerate" : "nondegenerate"},
           {"determinant", to_string(h.det)}};
    if (h.degenerate) {
        j["power"] = h.power;
        j["scale"] = to_string(h.scale);
        j["direction"] = Json{{"x", to_string(h.coeff_x)}, {"y", to_string(h.coeff_y)}};
        j["normal_map"] = detail::map_json(h.normal_map);
        j["normal_form"] = to_string(h.normal_form);
        j["swapped"] = h.swapped;
        j["axis_vertex"] = h.axis_vertex;
    }
    return j;
}

inline Json report_index(const Decomposition& dec) {
    Json table = Json::array();
    for (size_t i = 0; i < dec.pieces.size(); ++i) {
        const DomainPiece& p = dec.pieces[i];
        table.push_back(Json{{"piece", i},
                             {"sector", p.sector_name},
                             {"kind", to_string(p.kind)},
                             {"g", to_string(p.growth.g)},
                             {"log_power", p.growth.log_power}});
    }
    return Json{{"g", detail::exact(dec.index.g)},
                {"d", dec.index.log_power},
                {"per_piece", table}};
}

inline Json report_maximal(const MaximalVerdict& v) {
    Json j{{"has_threshold", v.has_threshold}};
    if (v.has_threshold) {
        j["p_threshold"] = detail::exact(v.threshold);
        j["sharp"] = v.sharp;
    } else {
        j["note"] = "vanishing Hessian determinant: no L^p threshold claimed";
    }
    return j;
}

inline Json report_radon(const SobolevRegion& r) {
    Json vertices = Json::array();
    for (const RegionVertex& v : r.vertices)
        vertices.push_back(Json::array({to_string(v.x), to_string(v.y)}));
    return Json{{"shape", r.triangle ? "triangle" : "trapezoid"}, {"vertices", vertices}};
}

// ---- Oracle blocks ---------------------------------------------------------

inline Json report_fit(const GrowthFit& fit, const std::vector<MeasurePoint>& pts,
                       const char* abscissa) {
    Json points = Json::array();
    for (const MeasurePoint& p : pts)
        points.push_back(Json{{abscissa, p.epsilon}, {"estimate", p.measure}});
    return Json{{"g", fit.g},
                {"intercept", fit.intercept},
                {"log_model", fit.log_model},
                {"g_stderr", fit.g_stderr},
                {"rss_plain", fit.rss_plain},
                {"rss_log", fit.rss_log},
                {"used", fit.used},
                {"points", points}};
}

// CSV for external plotters. The stderr column is the per-point accuracy
// target of the deterministic estimator (relative tolerance times value).
inline std::string sweep_csv(const std::vector<MeasurePoint>& pts, const char* abscissa,
                             double rel_tol) {
    std::string out = std::string(abscissa) + ",estimate,stderr\n";
    char line[128];
    for (const MeasurePoint& p : pts) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.epsilon, p.measure,
                      rel_tol * std::abs(p.measure));
        out += line;
    }
    return out;
}

// ---- Document assembly -----------------------------------------------------

inline std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ReportOptions {
    bool reproducible = false; // drop the timestamp
    uint64_t seed = 0;         // echoed for oracle runs
};

// Full analysis document: symbolic blocks always present, oracle blocks
// attached by the caller when verification ran.
inline Json analysis_report(const Decomposition& dec, const VerdictSet& verdicts,
                            const ReportOptions& opt = {}) {
    Json j{{"tool", Json{{"name", kToolName}, {"version", kToolVersion}}},
           {"surface", report_surface(dec.spec)},
           {"polygon", report_polygon(newton_polygon(dec.spec.expr))},
           {"hessian", report_hessian(verdicts.hessian)},
           {"decomposition", report_decomposition(dec)},
           {"index", report_index(dec)},
           {"maximal", report_maximal(verdicts.maximal)},
           {"radon", report_radon(verdicts.radon)},
           {"seed", opt.seed}};
    if (!opt.reproducible) j["timestamp"] = utc_timestamp();
    return j;
}

} // namespace oscindex
