// Report assembly: fixed field order, exact fractions next to floats,
// reproducible mode determinism, and agreement with the shipped schema's
// top-level contract (required keys, no undeclared keys).

#include "oscindex/report.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace oscindex;

namespace {
SurfaceSpec surface(const std::string& expr, const Rational& beta = Rational(0)) {
    SurfaceSpec s;
    s.expr_text = expr;
    s.label = expr;
    s.expr = parse_expression(expr);
    s.beta = beta;
    return s;
}

Json analyze(const std::string& expr, bool reproducible = true) {
    Decomposition dec = decompose(surface(expr));
    VerdictSet verdicts = derive_verdicts(dec.spec, dec.index);
    ReportOptions opt;
    opt.reproducible = reproducible;
    return analysis_report(dec, verdicts, opt);
}

Json load_schema() {
    std::filesystem::path here(__FILE__);
    std::ifstream in(here.parent_path().parent_path() / "docs" / "report.schema.json");
    REQUIRE(in.good());
    return Json::parse(in);
}
} // namespace

TEST_CASE("analysis report carries the headline values exactly") {
    Json r = analyze("x^2*y + y^4");
    CHECK(r["index"]["g"]["fraction"] == "5/8");
    CHECK(r["index"]["g"]["value"] == 0.625);
    CHECK(r["index"]["d"] == 0);
    CHECK(r["hessian"]["verdict"] == "nondegenerate");
    CHECK(r["maximal"]["has_threshold"] == true);
    CHECK(r["maximal"]["p_threshold"]["fraction"] == "2");
    CHECK(r["radon"]["shape"] == "triangle");
    CHECK(r["polygon"]["newton_distance"]["fraction"] == "8/5");
    CHECK(r["surface"]["expression"] == "x^2*y + y^4");
    CHECK(r["decomposition"]["piece_count"].get<size_t>() == r["decomposition"]["pieces"].size());
    CHECK(r["index"]["per_piece"].size() == r["decomposition"]["pieces"].size());
}

TEST_CASE("degenerate surfaces report no threshold and a normal form") {
    Json r = analyze("(x + y)^3");
    CHECK(r["hessian"]["verdict"] == "degenerate");
    CHECK(r["hessian"]["power"] == 3);
    CHECK(r["maximal"]["has_threshold"] == false);
    CHECK(r["maximal"].contains("note"));
    CHECK_FALSE(r["maximal"].contains("p_threshold"));
}

TEST_CASE("stage-two pieces ship their factor and damping records") {
    Json r = analyze("x^2*y + y^4");
    bool saw_factors = false, saw_damping = false;
    for (const Json& p : r["decomposition"]["pieces"]) {
        if (p["stage"] == 2 && p.contains("factors")) saw_factors = true;
        if (p.contains("damping")) saw_damping = true;
    }
    CHECK(saw_factors);
    CHECK(saw_damping);
}

TEST_CASE("reproducible reports are byte-identical and timestamp-free") {
    Json a = analyze("y^2 - x^3", true);
    Json b = analyze("y^2 - x^3", true);
    CHECK_FALSE(a.contains("timestamp"));
    CHECK(a.dump() == b.dump());

    Json stamped = analyze("y^2 - x^3", false);
    CHECK(stamped.contains("timestamp"));
}

TEST_CASE("report keys match the published schema contract") {
    Json schema = load_schema();
    Json r = analyze("x^2 + y^2");
    for (const Json& key : schema["required"])
        CHECK(r.contains(key.get<std::string>()));
    // additionalProperties is false: nothing may appear beyond the schema.
    const Json& props = schema["properties"];
    for (const auto& [key, value] : r.items()) {
        CAPTURE(key);
        CHECK(props.contains(key));
    }
    // Spot-check one nested contract: every piece carries the required keys.
    const Json& piece_req = schema["definitions"]["piece"]["required"];
    Json full = analyze("x^2*y + y^4");
    for (const Json& p : full["decomposition"]["pieces"])
        for (const Json& key : piece_req)
            CHECK(p.contains(key.get<std::string>()));
}

TEST_CASE("fit serialization and sweep CSV round the same data") {
    std::vector<MeasurePoint> pts;
    for (double eps : default_epsilons()) pts.push_back({eps, 3.0 * std::pow(eps, 0.75)});
    GrowthFit fit = fit_growth(pts);
    Json j = report_fit(fit, pts, "epsilon");
    CHECK(j["used"] == 12);
    CHECK(j["points"].size() == 12);
    CHECK(std::isfinite(j["g_stderr"].get<double>()));
    CHECK(std::abs(j["g"].get<double>() - 0.75) < 1e-9);

    std::string csv = sweep_csv(pts, "epsilon", 2e-3);
    CHECK(csv.rfind("epsilon,estimate,stderr\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}
