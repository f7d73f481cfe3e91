// Command-line front end: symbolic analysis, numeric cross-verification,
// corpus batch runs, and the polygon / decomposition inspection commands.
//
// Exit codes are part of the interface and stay fixed:
//   0  success (verify: all agreement flags true)
//   2  validation rejection (bad expression, bad flags, empty corpus)
//   3  decomposition failure
//   4  verification disagreement
//   5  oracle non-convergence
// Errors are mirrored as a JSON object on stderr.

#include "oscindex/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace oscindex;

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kDecomposition = 3;
constexpr int kDisagree = 4;
constexpr int kNoConverge = 5;

// Agreement tolerance between symbolic and fitted exponents.
constexpr double kAgreeTol = 0.07;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

void emit_error(int code, const std::string& message) {
    Json e{{"error", Json{{"code", code}, {"message", message}}}};
    std::cerr << e.dump() << "\n";
}

// ---- Shared option groups --------------------------------------------------

struct SurfaceArgs {
    std::string file;
    std::string expr;
    std::optional<std::string> label, beta, radius, z0;
};

struct ResolveArgs {
    std::string eta = "1/10";
};

struct OracleArgs {
    std::uint64_t seed = 42;
    long long samples = 131072; // surface evaluations per sweep point
    std::optional<std::string> epsilons, lambdas; // start:ratio:count
    std::optional<double> expect_g;
};

struct OutputArgs {
    std::string out;
    std::string format = "json";
    bool reproducible = false;
};

void attach_surface(CLI::App* cmd, SurfaceArgs& s, bool positional = true) {
    if (positional) cmd->add_option("file", s.file, "surface file (key=value lines)");
    cmd->add_option("--expr", s.expr, "surface polynomial, e.g. \"x^2*y + y^4\"");
    auto opt_str = [cmd](const char* name, std::optional<std::string>& slot, const char* help) {
        cmd->add_option_function<std::string>(
            name, [&slot](const std::string& v) { slot = v; }, help);
    };
    opt_str("--label", s.label, "label override");
    opt_str("--beta", s.beta, "weight exponent in [0, 2), rational");
    opt_str("--radius", s.radius, "working radius in (0, 1], rational");
    opt_str("--z0", s.z0, "height offset of the averaging surface, rational");
}

void attach_resolve(CLI::App* cmd, ResolveArgs& r) {
    cmd->add_option("--eta", r.eta, "comparability margin of the decomposition (rational)");
}

void attach_oracle(CLI::App* cmd, OracleArgs& o, bool with_expect = false) {
    cmd->add_option("--seed", o.seed, "seed echoed into the report");
    cmd->add_option("--samples", o.samples, "minimum surface evaluations per sweep point");
    auto opt_str = [cmd](const char* name, std::optional<std::string>& slot, const char* help) {
        cmd->add_option_function<std::string>(
            name, [&slot](const std::string& v) { slot = v; }, help);
    };
    opt_str("--epsilons", o.epsilons, "threshold ladder start:ratio:count");
    opt_str("--lambdas", o.lambdas, "frequency ladder start:ratio:count");
    if (with_expect)
        cmd->add_option_function<double>(
            "--expect-g", [&o](double v) { o.expect_g = v; },
            "declared exponent for smooth black-box surfaces");
}

void attach_output(CLI::App* cmd, OutputArgs& o) {
    cmd->add_option("--out", o.out, "output file (batch: output directory)");
    cmd->add_option("--format", o.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--reproducible", o.reproducible, "omit timestamps for byte-stable output");
}

// ---- Inputs ----------------------------------------------------------------

Rational parse_rational_flag(const std::string& text, const char* what) {
    try {
        return rational_from_string(text);
    } catch (const std::exception& e) {
        throw CliError(kValidation, std::string(what) + ": " + e.what());
    }
}

SurfaceSpec resolve_surface(const SurfaceArgs& a) {
    if (a.file.empty() && a.expr.empty())
        throw CliError(kValidation, "provide a surface file or --expr");
    if (!a.file.empty() && !a.expr.empty())
        throw CliError(kValidation, "provide either a surface file or --expr, not both");
    SurfaceSpec spec;
    if (!a.file.empty()) {
        spec = load_surface_file(a.file);
    } else {
        spec.expr_text = a.expr;
        spec.expr = parse_expression(a.expr);
        spec.label = a.expr;
    }
    if (a.label) spec.label = *a.label;
    if (a.beta) spec.beta = parse_rational_flag(*a.beta, "--beta");
    if (a.radius) spec.radius = parse_rational_flag(*a.radius, "--radius");
    if (a.z0) spec.z0 = parse_rational_flag(*a.z0, "--z0");
    validate_surface(spec);
    return spec;
}

std::vector<double> parse_ladder(const std::string& text, const char* what) {
    double start = 0, ratio = 0;
    int count = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &start, &ratio, &count, &tail) != 3)
        throw CliError(kValidation, std::string(what) + ": expected start:ratio:count");
    if (!(start > 0) || !(ratio > 0) || ratio == 1.0 || count < 3 || count > 64)
        throw CliError(kValidation,
                       std::string(what) + ": need start > 0, ratio > 0 and != 1, 3 <= count <= 64");
    std::vector<double> ladder;
    double v = start;
    for (int i = 0; i < count; ++i, v *= ratio) ladder.push_back(v);
    return ladder;
}

ResolveOptions resolve_options(const ResolveArgs& r) {
    ResolveOptions opt;
    opt.eta = parse_rational_flag(r.eta, "--eta");
    if (opt.eta <= 0 || opt.eta >= 1)
        throw CliError(kValidation, "--eta: must lie in (0, 1)");
    return opt;
}

// ---- Analysis & verification ----------------------------------------------

struct Analysis {
    Decomposition dec;
    VerdictSet verdicts;
};

Analysis run_analysis(const SurfaceSpec& spec, const ResolveOptions& opt) {
    Analysis a{decompose(spec, opt), {}};
    a.verdicts = derive_verdicts(spec, a.dec.index);
    return a;
}

struct VerifyOutcome {
    Json block;                // the report's oracle block
    std::vector<MeasurePoint> sweep;
    std::vector<MeasurePoint> decay; // abscissa stored as 1/lambda
    bool has_decay = false;
    bool converged = true;
    bool agree = true;
    GrowthFit measure_fit, decay_fit;
};

VerifyOutcome run_verification(const SurfaceSpec& spec, const Decomposition& dec,
                               const OracleArgs& args) {
    VerifyOutcome out;
    const double g = to_double(dec.index.g);

    std::vector<double> epsilons =
        args.epsilons ? parse_ladder(*args.epsilons, "--epsilons") : default_epsilons();
    RayMeasureOptions ropt;
    ropt.scan = std::max(64, static_cast<int>((args.samples + ropt.base_rays - 1) / ropt.base_rays));
    try {
        out.sweep = measure_sweep(spec, epsilons, ropt);
        out.measure_fit = fit_growth(out.sweep);
    } catch (const std::exception& e) {
        throw CliError(kNoConverge, std::string("measure sweep: ") + e.what());
    }
    bool measure_g_ok = std::abs(out.measure_fit.g - g) <= kAgreeTol;
    bool log_flag_ok = out.measure_fit.log_model == (dec.index.log_power > 0);

    Json oracle;
    oracle["measure"] = report_fit(out.measure_fit, out.sweep, "epsilon");
    oracle["measure"]["agree"] = measure_g_ok && log_flag_ok;

    Json agreement{{"measure_g", measure_g_ok}, {"log_flag", log_flag_ok}};
    bool overall = measure_g_ok && log_flag_ok;

    if (dec.index.log_power == 0) {
        out.has_decay = true;
        std::vector<double> lambdas =
            args.lambdas ? parse_ladder(*args.lambdas, "--lambdas") : default_frequencies();
        DecayHealth health;
        out.decay_fit = oscillatory_decay(spec, lambdas, &health, &out.decay);
        out.converged = health.converged;
        bool decay_g_ok = health.converged && std::abs(out.decay_fit.g - g) <= kAgreeTol;

        Json osc = report_fit(out.decay_fit, out.decay, "inverse_lambda");
        osc["health"] = Json{{"requested", health.requested},
                             {"reliable", health.reliable},
                             {"extended", health.extended},
                             {"lambda_max", health.lambda_max},
                             {"tail_slope", health.tail_slope},
                             {"drift", health.drift},
                             {"converged", health.converged}};
        osc["agree"] = decay_g_ok;
        oracle["oscillatory"] = osc;
        agreement["oscillatory_g"] = decay_g_ok;
        overall = overall && decay_g_ok;
    }
    agreement["overall"] = overall;
    oracle["agreement"] = agreement;
    out.block = oracle;
    out.agree = overall;
    return out;
}

// ---- Output plumbing -------------------------------------------------------

void write_text(const OutputArgs& out, const std::string& text) {
    if (out.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out.out, std::ios::binary);
    if (!f) throw CliError(kValidation, "cannot open --out file: " + out.out);
    f << text;
}

void write_json(const OutputArgs& out, const Json& j) {
    write_text(out, j.dump(2) + "\n");
}

std::string decay_csv(const std::vector<MeasurePoint>& pts) {
    std::vector<MeasurePoint> as_lambda;
    as_lambda.reserve(pts.size());
    for (const MeasurePoint& p : pts) as_lambda.push_back({1.0 / p.epsilon, p.measure});
    return sweep_csv(as_lambda, "lambda", 3e-3);
}

// ---- Subcommands -----------------------------------------------------------

int cmd_analyze(const SurfaceArgs& sa, const ResolveArgs& ra, const OracleArgs& oa,
                const OutputArgs& out) {
    if (out.format == "csv")
        throw CliError(kValidation, "csv applies to sweeps and batch summaries; analyze is json");
    SurfaceSpec spec = resolve_surface(sa);
    Analysis a = run_analysis(spec, resolve_options(ra));
    ReportOptions ropt{out.reproducible, oa.seed};
    write_json(out, analysis_report(a.dec, a.verdicts, ropt));
    return kOk;
}

int cmd_verify(const SurfaceArgs& sa, const ResolveArgs& ra, const OracleArgs& oa,
               const OutputArgs& out) {
    if (oa.expect_g)
        throw CliError(kValidation,
                       "--expect-g overrides the symbolic exponent for smooth black-box "
                       "surfaces only; polynomial surfaces derive it symbolically");
    SurfaceSpec spec = resolve_surface(sa);
    Analysis a = run_analysis(spec, resolve_options(ra));
    VerifyOutcome v = run_verification(spec, a.dec, oa);
    if (out.format == "csv") {
        std::string text = sweep_csv(v.sweep, "epsilon", 2e-3);
        if (v.has_decay && !v.decay.empty()) text += "\n" + decay_csv(v.decay);
        write_text(out, text);
    } else {
        ReportOptions ropt{out.reproducible, oa.seed};
        Json report = analysis_report(a.dec, a.verdicts, ropt);
        report["oracle"] = v.block;
        write_json(out, report);
    }
    if (!v.converged) return kNoConverge;
    return v.agree ? kOk : kDisagree;
}

int cmd_polygon(const SurfaceArgs& sa, const OutputArgs& out) {
    if (out.format == "csv")
        throw CliError(kValidation, "csv applies to sweeps and batch summaries; polygon is json");
    SurfaceSpec spec = resolve_surface(sa);
    Json j{{"surface", report_surface(spec)},
           {"polygon", report_polygon(newton_polygon(spec.expr))}};
    write_json(out, j);
    return kOk;
}

int cmd_decompose(const SurfaceArgs& sa, const ResolveArgs& ra, const OutputArgs& out) {
    if (out.format == "csv")
        throw CliError(kValidation, "csv applies to sweeps and batch summaries; decompose is json");
    SurfaceSpec spec = resolve_surface(sa);
    Analysis a = run_analysis(spec, resolve_options(ra));
    ComparabilityAudit audit = audit_comparability(a.dec);
    Json pieces = Json::array();
    for (const PieceAudit& p : audit.pieces) {
        Json row{{"piece", p.piece},
                 {"excluded", p.excluded},
                 {"chart_consistent", p.chart_consistent},
                 {"samples", p.samples},
                 {"violations", p.violations}};
        if (p.excluded) row["exclusion"] = p.exclusion;
        if (!p.excluded && p.samples > 0) {
            row["ratio_min"] = p.ratio_min;
            row["ratio_max"] = p.ratio_max;
            row["derivative_max"] = p.derivative_max;
        }
        pieces.push_back(row);
    }
    Json j{{"surface", report_surface(spec)},
           {"decomposition", report_decomposition(a.dec)},
           {"verification",
            Json{{"checked", audit.checked},
                 {"excluded", audit.excluded},
                 {"violations", audit.violations},
                 {"ratio_min", audit.ratio_min},
                 {"ratio_max", audit.ratio_max},
                 {"derivative_max", audit.derivative_max},
                 {"pieces", pieces}}}};
    write_json(out, j);
    return kOk;
}

struct BatchRow {
    std::string label;
    int code = kOk;
    std::string message;
    std::string g, d, p_threshold, ghat, ohat;
    std::string agree = "error";
    Json report;
    bool has_report = false;
};

BatchRow run_batch_one(const std::filesystem::path& path, const ResolveArgs& ra,
                       const OracleArgs& oa, bool reproducible) {
    BatchRow row;
    row.label = path.stem().string();
    SurfaceSpec spec;
    try {
        spec = load_surface_file(path.string());
        validate_surface(spec);
        row.label = spec.label;
    } catch (const std::exception& e) {
        row.code = kValidation;
        row.message = e.what();
        return row;
    }
    Analysis a;
    try {
        a = run_analysis(spec, resolve_options(ra));
    } catch (const std::exception& e) {
        row.code = kDecomposition;
        row.message = e.what();
        return row;
    }
    char buf[32];
    row.g = to_string(a.dec.index.g);
    row.d = std::to_string(a.dec.index.log_power);
    if (a.verdicts.maximal.has_threshold) row.p_threshold = to_string(a.verdicts.maximal.threshold);
    try {
        VerifyOutcome v = run_verification(spec, a.dec, oa);
        std::snprintf(buf, sizeof buf, "%.6f", v.measure_fit.g);
        row.ghat = buf;
        if (v.has_decay && v.converged) {
            std::snprintf(buf, sizeof buf, "%.6f", v.decay_fit.g);
            row.ohat = buf;
        }
        ReportOptions ropt{reproducible, oa.seed};
        row.report = analysis_report(a.dec, a.verdicts, ropt);
        row.report["oracle"] = v.block;
        row.has_report = true;
        if (!v.converged) {
            row.code = kNoConverge;
            row.message = "oscillatory ladder did not converge";
            return row;
        }
        row.agree = v.agree ? "true" : "false";
        if (!v.agree) {
            row.code = kDisagree;
            row.message = "oracle disagreement";
        }
    } catch (const CliError& e) {
        row.code = e.code;
        row.message = e.what();
    } catch (const std::exception& e) {
        row.code = kNoConverge;
        row.message = e.what();
    }
    return row;
}

int cmd_batch(const std::string& dir, const ResolveArgs& ra, const OracleArgs& oa,
              const OutputArgs& out) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw CliError(kValidation, "not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".surface")
            files.push_back(entry.path());
    if (files.empty()) throw CliError(kValidation, "no .surface files in " + dir);
    std::sort(files.begin(), files.end());

    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("OSCINDEX_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) threads = static_cast<unsigned>(v);
    }
    threads = std::min<unsigned>(std::max(1u, threads), static_cast<unsigned>(files.size()));

    std::vector<BatchRow> rows(files.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i; (i = next.fetch_add(1)) < files.size();)
            rows[i] = run_batch_one(files[i], ra, oa, out.reproducible);
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const BatchRow& a, const BatchRow& b) { return a.label < b.label; });

    std::string csv = "label,g,d,p_threshold,ghat,ohat,agree\n";
    for (const BatchRow& r : rows)
        csv += r.label + "," + r.g + "," + r.d + "," + r.p_threshold + "," + r.ghat + "," +
               r.ohat + "," + r.agree + "\n";
    std::cout << csv;

    if (!out.out.empty()) {
        fs::create_directories(out.out);
        std::ofstream sum(fs::path(out.out) / "summary.csv", std::ios::binary);
        if (!sum) throw CliError(kValidation, "cannot write into --out directory: " + out.out);
        sum << csv;
        for (const BatchRow& r : rows)
            if (r.has_report) {
                std::ofstream f(fs::path(out.out) / (r.label + ".json"), std::ios::binary);
                f << r.report.dump(2) << "\n";
            }
    }

    Json failures = Json::array();
    for (const BatchRow& r : rows)
        if (r.code != kOk)
            failures.push_back(Json{{"label", r.label}, {"code", r.code}, {"message", r.message}});
    if (!failures.empty()) {
        std::cerr << Json{{"failures", failures}}.dump() << "\n";
        return kDisagree;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surface growth-index analyzer with numeric cross-verification"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    SurfaceArgs sa_analyze, sa_verify, sa_polygon, sa_decompose;
    ResolveArgs ra_analyze, ra_verify, ra_decompose, ra_batch;
    OracleArgs oa_analyze, oa_verify, oa_batch;
    OutputArgs out_analyze, out_verify, out_polygon, out_decompose, out_batch;
    std::string batch_dir;

    CLI::App* analyze = app.add_subcommand("analyze", "symbolic analysis report");
    attach_surface(analyze, sa_analyze);
    attach_resolve(analyze, ra_analyze);
    analyze->add_option("--seed", oa_analyze.seed, "seed echoed into the report");
    attach_output(analyze, out_analyze);

    CLI::App* verify = app.add_subcommand("verify", "analysis plus numeric cross-checks");
    attach_surface(verify, sa_verify);
    attach_resolve(verify, ra_verify);
    attach_oracle(verify, oa_verify, true);
    attach_output(verify, out_verify);

    CLI::App* polygon = app.add_subcommand("polygon", "support polygon of the surface");
    attach_surface(polygon, sa_polygon);
    attach_output(polygon, out_polygon);

    CLI::App* decompose_cmd = app.add_subcommand("decompose", "domain pieces plus their audit");
    attach_surface(decompose_cmd, sa_decompose);
    attach_resolve(decompose_cmd, ra_decompose);
    attach_output(decompose_cmd, out_decompose);

    CLI::App* batch = app.add_subcommand("batch", "verify every surface in a corpus directory");
    batch->add_option("dir", batch_dir, "directory of .surface files")->required();
    attach_resolve(batch, ra_batch);
    attach_oracle(batch, oa_batch);
    attach_output(batch, out_batch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*analyze) return cmd_analyze(sa_analyze, ra_analyze, oa_analyze, out_analyze);
        if (*verify) return cmd_verify(sa_verify, ra_verify, oa_verify, out_verify);
        if (*polygon) return cmd_polygon(sa_polygon, out_polygon);
        if (*decompose_cmd) return cmd_decompose(sa_decompose, ra_decompose, out_decompose);
        if (*batch) return cmd_batch(batch_dir, ra_batch, oa_batch, out_batch);
    } catch (const CliError& e) {
        emit_error(e.code, e.what());
        return e.code;
    } catch (const ValidationError& e) {
        emit_error(kValidation, e.what());
        return kValidation;
    } catch (const ParseError& e) {
        emit_error(kValidation, e.what());
        return kValidation;
    } catch (const DecompositionError& e) {
        emit_error(kDecomposition, e.what());
        return kDecomposition;
    } catch (const std::exception& e) {
        emit_error(kDecomposition, std::string("internal error: ") + e.what());
        return kDecomposition;
    }
    return kValidation;
}
