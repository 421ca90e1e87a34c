#include "fracsens/cli.hpp"

#include "fracsens/config.hpp"
#include "fracsens/errors.hpp"
#include "fracsens/expr.hpp"
#include "fracsens/report.hpp"
#include "fracsens/sensitivity.hpp"
#include "fracsens/special_functions.hpp"
#include "fracsens/verification.hpp"
#include "fracsens/volterra.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

namespace fracsens::cli {

namespace {

using Json = nlohmann::ordered_json;
using config::OutputFormat;
using config::ProblemConfig;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Settings shared by every subcommand that reads a problem file.
struct CommonFlags {
    std::string config_path;
    std::size_t N = 0;
    std::string mesh;
    double grading = 0.0;
    std::string corrector;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
};

// Output destination and format, shared by all subcommands.
struct OutputFlags {
    std::string format;
    std::string output;
    std::string csv;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
};

void add_problem_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Problem file (JSON, schema below)")->required();
    cmd->add_option("--N", f.N, "Cells of the mesh, a power of two in [64, 65536]");
    cmd->add_option("--mesh", f.mesh, "Mesh kind")->check(CLI::IsMember({"uniform", "graded"}));
    cmd->add_option("--grading", f.grading, "Grading exponent r >= 1 of a graded mesh (default 2/alpha)");
    cmd->add_option("--corrector", f.corrector, "Implicit step")->check(CLI::IsMember({"newton", "fixed-point"}));
    f.seed_opt = cmd->add_option("--seed", f.seed, "Seed recorded in the report");
    cmd->footer(schema_help());
}

void add_output_flags(CLI::App* cmd, OutputFlags& o) {
    cmd->add_option("--format", o.format, "Main output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,--out,-o", o.output, "Write the main output here instead of stdout");
    cmd->add_option("--csv", o.csv, "Also write the plot-ready CSV table here");
}

ProblemConfig load(const CommonFlags& f) {
    ProblemConfig cfg = config::load_problem(f.config_path);
    if (f.N != 0) {
        config::validate_N(f.N);
        cfg.N = f.N;
    }
    if (f.mesh == "uniform") cfg.mesh_kind = config::MeshKind::Uniform;
    if (f.mesh == "graded") cfg.mesh_kind = config::MeshKind::Graded;
    if (f.grading != 0.0) {
        if (!(f.grading >= 1.0)) throw config::ConfigError("/mesh/grading", "grading must be at least 1");
        cfg.grading = f.grading;
    }
    if (f.corrector == "newton") cfg.corrector = Corrector::Newton;
    if (f.corrector == "fixed-point") cfg.corrector = Corrector::FixedPoint;
    if (f.seed_opt && f.seed_opt->count()) cfg.seed = f.seed;
    return cfg;
}

OutputFormat resolve_format(const OutputFlags& o, const std::optional<OutputFormat>& from_config,
                            OutputFormat fallback) {
    if (o.format == "csv") return OutputFormat::Csv;
    if (o.format == "json") return OutputFormat::Json;
    return from_config.value_or(fallback);
}

std::optional<std::string> resolve_output(const OutputFlags& o, const std::optional<std::string>& from_config) {
    if (!o.output.empty()) return o.output;
    return from_config;
}

Json settings_of(const ProblemConfig& cfg) {
    Json s;
    s["N"] = cfg.N;
    s["mesh"] = cfg.mesh_kind == config::MeshKind::Uniform ? "uniform" : "graded";
    s["grading"] = config::effective_grading(cfg);
    s["corrector"] = cfg.corrector == Corrector::Newton ? "newton" : "fixed-point";
    s["seed"] = cfg.seed;
    return s;
}

std::string config_hash(const std::string& canonical, const Json& settings) {
    return config::hash_hex(config::fnv1a(canonical + "\n" + settings.dump()));
}

// Header common to every problem-based report.
Json header(const std::string& command, const ProblemConfig& cfg, const Json& settings) {
    Json j;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg.canonical, settings);
    j["name"] = cfg.name;
    j["alpha"] = cfg.alpha;
    j["t"] = cfg.t;
    j["T"] = cfg.T;
    j["settings"] = settings;
    return j;
}

void emit(const Context& ctx, OutputFormat fmt, const std::optional<std::string>& path, const Json& json,
          std::span<const report::Column> table, const OutputFlags& o) {
    if (fmt == OutputFormat::Json) report::emit(path, report::to_json(json), ctx.out);
    else report::emit(path, report::to_csv(table), ctx.out);
    if (!o.csv.empty()) report::emit(o.csv, report::to_csv(table), ctx.out);
}

Json to_array(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

void warn_growth(const Context& ctx, const GrowthReport& g) {
    if (g.violations)
        ctx.err << "warning: growth bound exceeded at " << g.violations << " of " << g.checked
                << " nodes (worst ratio " << report::format_double(g.worst_ratio) << ")\n";
}

// ----- solve

struct SolveCmd {
    CommonFlags common;
    OutputFlags output;

    int operator()(const Context& ctx) const {
        const ProblemConfig cfg = load(common);
        const Problem problem = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const Mesh mesh = config::make_mesh(cfg);
        const SolutionPath path = solve_nonlinear(problem, h, mesh, config::make_solver_options(cfg));
        warn_growth(ctx, path.growth);

        const Json settings = settings_of(cfg);
        std::vector<double> theta(mesh.nodes().begin(), mesh.nodes().end()), tau(theta.size());
        for (std::size_t j = 0; j < theta.size(); ++j) tau[j] = to_tau(cfg.t, cfg.T, theta[j]);
        const std::vector<report::Column> table{{"theta", theta}, {"tau", tau}, {"x", path.values}};

        Json j = header("solve", cfg, settings);
        j["x_T"] = path.end_value();
        j["growth"] = {{"checked", path.growth.checked},
                       {"violations", path.growth.violations},
                       {"worst_ratio", path.growth.worst_ratio}};
        j["theta"] = theta;
        j["tau"] = tau;
        j["x"] = path.values;
        emit(ctx, resolve_format(output, cfg.format, OutputFormat::Csv), resolve_output(output, cfg.output_path), j,
             table, output);
        return Ok;
    }
};

// ----- sens

struct SensCmd {
    CommonFlags common;
    OutputFlags output;
    std::string paths;

    int operator()(const Context& ctx) const {
        const ProblemConfig cfg = load(common);
        const Problem problem = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const Mesh mesh = config::make_mesh(cfg);
        const SensitivityResult r = ci_derivatives(problem, h, mesh, config::make_solver_options(cfg));
        warn_growth(ctx, r.x_path.growth);
        if (r.kink_warnings) ctx.err << "warning: abs() differentiated at its kink " << r.kink_warnings << " times\n";

        const Json settings = settings_of(cfg);
        Json j = header("sens", cfg, settings);
        j["N"] = cfg.N;
        j["rho"] = r.rho;
        j["dt_alpha_rho"] = r.p_T;
        j["nabla_alpha_rho"] = r.q_T;
        j["kink_warnings"] = r.kink_warnings;
        const std::vector<report::Column> scalars{{"rho", {r.rho}}, {"dt_alpha_rho", {r.p_T}},
                                                  {"nabla_alpha_rho", {r.q_T}}};
        OutputFlags o = output;
        o.csv.clear();
        emit(ctx, resolve_format(output, cfg.format, OutputFormat::Json), resolve_output(output, cfg.output_path), j,
             scalars, o);

        if (!paths.empty() || !output.csv.empty()) {
            std::vector<double> theta(mesh.nodes().begin(), mesh.nodes().end()), tau(theta.size());
            for (std::size_t k = 0; k < theta.size(); ++k) tau[k] = to_tau(cfg.t, cfg.T, theta[k]);
            const std::vector<report::Column> table{{"theta", theta},
                                                    {"tau", tau},
                                                    {"x", r.x_path.values},
                                                    {"p", r.p_path.values},
                                                    {"q", r.q_path.values}};
            report::emit(paths.empty() ? output.csv : paths, report::to_csv(table), ctx.out);
        }
        return Ok;
    }
};

// ----- verify-ci

struct VerifyCiCmd {
    CommonFlags common;
    OutputFlags output;
    double ell = 0.0;
    std::string extension_path;
    double oscillate = 0.0;
    int k_first = 2, k_last = 10;
    double fd_grading = 0.0;

    int operator()(const Context& ctx) const {
        const ProblemConfig cfg = load(common);
        const Problem problem = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const SolverOptions options = config::make_solver_options(cfg);
        const double r = fd_grading > 0.0 ? fd_grading : 2.0 / cfg.alpha;
        if (!(r >= 1.0)) throw ValidationError("--fd-grading must be at least 1");
        const Mesh mesh = Mesh::graded(cfg.N, r);
        const auto schedule = verification::FdSchedule::geometric(cfg.t, cfg.T, k_first, k_last, {ell});
        schedule.validate(cfg.t, cfg.T);

        Json settings = settings_of(cfg);
        settings["fd_grading"] = r;
        settings["k_first"] = k_first;
        settings["k_last"] = k_last;
        Json ext;
        const bool constant = extension_path.empty() && oscillate == 0.0;
        std::optional<Extension> extension;
        if (constant) {
            ext = {{"kind", "constant"}, {"ell", ell}};
            extension.emplace(Extension::constant(h, cfg.T, ell));
        } else {
            PiecewiseLinear pl;
            if (!extension_path.empty()) {
                std::ifstream in(extension_path, std::ios::binary);
                if (!in) throw ValidationError("cannot read " + extension_path);
                std::ostringstream ss;
                ss << in.rdbuf();
                pl = config::parse_piecewise(ss.str());
                ext["kind"] = "file";
            } else {
                pl = verification::sign_sine_extension(cfg.t, cfg.T, oscillate);
                ext["kind"] = "sign_sine";
                ext["frequency"] = oscillate;
            }
            ext["breaks"] = to_array(pl.breaks());
            ext["left"] = to_array(pl.left_values());
            ext["right"] = to_array(pl.right_values());
            extension.emplace(h, std::move(pl));
        }
        settings["extension"] = ext;

        const auto res = verification::ci_residual(problem, h, *extension, schedule, mesh, options);
        Json j = header("verify-ci", cfg, settings);
        j["dt_alpha_rho"] = res.p_T;
        j["nabla_alpha_rho"] = res.q_T;

        std::vector<double> quotients(res.steps.size(), kNaN);
        if (constant) {
            const auto fd = verification::fd_directional(problem, h, ell, schedule, mesh, options);
            quotients = fd.quotients;
            const double target = res.p_T + res.q_T * ell;
            const double C = verification::calibration_constant(cfg.alpha, verification::CalibratedQuantity::Sensitivity);
            const double tol_solver = verification::tol_solver(C, cfg.alpha, cfg.N, target);
            const double error = fd.extrapolation.limit - target;
            j["fd"] = {{"steps", fd.steps},
                       {"quotients", fd.quotients},
                       {"limit", fd.extrapolation.limit},
                       {"tol_fd", fd.extrapolation.tol},
                       {"fit_residual", fd.extrapolation.fit_residual},
                       {"exponents", fd.extrapolation.exponents},
                       {"calibration_constant", C},
                       {"tol_solver", tol_solver},
                       {"target", target},
                       {"error", error},
                       {"agrees", std::abs(error) <= fd.extrapolation.tol + tol_solver}};
        }
        const double decay = res.ratios.back() / res.ratios.front();
        j["residual"] = {{"steps", res.steps},
                         {"residuals", res.residuals},
                         {"ratios", res.ratios},
                         {"slope", res.slope},
                         {"ratio_decay", decay},
                         {"superlinear", res.slope > 1.05 && decay <= 0.2}};
        const std::vector<report::Column> table{
            {"offset", res.steps}, {"quotient", quotients}, {"residual", res.residuals}, {"ratio", res.ratios}};
        emit(ctx, resolve_format(output, cfg.format, OutputFormat::Json), resolve_output(output, cfg.output_path), j,
             table, output);
        return Ok;
    }
};

// ----- verify-freeterm

struct VerifyFreeTermCmd {
    CommonFlags common;
    OutputFlags output;
    double ell = 0.0;
    std::vector<double> thetas{0.1, 0.25, 0.5, 1.0};
    int k_first = 2, k_last = 10;

    int operator()(const Context& ctx) const {
        const ProblemConfig cfg = load(common);
        const Problem problem = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        for (double th : thetas)
            if (!(th > 0.0 && th <= 1.0)) throw ValidationError("--theta values must lie in (0, 1]");
        const auto schedule = verification::FdSchedule::geometric(cfg.t, cfg.T, k_first, k_last, {ell});
        schedule.validate(cfg.t, cfg.T);
        const auto rep = verification::free_term_limits(problem, h, ell, schedule, thetas);

        Json settings;
        settings["ell"] = ell;
        settings["thetas"] = thetas;
        settings["k_first"] = k_first;
        settings["k_last"] = k_last;
        Json j = header("verify-freeterm", cfg, settings);
        j["steps"] = rep.steps;
        j["thetas"] = rep.thetas;
        j["pointwise"] = rep.pointwise;
        j["pointwise_majorant"] = rep.pointwise_majorant;
        j["weighted"] = rep.weighted;
        j["weighted_majorant"] = rep.weighted_majorant;
        j["majorant_holds"] = rep.majorant_holds;

        std::vector<report::Column> table{{"offset", {}},   {"theta", {}},    {"pointwise", {}},
                                          {"pointwise_majorant", {}}, {"weighted", {}}, {"weighted_majorant", {}}};
        for (std::size_t s = 0; s < rep.steps.size(); ++s)
            for (std::size_t k = 0; k < rep.thetas.size(); ++k) {
                table[0].values.push_back(rep.steps[s]);
                table[1].values.push_back(rep.thetas[k]);
                table[2].values.push_back(rep.pointwise[s][k]);
                table[3].values.push_back(rep.pointwise_majorant[s][k]);
                table[4].values.push_back(rep.weighted[s][k]);
                table[5].values.push_back(rep.weighted_majorant[s][k]);
            }
        emit(ctx, resolve_format(output, cfg.format, OutputFormat::Json), resolve_output(output, cfg.output_path), j,
             table, output);
        return Ok;
    }
};

// ----- appendix

struct AppendixCmd {
    OutputFlags output;
    double alpha = 0.5;
    int i_min = 3, i_max = 5;
    double theta_star = 0.0;

    int operator()(const Context& ctx) const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("--alpha must lie in (0, 1)");
        const auto rep = verification::appendix_example(Order(alpha), {i_min, i_max}, theta_star);
        Json settings{{"alpha", alpha}, {"imin", i_min}, {"imax", i_max}, {"theta_star", theta_star}};
        Json j;
        j["command"] = "appendix";
        j["config_hash"] = config_hash("appendix", settings);
        j["settings"] = settings;
        j["alpha"] = rep.alpha;
        j["theta_star"] = rep.theta_star;
        j["threshold"] = rep.threshold;
        j["i_star"] = rep.i_star;
        j["eps_star"] = rep.eps_star;
        j["indices"] = rep.indices;
        j["h_even"] = rep.h_even;
        j["h_odd"] = rep.h_odd;
        j["gaps"] = rep.gaps;
        j["min_gap"] = rep.min_gap;
        j["theta_samples"] = rep.theta_samples;
        j["scaled_pbar"] = rep.scaled_pbar;
        j["pbar_bound"] = rep.pbar_bound;
        std::vector<double> idx(rep.indices.begin(), rep.indices.end());
        const std::vector<report::Column> table{
            {"i", idx}, {"h_even", rep.h_even}, {"h_odd", rep.h_odd}, {"gap", rep.gaps}};
        emit(ctx, resolve_format(output, std::nullopt, OutputFormat::Json), resolve_output(output, std::nullopt), j,
             table, output);
        return Ok;
    }
};

// ----- ml

struct MlCmd {
    OutputFlags output;
    double alpha = 0.5;
    double beta = 1.0;
    std::vector<double> z;

    int operator()(const Context& ctx) const {
        std::vector<double> values;
        values.reserve(z.size());
        for (double v : z) values.push_back(mittag_leffler({alpha, beta}, v));
        Json settings{{"alpha", alpha}, {"beta", beta}, {"z", z}};
        Json j;
        j["command"] = "ml";
        j["config_hash"] = config_hash("ml", settings);
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["z"] = z;
        j["value"] = values;
        const std::vector<report::Column> table{{"z", z}, {"value", values}};
        emit(ctx, resolve_format(output, std::nullopt, OutputFormat::Json), resolve_output(output, std::nullopt), j,
             table, output);
        return Ok;
    }
};

// ----- convergence

struct ConvergenceCmd {
    CommonFlags common;
    OutputFlags output;
    int levels = 5;
    std::size_t n0 = 256;

    int operator()(const Context& ctx) const {
        ProblemConfig cfg = load(common);
        if (!cfg.exact_solution) throw config::ConfigError("/exact_solution", "required by convergence");
        if (levels < 2) throw ValidationError("--levels must be at least 2");
        const expr::Ast exact = expr::parse(*cfg.exact_solution, {"tau"});
        const Problem problem = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);

        std::vector<double> Ns, errors, orders;
        for (int k = 0; k < levels; ++k) {
            cfg.N = n0 << k;
            config::validate_N(cfg.N);
            const Mesh mesh = config::make_mesh(cfg);
            const auto path = solve_nonlinear(problem, h, mesh, config::make_solver_options(cfg));
            double e = 0.0;
            for (std::size_t j = 0; j <= mesh.N(); ++j) {
                const double tau = to_tau(cfg.t, cfg.T, mesh[j]);
                const double ref = expr::evaluate(exact, std::span<const double>(&tau, 1));
                e = std::max(e, std::abs(path.values[j] - ref));
            }
            Ns.push_back(static_cast<double>(cfg.N));
            errors.push_back(e);
            orders.push_back(k == 0 ? kNaN : std::log2(errors[k - 1] / e));
        }
        cfg.N = n0;
        Json settings = settings_of(cfg);
        settings["levels"] = levels;
        Json j = header("convergence", cfg, settings);
        j["N"] = Ns;
        j["error"] = errors;
        j["order"] = orders;
        j["final_order"] = orders.back();
        j["expected_order"] = 1.0 + cfg.alpha;
        const std::vector<report::Column> table{{"N", Ns}, {"error", errors}, {"order", orders}};
        emit(ctx, resolve_format(output, cfg.format, OutputFormat::Csv), resolve_output(output, cfg.output_path), j,
             table, output);
        return Ok;
    }
};

}  // namespace

const char* schema_help() {
    return R"(Problem file schema (JSON; unknown keys are rejected):
  name            string, optional
  description     string, optional
  alpha           number in (0, 1), required
  T               number > history.t, required
  f               expression in tau and x, required
  growth_gamma    number >= 0, default 0 (0 disables the growth check)
  history         object, required
    t             number >= 0
    w0            number, default 0
    lw            required when t > 0, absent when t = 0; covers [0, t]
      breaks      increasing numbers, first 0, last t
      values      one per cell (piecewise constant), or
      left, right one per cell (piecewise linear)
  exact_solution  expression in tau, optional (used by convergence)
  mesh            object, optional
    N             power of two in [64, 65536], default 1024
    kind          "uniform" (default) or "graded"
    grading       number >= 1, default 2/alpha for graded meshes
  corrector       "newton" (default) or "fixed-point"
  seed            nonnegative integer, default 0
  output          object, optional
    format        "csv" or "json"
    path          output file
Command line flags override file settings. Exit status: 0 success, 1 invalid input, 2 solver failure.
FRAC_SENS_THREADS caps the worker threads.)";
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solver and sensitivity toolkit for Caputo fractional differential equations"};
    app.name("fracsens");
    app.require_subcommand(1);
    app.footer(schema_help());

    SolveCmd solve;
    SensCmd sens;
    VerifyCiCmd verify_ci;
    VerifyFreeTermCmd verify_freeterm;
    AppendixCmd appendix;
    MlCmd ml;
    ConvergenceCmd convergence;

    auto* c_solve = app.add_subcommand("solve", "Solve the problem; CSV of theta, tau, x");
    add_problem_flags(c_solve, solve.common);
    add_output_flags(c_solve, solve.output);

    auto* c_sens = app.add_subcommand("sens", "Endpoint value and its derivatives of order alpha");
    add_problem_flags(c_sens, sens.common);
    add_output_flags(c_sens, sens.output);
    c_sens->add_option("--paths", sens.paths, "Write theta, tau, x, p, q as CSV here");

    auto* c_ci = app.add_subcommand("verify-ci", "Difference quotients and expansion residual along an extension");
    add_problem_flags(c_ci, verify_ci.common);
    add_output_flags(c_ci, verify_ci.output);
    auto* ell_opt = c_ci->add_option("--ell", verify_ci.ell, "Constant extension derivative");
    auto* ext_opt = c_ci->add_option("--extension", verify_ci.extension_path,
                                     "Piecewise extension derivative on [t, T] (breaks plus values or left/right)");
    auto* osc_opt = c_ci->add_option("--oscillate", verify_ci.oscillate,
                                     "Use sign(sin(K (xi - t))) as the extension derivative");
    ell_opt->excludes(ext_opt)->excludes(osc_opt);
    ext_opt->excludes(osc_opt);
    c_ci->add_option("--kmin", verify_ci.k_first, "Largest offset 2^-kmin (T - t) / 4");
    c_ci->add_option("--kmax", verify_ci.k_last, "Smallest offset 2^-kmax (T - t) / 4");
    c_ci->add_option("--fd-grading", verify_ci.fd_grading, "Grading of the difference-quotient mesh (default 2/alpha)");

    auto* c_ft = app.add_subcommand("verify-freeterm", "Limits of the free-term difference quotients");
    add_problem_flags(c_ft, verify_freeterm.common);
    add_output_flags(c_ft, verify_freeterm.output);
    c_ft->add_option("--ell", verify_freeterm.ell, "Constant extension derivative");
    c_ft->add_option("--theta", verify_freeterm.thetas, "Sample points in (0, 1]");
    c_ft->add_option("--kmin", verify_freeterm.k_first, "Largest offset 2^-kmin (T - t) / 4");
    c_ft->add_option("--kmax", verify_freeterm.k_last, "Smallest offset 2^-kmax (T - t) / 4");

    auto* c_app = app.add_subcommand("appendix", "Oscillating history without a limit of the free term");
    add_output_flags(c_app, appendix.output);
    c_app->add_option("--alpha", appendix.alpha, "Order in (0, 1)");
    c_app->add_option("--imin", appendix.i_min, "First block pair index");
    c_app->add_option("--imax", appendix.i_max, "Last block pair index (at most 8)");
    c_app->add_option("--theta-star", appendix.theta_star, "Cutoff; default 0.8 times the admissible threshold");

    auto* c_ml = app.add_subcommand("ml", "Mittag-Leffler function E_{alpha,beta}(z)");
    add_output_flags(c_ml, ml.output);
    c_ml->add_option("--alpha", ml.alpha, "alpha in (0, 2]")->required();
    c_ml->add_option("--beta", ml.beta, "beta > 0");
    c_ml->add_option("--z", ml.z, "Arguments, |z| <= 100")->required();

    auto* c_conv = app.add_subcommand("convergence", "Error against exact_solution under mesh halving");
    add_problem_flags(c_conv, convergence.common);
    add_output_flags(c_conv, convergence.output);
    c_conv->add_option("--levels", convergence.levels, "Number of meshes");
    c_conv->add_option("--n0", convergence.n0, "Coarsest N");

    std::vector<std::string> argv_store{"fracsens"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : InvalidInput;
    }

    const Context ctx{out, err};
    try {
        if (*c_solve) return solve(ctx);
        if (*c_sens) return sens(ctx);
        if (*c_ci) return verify_ci(ctx);
        if (*c_ft) return verify_freeterm(ctx);
        if (*c_app) return appendix(ctx);
        if (*c_ml) return ml(ctx);
        if (*c_conv) return convergence(ctx);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << '\n';
        return SolverFailure;
    }
    return InvalidInput;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace fracsens::cli
