// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Usage: fracsens_acceptance [source-root]   (defaults to the configured source tree)

#include "fracsens/config.hpp"
#include "fracsens/sensitivity.hpp"
#include "fracsens/special_functions.hpp"
#include "fracsens/verification.hpp"
#include "fracsens/volterra.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace fracsens;
namespace ver = fracsens::verification;

namespace {

std::string root = FRACSENS_SOURCE_DIR;

const char* const kCorpus[] = {"zero_rhs",          "constant_history", "linear_autonomous",
                               "manufactured",      "sine_rhs",         "appendix_history"};

struct Loaded {
    config::ProblemConfig cfg;
    Problem problem;
    HistoryData history;
    Mesh mesh;
};

Loaded load(const std::string& name) {
    auto cfg = config::load_problem(root + "/problems/" + name + ".json");
    auto problem = config::make_problem(cfg);
    auto history = config::make_history(cfg);
    auto mesh = config::make_mesh(cfg);
    return {std::move(cfg), std::move(problem), std::move(history), std::move(mesh)};
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Collects failures inside one criterion; the first one is printed.
struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail.str("");
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (ok) detail << (detail.tellp() > 0 ? "; " : "") << what;
    }
};

// Calibration costs a convergence study, so each (alpha, quantity) is computed once.
double calibrated(double alpha, ver::CalibratedQuantity q) {
    static std::map<std::pair<double, ver::CalibratedQuantity>, double> cache;
    const auto key = std::make_pair(alpha, q);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, ver::calibration_constant(alpha, q)).first;
    return it->second;
}
double state_tol(double alpha, std::size_t N, double scale) {
    return ver::tol_solver(calibrated(alpha, ver::CalibratedQuantity::State), alpha, N, scale);
}
double sens_tol(double alpha, std::size_t N, double scale) {
    return ver::tol_solver(calibrated(alpha, ver::CalibratedQuantity::Sensitivity), alpha, N, scale);
}

Verdict zero_rhs_exactness() {
    Verdict v;
    const auto z = load("zero_rhs");
    const auto r = ci_derivatives(z.problem, z.history, z.mesh);
    v.require(std::abs(r.p_T) <= 1e-8, "p(T) = " + sci(r.p_T));
    v.require(std::abs(r.q_T - 0.5641895835) <= 1e-8, "q(T) = " + sci(r.q_T));
    v.note("p(T) = " + sci(r.p_T) + ", |q(T) - 0.5641895835| = " + sci(std::abs(r.q_T - 0.5641895835)));
    return v;
}

Verdict manufactured_convergence() {
    Verdict v;
    for (double alpha : {0.3, 0.5, 0.7}) {
        const double g = fracsens::gamma(3.0 - alpha);
        const Problem p(Order(alpha), 1.0,
                        ScalarField::from_functions(
                            [=](double tau, double) { return 2.0 * std::pow(tau, 2.0 - alpha) / g; },
                            [=](double tau, double) { return 2.0 * (2.0 - alpha) * std::pow(tau, 1.0 - alpha) / g; },
                            [](double, double) { return 0.0; }),
                        2.0);
        std::vector<double> errors;
        double end_error = 0.0;
        for (std::size_t N = 256; N <= 4096; N *= 2) {
            const auto path = solve_nonlinear(p, HistoryData::point(0.0), Mesh::uniform(N));
            double e = 0.0;
            for (std::size_t j = 0; j <= N; ++j) e = std::max(e, std::abs(path.values[j] - path.mesh[j] * path.mesh[j]));
            errors.push_back(e);
            end_error = std::abs(path.end_value() - 1.0);
        }
        double worst = 1e300;
        for (std::size_t i = 1; i < errors.size(); ++i) worst = std::min(worst, std::log2(errors[i - 1] / errors[i]));
        v.require(worst >= 1.0 + alpha - 0.15, "alpha " + sci(alpha) + ": order " + sci(worst));
        if (alpha == 0.5) v.require(end_error <= 1e-4, "x(1) error " + sci(end_error));
        v.note("alpha " + sci(alpha) + ": min order " + sci(worst));
    }
    return v;
}

Verdict linear_autonomous() {
    Verdict v;
    // independent oracles: E_{1/2}(z) = exp(z^2) erfc(-z), E_{1/2,1/2}(z) = 1/sqrt(pi) + z E_{1/2}(z)
    const double e05 = std::exp(1.0) * std::erfc(-1.0);
    const double e0505 = 1.0 / std::sqrt(std::numbers::pi) + e05;
    v.require(rel(mittag_leffler({0.5, 1.0}, 1.0), e05) <= 1e-6, "E_{1/2}(1) series");
    v.require(rel(mittag_leffler({0.5, 0.5}, 1.0), e0505) <= 1e-6, "E_{1/2,1/2}(1) series");

    const auto la = load("linear_autonomous");
    const auto mesh = Mesh::uniform(4096);
    const auto r = ci_derivatives(la.problem, la.history, mesh);
    v.require(rel(r.rho, e05) <= 5e-3, "rho rel err " + sci(rel(r.rho, e05)));
    v.require(rel(r.q_T, e0505) <= 1e-2, "q(T) rel err " + sci(rel(r.q_T, e0505)));
    v.note("rho rel err " + sci(rel(r.rho, e05)) + ", q(T) rel err " + sci(rel(r.q_T, e0505)));
    return v;
}

Verdict fd_oracle() {
    Verdict v;
    const auto s = load("sine_rhs");
    const double alpha = s.cfg.alpha;
    const Mesh mesh = Mesh::graded(s.cfg.N, 2.0 / alpha);
    const auto r = ci_derivatives(s.problem, s.history, mesh);
    const auto schedule = ver::FdSchedule::geometric(s.history.t, s.problem.T);
    const std::vector<double> ells{-1.0, 0.0, 1.0, 2.0};
    std::vector<double> limits;
    double tol_fd_max = 0.0, scale = 0.0, worst = 0.0;
    for (double ell : ells) {
        const auto fd = ver::fd_directional(s.problem, s.history, ell, schedule, mesh);
        const double target = r.p_T + r.q_T * ell;
        const double tol = fd.extrapolation.tol + sens_tol(alpha, s.cfg.N, target);
        const double err = std::abs(fd.extrapolation.limit - target);
        v.require(err <= tol, "ell " + sci(ell) + ": error " + sci(err) + " > " + sci(tol));
        worst = std::max(worst, err / tol);
        limits.push_back(fd.extrapolation.limit);
        tol_fd_max = std::max(tol_fd_max, fd.extrapolation.tol);
        scale = std::max(scale, std::abs(target));
    }
    // least-squares line through (ell, limit)
    double me = 0, ml = 0;
    for (std::size_t i = 0; i < ells.size(); ++i) me += ells[i] / 4, ml += limits[i] / 4;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ells.size(); ++i) sxy += (ells[i] - me) * (limits[i] - ml), sxx += (ells[i] - me) * (ells[i] - me);
    const double slope = sxy / sxx, intercept = ml - slope * me;
    const double tol = tol_fd_max + sens_tol(alpha, s.cfg.N, scale);
    v.require(std::abs(slope - r.q_T) <= tol, "slope off by " + sci(slope - r.q_T));
    v.require(std::abs(intercept - r.p_T) <= tol, "intercept off by " + sci(intercept - r.p_T));
    v.note("worst error/tol " + sci(worst) + ", slope err " + sci(std::abs(slope - r.q_T)) + ", intercept err " +
           sci(std::abs(intercept - r.p_T)) + ", tol " + sci(tol));
    return v;
}

Verdict ci_superlinear() {
    Verdict v;
    double min_slope = 1e300, max_decay = 0.0;
    for (const char* name : kCorpus) {
        const auto c = load(name);
        const double t = c.history.t, T = c.problem.T;
        const Mesh mesh = Mesh::graded(c.cfg.N, 2.0 / c.cfg.alpha);
        const auto schedule = ver::FdSchedule::geometric(t, T);
        const Extension constant = Extension::constant(c.history, T, 1.0);
        const Extension oscillating(c.history, ver::sign_sine_extension(t, T, 20.0));
        for (const Extension* ext : {&constant, &oscillating}) {
            const auto rep = ver::ci_residual(c.problem, c.history, *ext, schedule, mesh);
            const double decay = rep.ratios.back() / rep.ratios.front();
            const std::string label = std::string(name) + (ext == &constant ? " constant" : " piecewise");
            v.require(rep.slope > 1.05, label + ": slope " + sci(rep.slope));
            v.require(decay <= 0.2, label + ": ratio decay " + sci(decay));
            min_slope = std::min(min_slope, rep.slope);
            max_decay = std::max(max_decay, decay);
        }
    }
    v.note("min slope " + sci(min_slope) + ", max decay " + sci(max_decay));
    return v;
}

Verdict gronwall_domination() {
    Verdict v;
    const std::size_t N = 1024;
    const Mesh m = Mesh::uniform(N);
    struct Instance {
        double yhat;
        std::function<double(double)> c, reg;
    };
    const std::vector<Instance> instances{
        {0.7, [](double u) { return 1.0 + 0.5 * std::sin(3.0 * u); }, [](double u) { return 1.0 + u; }},
        {0.0, [](double u) { return 2.0 * u * u; }, [](double u) { return std::exp(-u); }},
        {1.5, [](double) { return 0.5; }, [](double) { return 0.0; }},
    };
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7}) {
        const Order o(alpha);
        for (const auto& in : instances) {
            std::vector<double> c(N + 1), reg(N + 1);
            for (std::size_t j = 0; j <= N; ++j) c[j] = in.c(m[j]), reg[j] = in.reg(m[j]);
            SingularFreeTerm yb;
            yb.singular_coeff = in.yhat;
            yb.regular = reg;
            const auto path = solve_linear_singular({m, o, c, {}, yb});
            const auto bound = gronwall_bound(in.yhat, reg, *std::max_element(c.begin(), c.end()), m, o);
            for (std::size_t j = 1; j <= N; ++j) {
                const double tol = sens_tol(alpha, N, path.values[j]);
                const double excess = path.values[j] - bound[j];
                v.require(excess <= tol, "alpha " + sci(alpha) + " node " + std::to_string(j) + ": excess " + sci(excess));
                worst = std::max(worst, excess);
            }
        }
    }
    v.note("largest excess over bound " + sci(worst));
    return v;
}

Verdict substitution_and_rescaling() {
    Verdict v;
    double worst_sub = 0.0, worst_resc = 0.0;
    for (const char* name : kCorpus) {
        const auto c = load(name);
        const double alpha = c.cfg.alpha;
        const std::size_t N = c.cfg.N;
        const auto r = ci_derivatives(c.problem, c.history, c.mesh);
        const auto co = coefficients(c.problem, r.x_path, c.history.t, c.problem.T);
        const auto ft = pbar_qbar(c.problem, c.history, c.mesh);
        const double scale = std::max(std::abs(r.p_T), std::abs(r.q_T));
        const double res_p = ver::substitution_residual(c.mesh, c.problem.order, co.a_resc, ft.pbar, co.b_resc, r.p_path);
        const double res_q = ver::substitution_residual(c.mesh, c.problem.order, co.a_resc, ft.qbar, {}, r.q_path);
        const double tol = sens_tol(alpha, N, scale);
        v.require(std::max(res_p, res_q) <= tol, std::string(name) + ": substitution residual " + sci(std::max(res_p, res_q)));
        worst_sub = std::max({worst_sub, res_p / tol, res_q / tol});

        const double direct_grading = c.cfg.mesh_kind == config::MeshKind::Graded
                                          ? config::effective_grading(c.cfg) + 1.0
                                          : 1.0 / alpha;
        const auto rs = ver::rescaling_agreement(c.problem, c.history, c.mesh, direct_grading);
        const double rs_scale = std::max({std::abs(rs.rho_direct), std::abs(rs.p_direct), std::abs(rs.q_direct)});
        const double rs_tol = sens_tol(alpha, N, rs_scale);
        v.require(rs.max_difference <= rs_tol,
                  std::string(name) + ": rescaling difference " + sci(rs.max_difference) + " > " + sci(rs_tol));
        worst_resc = std::max(worst_resc, rs.max_difference / rs_tol);
    }
    v.note("worst residual/tol " + sci(worst_sub) + ", worst rescaling difference/tol " + sci(worst_resc));
    return v;
}

Verdict appendix_reproduction() {
    Verdict v;
    std::ifstream in(root + "/tests/fixtures/appendix.json");
    if (!in) {
        v.require(false, "missing appendix fixture");
        return v;
    }
    const auto fx = nlohmann::json::parse(in);
    const auto rep = ver::appendix_example(Order(fx["alpha"].get<double>()), {3, 5}, fx["theta_star"].get<double>());
    const auto frozen = fx["gaps"].get<std::vector<double>>();
    const double floor = fx["min_gap"].get<double>();
    v.require(floor > 0.0, "frozen floor not positive");
    v.require(rep.gaps.size() == frozen.size(), "gap count");
    for (std::size_t i = 0; i < std::min(rep.gaps.size(), frozen.size()); ++i) {
        v.require(rel(rep.gaps[i], frozen[i]) <= 1e-10, "gap " + std::to_string(i) + " drifted from fixture");
        v.require(rep.gaps[i] >= floor * (1 - 1e-12), "gap " + std::to_string(i) + " below floor");
    }
    double worst = 0.0;
    for (double s : rep.scaled_pbar) worst = std::max(worst, std::abs(s));
    v.require(worst <= rep.pbar_bound * (1 + 1e-12), "weighted pbar " + sci(worst) + " above " + sci(rep.pbar_bound));
    v.note("min gap " + sci(*std::min_element(rep.gaps.begin(), rep.gaps.end())) + " >= " + sci(floor) +
           ", max |theta^(1-a) pbar| " + sci(worst) + " <= " + sci(rep.pbar_bound));
    return v;
}

Verdict semigroup_property() {
    Verdict v;
    double worst = 0.0;
    for (const char* name : kCorpus) {
        const auto c = load(name);
        for (double fraction : {0.25, 0.5, 0.75}) {
            const auto sg = ver::semigroup(c.problem, c.history, c.mesh, fraction);
            const double tol = state_tol(c.cfg.alpha, c.cfg.N, sg.direct);
            v.require(sg.difference <= tol, std::string(name) + ": difference " + sci(sg.difference) + " > " + sci(tol));
            worst = std::max(worst, sg.difference / tol);
        }
    }
    v.note("worst difference/tol " + sci(worst));
    return v;
}

Verdict special_functions() {
    Verdict v;
    v.require(rel(fracsens::gamma(0.5), std::sqrt(std::numbers::pi)) <= 1e-12, "Gamma(1/2)");
    v.require(rel(fracsens::gamma(1.0), 1.0) <= 1e-12, "Gamma(1)");
    v.require(rel(fracsens::gamma(2.5), 1.5 * 0.5 * std::sqrt(std::numbers::pi)) <= 1e-12, "Gamma(5/2)");
    v.require(rel(beta_fn(0.5, 0.5), std::numbers::pi) <= 1e-12, "B(1/2, 1/2)");
    for (double z : {-3.0, -1.0, 0.5, 1.0, 4.0, 20.0})
        v.require(rel(mittag_leffler({1.0, 1.0}, z), std::exp(z)) <= 1e-10, "E_{1,1}(" + sci(z) + ")");
    for (double a : {0.3, 0.5, 0.7, 0.9})
        v.require(rel(mittag_leffler({a, a}, 0.0), 1.0 / fracsens::gamma(a)) <= 1e-12, "E_{a,a}(0)");

    boost::math::quadrature::tanh_sinh<double> integrator;
    double worst = 0.0;
    for (double alpha : {0.3, 0.5, 0.7})
        for (double c : {0.5, 1.0, 2.0})
            for (double theta : {0.25, 1.0}) {
                auto integrand = [&](double z, double zc) {
                    const double right = zc > 0 ? zc : theta - z;
                    return mittag_leffler({alpha, alpha}, c * std::pow(right, alpha)) * std::pow(z, alpha - 1.0) *
                           std::pow(right, alpha - 1.0);
                };
                const double ga = fracsens::gamma(alpha);
                const double rhs = 1.0 / ga + c * std::pow(theta, 1.0 - alpha) / ga * integrator.integrate(integrand, 0.0, theta);
                const double e = rel(rhs, mittag_leffler({alpha, alpha}, c * std::pow(theta, alpha)));
                v.require(e <= 1e-6, "renewal identity alpha " + sci(alpha) + " c " + sci(c));
                worst = std::max(worst, e);
            }
    v.note("renewal identity worst rel err " + sci(worst));
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) root = argv[1];
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"zero right-hand side exactness", zero_rhs_exactness},
        {"manufactured convergence", manufactured_convergence},
        {"linear autonomous references", linear_autonomous},
        {"finite-difference oracle agreement", fd_oracle},
        {"ci-residual superlinearity", ci_superlinear},
        {"Gronwall domination", gronwall_domination},
        {"substitution and rescaling equivalence", substitution_and_rescaling},
        {"appendix oscillation", appendix_reproduction},
        {"semigroup property", semigroup_property},
        {"special functions", special_functions},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail.str(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s [%.1fs]\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.str().c_str(), secs);
        std::fflush(stdout);
        failed += v.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
