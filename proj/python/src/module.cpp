#include "fracsens/cli.hpp"
#include "fracsens/config.hpp"
#include "fracsens/errors.hpp"
#include "fracsens/sensitivity.hpp"
#include "fracsens/special_functions.hpp"
#include "fracsens/verification.hpp"
#include "fracsens/volterra.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <span>
#include <sstream>

namespace py = pybind11;
using namespace fracsens;

namespace {

py::array_t<double> to_numpy(std::span<const double> v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

config::ProblemConfig with_overrides(const std::string& json_text, std::optional<std::size_t> N) {
    auto cfg = config::parse_problem(json_text);
    if (N) {
        config::validate_N(*N);
        cfg.N = *N;
    }
    return cfg;
}

py::dict solve(const std::string& json_text, std::optional<std::size_t> N) {
    const auto cfg = with_overrides(json_text, N);
    const Mesh mesh = config::make_mesh(cfg);
    std::vector<double> tau(mesh.N() + 1);
    for (std::size_t j = 0; j <= mesh.N(); ++j) tau[j] = cfg.t + (cfg.T - cfg.t) * mesh[j];
    SolutionPath path = [&] {
        py::gil_scoped_release unlocked;
        return solve_nonlinear(config::make_problem(cfg), config::make_history(cfg), mesh,
                               config::make_solver_options(cfg));
    }();
    py::dict out;
    out["theta"] = to_numpy(mesh.nodes());
    out["tau"] = to_numpy(tau);
    out["x"] = to_numpy(path.values);
    out["growth_violations"] = path.growth.violations;
    return out;
}

py::dict sensitivities(const std::string& json_text, std::optional<std::size_t> N) {
    const auto cfg = with_overrides(json_text, N);
    SensitivityResult r = [&] {
        py::gil_scoped_release unlocked;
        return ci_derivatives(config::make_problem(cfg), config::make_history(cfg), config::make_mesh(cfg),
                              config::make_solver_options(cfg));
    }();
    py::dict out;
    out["rho"] = r.rho;
    out["dt_alpha_rho"] = r.p_T;
    out["nabla_alpha_rho"] = r.q_T;
    out["p"] = to_numpy(r.p_path.values);
    out["q"] = to_numpy(r.q_path.values);
    out["kink_warnings"] = r.kink_warnings;
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release unlocked;
        code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Caputo-type Cauchy problems with history data and their coinvariant sensitivities";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_OverflowError);
    py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("gamma", &fracsens::gamma, py::arg("x"));
    m.def("beta", &beta_fn, py::arg("a"), py::arg("b"));
    m.def(
        "mittag_leffler", [](double alpha, double beta, double z) { return mittag_leffler({alpha, beta}, z); },
        py::arg("alpha"), py::arg("beta"), py::arg("z"));

    m.def("solve", &solve, py::arg("config_json"), py::arg("N") = py::none(),
          "Solve the problem described by a config JSON string; returns theta, tau, x arrays.");
    m.def("sensitivities", &sensitivities, py::arg("config_json"), py::arg("N") = py::none(),
          "rho together with its fractional time and state derivatives.");

    m.def(
        "appendix_gaps",
        [](double alpha, int imin, int imax, double theta_star) {
            const auto rep = verification::appendix_example(Order(alpha), {imin, imax}, theta_star);
            py::dict out;
            out["theta_star"] = rep.theta_star;
            out["i_star"] = rep.i_star;
            out["eps_star"] = rep.eps_star;
            out["gaps"] = rep.gaps;
            out["min_gap"] = rep.min_gap;
            return out;
        },
        py::arg("alpha") = 0.5, py::arg("imin") = 3, py::arg("imax") = 5, py::arg("theta_star") = 0.0);

    m.def("run_cli", &run_cli, py::arg("args"), "Run a CLI subcommand in-process; returns (status, stdout, stderr).");
}
