#include "fracsens/sensitivity.hpp"

#include "fracsens/errors.hpp"
#include "fracsens/kernels.hpp"

#include <cmath>

namespace fracsens {

namespace {

// integral over the last cell [a, t] of (t - xi)(tau - xi)^(alpha-2), eps = tau - t
double last_cell_linear(double eps, double width, double alpha) {
    const double far = eps + width;
    if (eps == 0.0) return std::pow(width, alpha) / alpha;
    return (std::pow(far, alpha) - std::pow(eps, alpha)) / alpha +
           eps * (std::pow(far, alpha - 1.0) - std::pow(eps, alpha - 1.0)) / (1.0 - alpha);
}

// integral_0^t lw(xi) (tau - xi)^(alpha-2) with the lw(t-) (tau - t)^(alpha-1)/(1-alpha) term removed
double regularized_history_integral(const HistoryData& h, double alpha, double tau) {
    const auto& lw = h.lw;
    const auto br = lw.breaks();
    const auto left = lw.left_values();
    const auto right = lw.right_values();
    const std::size_t last = lw.cells() - 1;
    double s = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        const double a = br[i], b = br[i + 1];
        const double slope = (right[i] - left[i]) / (b - a);
        const auto m = kernels::power_kernel(tau - a, tau - b, alpha - 2.0);
        s += left[i] * m.zeroth + slope * m.first;
    }
    const double a = br[last], width = h.t - a;
    const double slope = (right[last] - left[last]) / width;
    const double eps = tau - h.t;
    s -= right[last] * std::pow(tau - a, alpha - 1.0) / (1.0 - alpha);
    s -= slope * last_cell_linear(eps, width, alpha);
    return s;
}

// regular part of pbar, continuous on [t, T]
double pbar_regular(const HistoryData& h, const Order& order, double T, double tau) {
    if (h.lw.empty()) return 0.0;
    const double t = h.t, L = T - t;
    const double alpha = order.alpha(), ga = order.gamma_alpha();
    const double jt = regularized_history_integral(h, alpha, tau);
    return h.lw_at_t() * std::pow(tau - t, alpha) / (L * ga) - (1.0 - alpha) * (T - tau) / (L * ga) * jt;
}

FreeTermPair make_free_terms(const Problem& problem, const HistoryData& h, const Mesh& mesh, bool rescaled) {
    const double t = h.t, T = problem.T, L = T - t;
    const double alpha = problem.order.alpha();
    FreeTermPair out;
    out.pbar.singular_coeff = rescaled ? -h.lw_at_t() * std::pow(L, alpha - 1.0) : -h.lw_at_t();
    out.qbar.singular_coeff = rescaled ? std::pow(L, alpha - 1.0) : 1.0;
    out.pbar.regular.resize(mesh.N() + 1);
    out.qbar.regular.assign(mesh.N() + 1, 0.0);
    for (std::size_t j = 0; j <= mesh.N(); ++j) {
        const double tau = j == mesh.N() ? T : (rescaled ? t + mesh[j] * L : t + mesh[j]);
        out.pbar.regular[j] = pbar_regular(h, problem.order, T, tau);
    }
    const Order order = problem.order;
    out.pbar.regular_evaluator = [h, order, T, rescaled](double u) {
        return pbar_regular(h, order, T, rescaled ? to_tau(h.t, T, u) : h.t + u);
    };
    out.qbar.regular_evaluator = [](double) { return 0.0; };
    return out;
}

SensitivityResult assemble(const Problem& problem, const HistoryData& h, SolutionPath x, const Mesh& mesh,
                           bool rescaled, const SolverOptions& options) {
    const Order& order = problem.order;
    const SensitivityCoefficients coef = coefficients(problem, x, h.t, problem.T);

    const FreeTermPair free = make_free_terms(problem, h, mesh, rescaled);
    const LinearRhs rhs[2] = {{&free.pbar, rescaled ? coef.b_resc : coef.b}, {&free.qbar, {}}};
    auto paths = solve_linear_singular_batch(mesh, order, rescaled ? coef.a_resc : coef.a, rhs, options);

    const double rho_value = x.end_value(), p_T = paths[0].end_value(), q_T = paths[1].end_value();
    return SensitivityResult{rho_value, p_T, q_T, std::move(x), std::move(paths[0]), std::move(paths[1]),
                             problem.f.kink_hits->load()};
}

}  // namespace

PbarParts pbar_parts(const HistoryData& h, const Order& order, double T, double tau) {
    if (!(tau > h.t && tau <= T)) throw DomainError("pbar: tau outside (t, T]");
    return {h.lw.empty() ? 0.0 : h.lw_at_t(), pbar_regular(h, order, T, tau)};
}

double pbar_rescaled(const HistoryData& h, const Order& order, double T, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("pbar: theta outside (0, 1]");
    if (h.lw.empty()) return 0.0;
    const double L = T - h.t;
    // theta L rather than tau - t keeps the singular part exact for tiny theta
    const double singular = -h.lw_at_t() * std::pow(theta * L, order.alpha() - 1.0) / order.gamma_alpha();
    return singular + pbar_regular(h, order, T, theta == 1.0 ? T : h.t + theta * L);
}

double qbar_rescaled(double t, double T, const Order& order, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("qbar: theta outside (0, 1]");
    return 1.0 / (order.gamma_alpha() * std::pow(theta * (T - t), 1.0 - order.alpha()));
}

double rho(const Problem& problem, const HistoryData& h, const Mesh& mesh, const SolverOptions& options) {
    return solve_nonlinear(problem, h, mesh, options).end_value();
}

FreeTermPair pbar_qbar(const Problem& problem, const HistoryData& h, const Mesh& mesh) {
    if (mesh.length() != 1.0) throw ValidationError("pbar_qbar: mesh must cover [0, 1]");
    return make_free_terms(problem, h, mesh, true);
}

SensitivityCoefficients coefficients(const Problem& problem, const SolutionPath& x, double t, double T) {
    const Mesh& mesh = x.mesh;
    const std::size_t N = mesh.N();
    const double L = T - t;
    const bool rescaled = mesh.length() == 1.0;
    const double alpha = problem.order.alpha();
    const double scale = std::pow(L, alpha);
    SensitivityCoefficients c;
    c.a.resize(N + 1);
    c.b.resize(N + 1);
    c.a_resc.resize(N + 1);
    c.b_resc.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
        const double tau = j == N ? T : (rescaled ? t + mesh[j] * L : t + mesh[j]);
        const double xv = x.values[j];
        try {
            c.a[j] = problem.f.d_x(tau, xv);
            c.b[j] = (T - tau) / L * problem.f.d_tau(tau, xv) - alpha * problem.f.value(tau, xv) / L;
        } catch (const DomainError& e) {
            throw SolverError(std::string("coefficient evaluation failed: ") + e.what());
        }
        c.a_resc[j] = scale * c.a[j];
        c.b_resc[j] = scale * c.b[j];
    }
    return c;
}

SensitivityResult ci_derivatives(const Problem& problem, const HistoryData& h, const Mesh& mesh,
                                 const SolverOptions& options) {
    SolutionPath x = solve_nonlinear(problem, h, mesh, options);
    return assemble(problem, h, std::move(x), mesh, true, options);
}

SensitivityResult ci_derivatives_direct(const Problem& problem, const HistoryData& h, const Mesh& mesh,
                                        const SolverOptions& options) {
    SolutionPath x = solve_nonlinear_direct(problem, h, mesh, options);
    return assemble(problem, h, std::move(x), mesh, false, options);
}

}  // namespace fracsens
