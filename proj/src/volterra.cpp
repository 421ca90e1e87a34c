#include "fracsens/volterra.hpp"

#include "fracsens/errors.hpp"
#include "fracsens/kernels.hpp"
#include "fracsens/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fracsens {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kNearCells = 4;
constexpr std::size_t kMaxStartingExponents = 4;
constexpr double kMinExponentGap = 0.15;

// Dense solve with partial pivoting; a is row-major m x m, b overwritten with x.
void solve_small(std::vector<double>& a, std::vector<double>& b, std::size_t m) {
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
        if (a[piv * m + col] == 0.0) throw SolverError("singular starting-weight system");
        if (piv != col) {
            for (std::size_t k = 0; k < m; ++k) std::swap(a[col * m + k], a[piv * m + k]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r * m + col] / a[col * m + col];
            for (std::size_t k = col; k < m; ++k) a[r * m + k] -= f * a[col * m + k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= a[i * m + k] * b[k];
        b[i] = s / a[i * m + i];
    }
}

struct NonlinearRhs {
    std::function<double(double)> tau_of;  // mesh coordinate -> tau
    const ScalarField* f;
};

SolutionPath solve_abel_nonlinear(const Problem& problem, const Mesh& mesh, double kfac,
                                  const NonlinearRhs& rhs, std::vector<double> xbar,
                                  const SolverOptions& options) {
    const std::size_t N = mesh.N();
    const double alpha = problem.order.alpha();
    const AbelWeights weights(mesh, alpha);
    const auto& f = *rhs.f;

    std::vector<double> x(N + 1), F(N + 1);
    std::vector<double> tau(N + 1);
    for (std::size_t j = 0; j <= N; ++j) tau[j] = rhs.tau_of(mesh[j]);

    GrowthReport growth;
    auto eval_f = [&](std::size_t j, double xv) {
        try {
            return f.value(tau[j], xv);
        } catch (const DomainError& e) {
            throw SolverError("right-hand side failed at tau = " + std::to_string(tau[j]) + ": " + e.what());
        }
    };
    auto eval_fx = [&](std::size_t j, double xv) {
        try {
            return f.d_x(tau[j], xv);
        } catch (const DomainError& e) {
            throw SolverError("partial derivative failed at tau = " + std::to_string(tau[j]) + ": " + e.what());
        }
    };
    auto accept = [&](std::size_t j) {
        F[j] = eval_f(j, x[j]);
        if (!std::isfinite(F[j])) throw SolverError("non-finite right-hand side at node " + std::to_string(j));
        ++growth.checked;
        const double cap = problem.growth_gamma * (1.0 + std::abs(x[j]));
        const double ratio = cap > 0.0 ? std::abs(F[j]) / cap : (F[j] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        growth.worst_ratio = std::max(growth.worst_ratio, ratio);
        if (std::abs(F[j]) > cap * (1.0 + 1e-12)) ++growth.violations;
    };

    x[0] = xbar[0];
    accept(0);
    std::vector<double> trap, rect;
    for (std::size_t n = 1; n <= N; ++n) {
        weights.trapezoid(n, trap);
        weights.rectangle(n, rect);
        double hist = 0.0, pred_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            hist += trap[j] * F[j];
            pred_sum += rect[j] * F[j];
        }
        const double ann = trap[n];
        const double pred = xbar[n] + kfac * pred_sum;
        double xn = pred;
        bool done = false;
        if (options.corrector == Corrector::Newton) {
            const double g = pred - xbar[n] - kfac * (hist + ann * eval_f(n, pred));
            const double dg = 1.0 - kfac * ann * eval_fx(n, pred);
            if (std::isfinite(g) && std::isfinite(dg) && std::abs(dg) > 1e-12) {
                xn = pred - g / dg;
                done = std::isfinite(xn);
            }
        }
        if (!done) {
            xn = pred;
            int it = 0;
            for (;; ++it) {
                const double next = xbar[n] + kfac * (hist + ann * eval_f(n, xn));
                const double step = std::abs(next - xn);
                xn = next;
                if (!std::isfinite(xn)) throw SolverError("fixed-point iterate diverged at node " + std::to_string(n));
                if (step <= options.fixed_point_tol * std::max(1.0, std::abs(xn))) break;
                if (it + 1 >= options.fixed_point_max_iter)
                    throw SolverError("corrector did not converge at node " + std::to_string(n));
            }
        }
        x[n] = xn;
        accept(n);
    }
    SolutionPath path{mesh, std::move(x), std::nullopt, std::move(F), growth};
    return path;
}

}  // namespace

// ---- AbelWeights ----

AbelWeights::AbelWeights(const Mesh& mesh, double alpha) : mesh_(&mesh), alpha_(alpha) {
    if (!mesh.is_uniform()) return;
    const std::size_t N = mesh.N();
    const double h = mesh.length() / static_cast<double>(N);
    const double scale = std::pow(h, alpha);
    m0_.assign(N + 1, 0.0);
    left_.assign(N + 1, 0.0);
    right_.assign(N + 1, 0.0);
    for (std::size_t k = 1; k <= N; ++k) {
        const auto m = kernels::power_kernel(static_cast<double>(k), static_cast<double>(k - 1), alpha - 1.0);
        m0_[k] = scale * m.zeroth;
        right_[k] = scale * m.first;
        left_[k] = scale * (m.zeroth - m.first);
    }
}

void AbelWeights::trapezoid(std::size_t n, std::vector<double>& w) const {
    w.assign(n + 1, 0.0);
    if (!m0_.empty()) {
        for (std::size_t j = 0; j < n; ++j) {
            w[j] += left_[n - j];
            w[j + 1] += right_[n - j];
        }
        return;
    }
    const auto u = mesh_->nodes();
    for (std::size_t j = 0; j < n; ++j) {
        const auto m = kernels::power_kernel(u[n] - u[j], u[n] - u[j + 1], alpha_ - 1.0);
        const double r = m.first / (u[j + 1] - u[j]);
        w[j] += m.zeroth - r;
        w[j + 1] += r;
    }
}

void AbelWeights::rectangle(std::size_t n, std::vector<double>& w) const {
    w.assign(n, 0.0);
    if (!m0_.empty()) {
        for (std::size_t j = 0; j < n; ++j) w[j] = m0_[n - j];
        return;
    }
    const auto u = mesh_->nodes();
    for (std::size_t j = 0; j < n; ++j)
        w[j] = kernels::power_kernel(u[n] - u[j], u[n] - u[j + 1], alpha_ - 1.0).zeroth;
}

// ---- TwoSidedWeights ----

TwoSidedWeights::TwoSidedWeights(const Mesh& mesh, double alpha, bool starting_weights)
    : mesh_(&mesh), alpha_(alpha), starting_(starting_weights) {
    const std::size_t N = mesh.N();
    if (starting_) {
        // Fractional powers k alpha below 1 + alpha, plus 1 and zeta. A power within
        // kMinExponentGap of 1 makes the system nearly singular, so zeta is dropped then.
        exponents_ = {0.0};
        bool crowded = false;
        for (int k = 1; exponents_.size() < kMaxStartingExponents + 1; ++k) {
            const double g = k * alpha;
            if (g >= 1.0 + alpha - 1e-9) break;
            if (std::abs(g - 1.0) <= 1e-9) continue;
            crowded = crowded || std::abs(g - 1.0) < kMinExponentGap;
            exponents_.push_back(g);
        }
        if (!crowded) exponents_.push_back(1.0);
        std::sort(exponents_.begin(), exponents_.end());
        const auto u = mesh.nodes();
        for (double g : exponents_) {
            std::vector<double> p(N + 1);
            for (std::size_t j = 0; j <= N; ++j) p[j] = g == 0.0 ? 1.0 : std::pow(u[j], g);
            powers_.push_back(std::move(p));
        }
    }
    if (mesh.is_uniform()) {
        const auto& rule = kernels::gauss_legendre(gauss_points_);
        const auto K = static_cast<std::size_t>(gauss_points_);
        table_.resize(N * K);
        for (std::size_t m = 0; m < N; ++m)
            for (std::size_t k = 0; k < K; ++k)
                table_[m * K + k] = std::pow(static_cast<double>(m) + rule.nodes[k], alpha - 1.0);
    }
}

void TwoSidedWeights::raw(std::size_t n, std::vector<double>& w) const {
    w.assign(n + 1, 0.0);
    const auto u = mesh_->nodes();
    if (!table_.empty()) {
        const double h = mesh_->length() / static_cast<double>(mesh_->N());
        const double scale = std::pow(h, 2.0 * alpha_ - 1.0);
        const auto& rule = kernels::gauss_legendre(gauss_points_);
        const auto K = static_cast<std::size_t>(gauss_points_);
        const double theta = static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            double b0, b1;
            const std::size_t mirror = n - 1 - j;
            if (j >= kNearCells && mirror >= kNearCells) {
                const double* left = &table_[j * K];
                const double* right = &table_[mirror * K];
                b0 = 0.0;
                b1 = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    const double v = rule.weights[k] * left[k] * right[K - 1 - k];
                    b0 += v;
                    b1 += rule.nodes[k] * v;
                }
            } else {
                const auto m = kernels::two_sided(static_cast<double>(j), static_cast<double>(j + 1), theta, alpha_);
                b0 = m.zeroth;
                b1 = m.first;
            }
            w[j] += scale * (b0 - b1);
            w[j + 1] += scale * b1;
        }
        return;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto m = kernels::two_sided(u[j], u[j + 1], u[n], alpha_);
        const double r = m.first / (u[j + 1] - u[j]);
        w[j] += m.zeroth - r;
        w[j + 1] += r;
    }
}

void TwoSidedWeights::trapezoid(std::size_t n, std::vector<double>& w) const {
    raw(n, w);
    if (!starting_ || n == 0 || exponents_.empty()) return;
    // correction weights on nodes 0..m-1 for the m smallest exponents
    const std::size_t m = std::min(exponents_.size(), n + 1);
    const auto u = mesh_->nodes();
    const double un = u[n];
    std::vector<double> a(m * m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double g = exponents_[i];
        const double scale = std::pow(un, g);
        const double exact = beta_fn(g + alpha_, alpha_) * std::pow(un, g + 2.0 * alpha_ - 1.0);
        double approx = 0.0;
        for (std::size_t j = 0; j <= n; ++j) approx += w[j] * powers_[i][j];
        b[i] = (exact - approx) / scale;
        for (std::size_t k = 0; k < m; ++k) a[i * m + k] = powers_[i][k] / scale;
    }
    solve_small(a, b, m);
    for (std::size_t k = 0; k < m; ++k) w[k] += b[k];
}

// ---- free term ----

double SingularFreeTerm::value(const Order& order, double theta, std::size_t node) const {
    const double reg = regular_evaluator ? regular_evaluator(theta) : regular.at(node);
    if (singular_coeff == 0.0) return reg;
    return singular_coeff * std::pow(theta, order.alpha() - 1.0) / order.gamma_alpha() + reg;
}

// ---- solvers ----

SolutionPath solve_nonlinear(const Problem& problem, const HistoryData& history, const Mesh& mesh,
                             const SolverOptions& options) {
    if (mesh.N() < 8) throw ValidationError("solve_nonlinear: mesh needs at least 8 cells");
    if (mesh.length() != 1.0) throw ValidationError("solve_nonlinear: mesh must cover [0, 1]");
    const double t = history.t, T = problem.T;
    if (!(T > t)) throw ValidationError("solve_nonlinear: need t < T");
    const Order& order = problem.order;
    std::vector<double> xbar(mesh.N() + 1);
    for (std::size_t j = 0; j <= mesh.N(); ++j) xbar[j] = free_term_xbar(history, order, T, to_tau(t, T, mesh[j]));
    const double kfac = std::pow(T - t, order.alpha()) / order.gamma_alpha();
    NonlinearRhs rhs{[t, T](double theta) { return to_tau(t, T, theta); }, &problem.f};
    return solve_abel_nonlinear(problem, mesh, kfac, rhs, std::move(xbar), options);
}

SolutionPath solve_nonlinear_direct(const Problem& problem, const HistoryData& history, const Mesh& mesh,
                                    const SolverOptions& options) {
    const double t = history.t, T = problem.T;
    if (!(T > t)) throw ValidationError("solve_nonlinear_direct: need t < T");
    if (std::abs(mesh.length() - (T - t)) > 1e-12 * (T - t))
        throw ValidationError("solve_nonlinear_direct: mesh must cover [0, T - t]");
    const Order& order = problem.order;
    std::vector<double> xbar(mesh.N() + 1);
    for (std::size_t j = 0; j <= mesh.N(); ++j)
        xbar[j] = free_term_xbar(history, order, T, j == mesh.N() ? T : t + mesh[j]);
    NonlinearRhs rhs{[t, T, L = mesh.length()](double u) { return u == L ? T : t + u; }, &problem.f};
    return solve_abel_nonlinear(problem, mesh, 1.0 / order.gamma_alpha(), rhs, std::move(xbar), options);
}

std::vector<SolutionPath> solve_linear_singular_batch(const Mesh& mesh, const Order& order,
                                                      std::span<const double> c,
                                                      std::span<const LinearRhs> rhs,
                                                      const SolverOptions& options) {
    const std::size_t N = mesh.N();
    const double alpha = order.alpha(), ga = order.gamma_alpha();
    if (c.size() != N + 1) throw ValidationError("linear solve: coefficient array does not match the mesh");
    for (double v : c)
        if (!std::isfinite(v)) throw ValidationError("linear solve: non-finite coefficient");
    for (const auto& r : rhs) {
        if (!r.ybar || r.ybar->regular.size() != N + 1)
            throw ValidationError("linear solve: free term does not match the mesh");
        if (!r.d.empty() && r.d.size() != N + 1)
            throw ValidationError("linear solve: inhomogeneity does not match the mesh");
        if (!std::isfinite(r.ybar->singular_coeff))
            throw SolverError("singular-weight bound violated: non-finite singular coefficient");
        for (double v : r.ybar->regular)
            if (!std::isfinite(v))
                throw SolverError("singular-weight bound violated: free term is not O(theta^(alpha-1))");
        for (double v : r.d)
            if (!std::isfinite(v)) throw ValidationError("linear solve: non-finite inhomogeneity");
    }

    const AbelWeights abel(mesh, alpha);
    const TwoSidedWeights two(mesh, alpha, options.starting_weights);
    const std::size_t R = rhs.size();
    const auto u = mesh.nodes();

    // regular integrand c r + d per right-hand side
    std::vector<std::vector<double>> g(R, std::vector<double>(N + 1));
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t j = 0; j <= N; ++j)
            g[r][j] = c[j] * rhs[r].ybar->regular[j] + (rhs[r].d.empty() ? 0.0 : rhs[r].d[j]);

    std::vector<std::vector<double>> s(R, std::vector<double>(N + 1, 0.0));
    std::vector<std::vector<double>> cs(R, std::vector<double>(N + 1, 0.0));  // c_j s_j
    std::vector<double> wt, wa;
    for (std::size_t n = 1; n <= N; ++n) {
        two.trapezoid(n, wt);
        abel.trapezoid(n, wa);
        const double lift = std::pow(u[n], 1.0 - alpha) / ga;
        double sc = 0.0;
        for (std::size_t j = 0; j <= n; ++j) sc += wt[j] * c[j];
        const double denom = 1.0 - lift * wt[n] * c[n];
        if (!(std::abs(denom) > 1e-14)) throw SolverError("linear solve: implicit step is singular");
        for (std::size_t r = 0; r < R; ++r) {
            double reg = 0.0, known = 0.0;
            for (std::size_t j = 0; j <= n; ++j) reg += wa[j] * g[r][j];
            for (std::size_t j = 0; j < n; ++j) known += wt[j] * cs[r][j];
            const double sbar = lift * (rhs[r].ybar->singular_coeff / ga * sc + reg);
            s[r][n] = (sbar + lift * known) / denom;
            cs[r][n] = c[n] * s[r][n];
            if (!std::isfinite(s[r][n])) throw SolverError("linear solve: non-finite iterate");
        }
    }

    std::vector<SolutionPath> out;
    out.reserve(R);
    for (std::size_t r = 0; r < R; ++r) {
        const auto& fb = *rhs[r].ybar;
        std::vector<double> ybar(N + 1), y(N + 1);
        ybar[0] = fb.singular_coeff == 0.0 ? fb.regular[0] : kNaN;
        y[0] = ybar[0];
        for (std::size_t j = 1; j <= N; ++j) {
            ybar[j] = fb.singular_coeff * std::pow(u[j], alpha - 1.0) / ga + fb.regular[j];
            y[j] = ybar[j] + s[r][j] / std::pow(u[j], 1.0 - alpha);
        }
        SolutionPath p{mesh, std::move(y), SingularRepr{std::move(s[r]), std::move(ybar)}, {}, {}};
        out.push_back(std::move(p));
    }
    return out;
}

SolutionPath solve_linear_singular(const LinearVolterraProblem& lp, const SolverOptions& options) {
    const LinearRhs rhs{&lp.ybar, lp.d};
    auto paths = solve_linear_singular_batch(lp.mesh, lp.order, lp.c, std::span(&rhs, 1), options);
    return std::move(paths.front());
}

std::vector<double> gronwall_bound(double yhat, std::span<const double> ybar_regular, double c,
                                   const Mesh& mesh, const Order& order) {
    if (!(c >= 0.0) || !(yhat >= 0.0)) throw DomainError("gronwall_bound: c and yhat must be nonnegative");
    if (mesh.length() != 1.0) throw ValidationError("gronwall_bound: mesh must cover [0, 1]");
    const std::size_t N = mesh.N();
    if (ybar_regular.size() != N + 1) throw ValidationError("gronwall_bound: array does not match the mesh");
    for (double v : ybar_regular)
        if (!(v >= 0.0)) throw DomainError("gronwall_bound: regular free term must be nonnegative");
    const double alpha = order.alpha();
    const double e = mittag_leffler({alpha, alpha}, c);
    const AbelWeights abel(mesh, alpha);
    std::vector<double> out(N + 1), w;
    for (std::size_t n = 0; n <= N; ++n) {
        double integral = 0.0;
        if (n > 0) {
            abel.trapezoid(n, w);
            for (std::size_t j = 0; j <= n; ++j) integral += w[j] * ybar_regular[j];
        }
        double singular = 0.0;
        if (yhat > 0.0)
            singular = n == 0 ? std::numeric_limits<double>::infinity()
                              : e * yhat / std::pow(mesh[n], 1.0 - alpha);
        out[n] = singular + ybar_regular[n] + c * e * integral;
    }
    return out;
}

}  // namespace fracsens
