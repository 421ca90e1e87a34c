#include "fracsens/verification.hpp"

#include "fracsens/errors.hpp"
#include "fracsens/special_functions.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

namespace fracsens::verification {

namespace {

// Least squares by modified Gram-Schmidt on unit-scaled columns; returns the coefficients.
std::vector<double> least_squares(std::vector<std::vector<double>> cols, std::vector<double> rhs) {
    const std::size_t k = cols.size();
    std::vector<double> scale(k);
    for (std::size_t j = 0; j < k; ++j) {
        double n = 0.0;
        for (double v : cols[j]) n += v * v;
        scale[j] = std::sqrt(n);
        if (scale[j] == 0.0) throw SolverError("richardson: degenerate design matrix");
        for (double& v : cols[j]) v /= scale[j];
    }
    std::vector<std::vector<double>> R(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            double dot = 0.0;
            for (std::size_t r = 0; r < rhs.size(); ++r) dot += cols[i][r] * cols[j][r];
            R[i][j] = dot;
            for (std::size_t r = 0; r < rhs.size(); ++r) cols[j][r] -= dot * cols[i][r];
        }
        double n = 0.0;
        for (double v : cols[j]) n += v * v;
        R[j][j] = std::sqrt(n);
        if (R[j][j] < 1e-14) throw SolverError("richardson: design matrix is rank deficient");
        for (double& v : cols[j]) v /= R[j][j];
    }
    std::vector<double> qtb(k);
    for (std::size_t j = 0; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t r = 0; r < rhs.size(); ++r) dot += cols[j][r] * rhs[r];
        qtb[j] = dot;
    }
    std::vector<double> x(k);
    for (std::size_t j = k; j-- > 0;) {
        double s = qtb[j];
        for (std::size_t i = j + 1; i < k; ++i) s -= R[j][i] * x[i];
        x[j] = s / R[j][j];
    }
    for (std::size_t j = 0; j < k; ++j) x[j] /= scale[j];
    return x;
}

std::vector<double> expansion_exponents(double alpha, std::size_t count) {
    std::vector<double> g;
    for (int k = 0; k <= 8; ++k)
        for (int m = 0; m <= 4; ++m) {
            const double e = k * alpha + m;
            if (e <= 0.0) continue;
            if (std::none_of(g.begin(), g.end(), [&](double x) { return std::abs(x - e) < 1e-9; })) g.push_back(e);
        }
    std::sort(g.begin(), g.end());
    g.resize(std::min(count, g.size()));
    return g;
}

struct Fit {
    double limit;
    double residual;
};

Fit fit_with(std::span<const double> steps, std::span<const double> values, std::span<const double> exps) {
    std::vector<std::vector<double>> cols;
    cols.emplace_back(steps.size(), 1.0);
    for (double g : exps) {
        std::vector<double> c(steps.size());
        for (std::size_t i = 0; i < steps.size(); ++i) c[i] = std::pow(steps[i], g);
        cols.push_back(std::move(c));
    }
    const auto design = cols;
    const auto coef = least_squares(cols, {values.begin(), values.end()});
    double res = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        double model = 0.0;
        for (std::size_t j = 0; j < coef.size(); ++j) model += coef[j] * design[j][i];
        res = std::max(res, std::abs(model - values[i]));
    }
    return {coef[0], res};
}

// (ln of) 1/i!
double log_factorial_node(int i) { return -std::lgamma(static_cast<double>(i) + 1.0); }

// integral_a^b (1 + u)^(alpha - 2) du
double block_integral(double alpha, double a, double b) {
    if (!(b > a)) return 0.0;
    if (std::isinf(b)) return std::pow(1.0 + a, alpha - 1.0) / (1.0 - alpha);
    const double diff = std::log1p(b) - std::log1p(a);
    return std::pow(1.0 + a, alpha - 1.0) * -std::expm1((alpha - 1.0) * diff) / (1.0 - alpha);
}

double solve_rho(const Problem& problem, const HistoryData& h, const Mesh& mesh, const SolverOptions& options) {
    return solve_nonlinear(problem, h, mesh, options).end_value();
}

}  // namespace

FdSchedule FdSchedule::geometric(double t, double T, int k_first, int k_last, std::vector<double> ell_values) {
    if (k_first > k_last) throw ValidationError("schedule: empty exponent range");
    FdSchedule s;
    for (int k = k_first; k <= k_last; ++k) s.steps.push_back(std::ldexp(T - t, -k) / 4.0);
    s.ell_values = std::move(ell_values);
    s.validate(t, T);
    return s;
}

void FdSchedule::validate(double t, double T) const {
    if (steps.empty()) throw ValidationError("schedule: no offsets");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i] > 0.0 && steps[i] < T - t)) throw ValidationError("schedule: offset outside (0, T - t)");
        if (i > 0 && !(steps[i] < steps[i - 1])) throw ValidationError("schedule: offsets must strictly decrease");
    }
}

std::size_t thread_budget() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRAC_SENS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

Extrapolation richardson(std::span<const double> steps, std::span<const double> values, double alpha,
                         std::size_t terms) {
    if (steps.size() != values.size()) throw ValidationError("richardson: size mismatch");
    terms = std::min(terms, steps.size() >= 3 ? steps.size() - 2 : std::size_t{0});
    Extrapolation out;
    if (terms == 0) {
        out.limit = values.empty() ? 0.0 : values.back();
        out.tol = values.size() >= 2 ? std::abs(values.back() - values[values.size() - 2]) : 0.0;
        return out;
    }
    out.exponents = expansion_exponents(alpha, terms);
    const Fit full = fit_with(steps, values, out.exponents);
    const Fit reduced = fit_with(steps, values, std::span(out.exponents).first(terms - 1));
    out.limit = full.limit;
    out.fit_residual = full.residual;
    out.tol = std::abs(full.limit - reduced.limit) + full.residual;
    return out;
}

double calibration_constant(double alpha, CalibratedQuantity quantity) {
    const Order order(alpha);
    const double g = gamma(3.0 - alpha);
    auto f = ScalarField::from_functions(
        [=](double tau, double) { return 2.0 * std::pow(tau, 2.0 - alpha) / g; },
        [=](double tau, double) { return 2.0 * (2.0 - alpha) * std::pow(tau, 1.0 - alpha) / g; },
        [](double, double) { return 0.0; }, "manufactured");
    const Problem problem(order, 1.0, f, 2.0);
    // exact sensitivities: p(1) = -f(0) q(1) = 0 and q(1) = 1 / Gamma(alpha)
    const double q_exact = 1.0 / order.gamma_alpha();
    // x' = x from x(0) = 1 exercises the linear solver with a nonzero coefficient:
    // q(1) = E_{alpha,alpha}(1) and p(1) = -x(0) q(1)
    const Problem linear(order, 1.0,
                         ScalarField::from_functions([](double, double x) { return x; },
                                                     [](double, double) { return 0.0; },
                                                     [](double, double) { return 1.0; }, "linear"),
                         1.0);
    const double q_linear = mittag_leffler({alpha, alpha}, 1.0);
    double C = 0.0;
    for (std::size_t N = 256; N <= 4096; N *= 2) {
        double err = 0.0;
        if (quantity == CalibratedQuantity::State) {
            const auto path = solve_nonlinear(problem, HistoryData::point(0.0), Mesh::uniform(N));
            for (std::size_t j = 0; j <= N; ++j) {
                const double u = path.mesh[j];
                err = std::max(err, std::abs(path.values[j] - u * u));
            }
        } else {
            const auto r = ci_derivatives(problem, HistoryData::point(0.0), Mesh::uniform(N));
            err = std::max(std::abs(r.p_T), std::abs(r.q_T - q_exact));
            const auto l = ci_derivatives(linear, HistoryData::point(1.0), Mesh::uniform(N));
            err = std::max({err, std::abs(l.q_T - q_linear) / q_linear, std::abs(l.p_T + q_linear) / q_linear});
        }
        C = std::max(C, err * std::pow(static_cast<double>(N), 1.0 + alpha));
    }
    return C;
}

double tol_solver(double C, double alpha, std::size_t N, double scale) {
    return 10.0 * C * std::pow(static_cast<double>(N), -(1.0 + alpha)) * std::max(1.0, std::abs(scale));
}

FdResult fd_directional(const Problem& problem, const HistoryData& h, double ell, const FdSchedule& schedule,
                        const Mesh& mesh, const SolverOptions& options) {
    schedule.validate(h.t, problem.T);
    const double base = solve_rho(problem, h, mesh, options);
    const Extension ext = Extension::constant(h, problem.T, ell);
    FdResult out;
    out.ell = ell;
    out.steps = schedule.steps;
    out.quotients.resize(schedule.steps.size());
    parallel_for(schedule.steps.size(), [&](std::size_t i) {
        const double d = schedule.steps[i];
        const double r = solve_rho(problem, ext.restrict_to(h.t + d), mesh, options);
        out.quotients[i] = (r - base) / d;
    });
    out.extrapolation = richardson(out.steps, out.quotients, problem.order.alpha());
    return out;
}

PiecewiseLinear sign_sine_extension(double t, double T, double frequency) {
    if (!(frequency > 0.0) || !(T > t)) throw ValidationError("sign_sine_extension: need frequency > 0 and T > t");
    const double half = std::numbers::pi / frequency;
    std::vector<double> breaks{t};
    std::vector<double> values;
    for (std::size_t m = 1;; ++m) {
        const double z = t + static_cast<double>(m) * half;
        values.push_back(m % 2 ? 1.0 : -1.0);
        if (z >= T * (1.0 - 1e-15)) {
            breaks.push_back(T);
            break;
        }
        breaks.push_back(z);
    }
    return PiecewiseLinear::piecewise_constant(std::move(breaks), values);
}

CiResidualReport ci_residual(const Problem& problem, const HistoryData& h, const Extension& extension,
                             const FdSchedule& schedule, const Mesh& mesh, const SolverOptions& options) {
    schedule.validate(h.t, problem.T);
    const auto sens = ci_derivatives(problem, h, mesh, options);
    const double base = solve_rho(problem, h, mesh, options);
    CiResidualReport out;
    out.p_T = sens.p_T;
    out.q_T = sens.q_T;
    out.steps = schedule.steps;
    out.residuals.resize(schedule.steps.size());
    parallel_for(schedule.steps.size(), [&](std::size_t i) {
        const double d = schedule.steps[i];
        const double tau = h.t + d;
        const double r = solve_rho(problem, extension.restrict_to(tau), mesh, options);
        out.residuals[i] = std::abs(r - base - sens.p_T * d - sens.q_T * extension.increment(tau));
    });
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < out.steps.size(); ++i) {
        out.ratios.push_back(out.residuals[i] / out.steps[i]);
        if (out.residuals[i] > 0.0) {
            const double x = std::log(out.steps[i]), y = std::log(out.residuals[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
    }
    // identically vanishing residuals count as arbitrarily fast decay
    out.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::numeric_limits<double>::infinity();
    return out;
}

FreeTermReport free_term_limits(const Problem& problem, const HistoryData& h, double ell,
                                const FdSchedule& schedule, std::span<const double> thetas) {
    schedule.validate(h.t, problem.T);
    const Order& order = problem.order;
    const double alpha = order.alpha(), ga = order.gamma_alpha();
    const double t = h.t, T = problem.T, L = T - t;
    const double M = std::max(h.M, h.lw.empty() ? 0.0 : h.lw.max_abs());
    const double lead = (M + 2.0 * std::abs(ell)) / ga;
    const double bab = beta_fn(alpha, alpha);
    const Extension ext = Extension::constant(h, T, ell);

    FreeTermReport out;
    out.thetas.assign(thetas.begin(), thetas.end());
    out.steps = schedule.steps;
    const std::size_t S = schedule.steps.size(), P = thetas.size();
    out.pointwise.assign(S, std::vector<double>(P));
    out.pointwise_majorant = out.weighted = out.weighted_majorant = out.pointwise;
    std::vector<char> ok(S, 1);

    parallel_for(S, [&](std::size_t i) {
        const double d = schedule.steps[i];
        const double tau = t + d;
        const HistoryData moved = ext.restrict_to(tau);
        auto z = [&](double zeta) {
            const double now = free_term_xbar(moved, order, T, tau + zeta * (T - tau));
            const double before = free_term_xbar(h, order, T, t + zeta * L);
            const double expected = pbar_rescaled(h, order, T, zeta) + qbar_rescaled(t, T, order, zeta) * ell;
            return std::abs((now - before) / d - expected);
        };
        auto majorant = [&](double zeta) {
            return lead * (std::pow(zeta * (T - tau), alpha - 1.0) - std::pow(d + zeta * (T - tau), alpha - 1.0));
        };
        boost::math::quadrature::tanh_sinh<double> quad;
        const double kappa = d / (T - tau);
        for (std::size_t k = 0; k < P; ++k) {
            const double th = thetas[k];
            out.pointwise[i][k] = z(th);
            out.pointwise_majorant[i][k] = majorant(th);
            out.weighted[i][k] = quad.integrate(
                [&](double zeta, double dist) {
                    if (!(zeta > 0.0)) return 0.0;
                    const double gap = dist > 0.0 && zeta > 0.5 * th ? dist : th - zeta;
                    return z(zeta) * std::pow(gap, alpha - 1.0);
                },
                0.0, th, 1e-9);
            out.weighted_majorant[i][k] = lead / std::pow(T - tau, 1.0 - alpha) *
                                          (bab * std::pow(th, 2.0 * alpha - 1.0) -
                                           bab * std::pow(th + kappa, 2.0 * alpha - 1.0) +
                                           std::pow(kappa, alpha) / (alpha * std::pow(th, 1.0 - alpha)));
            const double pm = out.pointwise_majorant[i][k], wm = out.weighted_majorant[i][k];
            if (out.pointwise[i][k] > pm * (1.0 + 1e-9) + 1e-12) ok[i] = 0;
            if (out.weighted[i][k] > wm * (1.0 + 1e-6) + 1e-9) ok[i] = 0;
        }
    });
    out.majorant_holds = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
    return out;
}

double appendix_threshold(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("appendix: alpha must lie in (0, 1)");
    return 1.0 / (std::pow(3.0, 1.0 / (1.0 - alpha)) - 1.0);
}

double appendix_h(double alpha, double theta_star, double theta, int max_block) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("appendix: theta outside (0, 1]");
    if (!(theta_star > 0.0 && theta_star <= 1.0)) throw DomainError("appendix: theta_star outside (0, 1]");
    const double upper = 1.0 / theta;
    const double log_scale = -std::log(theta_star * theta);
    double sum = 0.0;
    // blocks with even index carry the value 1
    for (int i = 2; i <= 170; i += 2) {
        if (max_block > 0 && i > max_block) break;
        const double hi = std::min(std::exp(log_factorial_node(i) + log_scale), upper);
        const double lo = std::exp(log_factorial_node(i + 1) + log_scale);
        if (lo >= upper) continue;
        const double part = block_integral(alpha, lo, hi);
        sum += part;
        if (hi < 1e-20 * sum) break;
    }
    return sum;
}

HistoryData appendix_history(double alpha, double theta_star, int max_block) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("appendix: alpha must lie in (0, 1)");
    if (!(theta_star > 0.0 && theta_star <= 1.0)) throw DomainError("appendix: theta_star outside (0, 1]");
    if (max_block < 2 || max_block > 16) throw ValidationError("appendix: max_block must lie in [2, 16]");
    // s = 1 - xi runs over (0, 1]; block i covers s in (1/((i+1)! theta*), 1/(i! theta*)]
    auto edge = [&](int i) { return std::exp(log_factorial_node(i) - std::log(theta_star)); };
    int first = 1;
    while (edge(first + 1) >= 1.0) ++first;
    std::vector<double> breaks{0.0};
    std::vector<double> values;
    for (int i = first; i <= max_block; ++i) {
        values.push_back(i % 2 == 0 ? 1.0 : 0.0);
        breaks.push_back(1.0 - edge(i + 1));
    }
    values.push_back(0.0);
    breaks.push_back(1.0);
    return HistoryData(1.0, 0.0, PiecewiseLinear::piecewise_constant(std::move(breaks), values));
}

AppendixReport appendix_example(const Order& order, std::pair<int, int> i_range, double theta_star) {
    const double alpha = order.alpha();
    if (i_range.first < 1 || i_range.second < i_range.first) throw ValidationError("appendix: bad index range");
    if (i_range.second > 8) throw RangeError("appendix: index range beyond 8 is not supported");
    AppendixReport out;
    out.alpha = alpha;
    out.threshold = appendix_threshold(alpha);
    out.theta_star = theta_star > 0.0 ? theta_star : 0.8 * out.threshold;
    if (!(out.theta_star < out.threshold) || out.theta_star > 1.0)
        throw ValidationError("appendix: theta_star violates the admissibility condition");
    const double ts = out.theta_star;

    const double tail = 2.0 * block_integral(alpha, 1.0 / ts, std::numeric_limits<double>::infinity());
    for (int i = 1; i < 10'000'000; ++i) {
        if (!(std::exp(log_factorial_node(2 * i - 1)) < ts)) continue;
        const double eps = block_integral(alpha, 1.0 / ((2.0 * i + 1.0) * ts), 1.0 / ts) - tail -
                           block_integral(alpha, 0.0, 1.0 / (2.0 * i * ts));
        if (eps > 0.0) {
            out.i_star = i;
            out.eps_star = eps;
            break;
        }
    }

    out.min_gap = std::numeric_limits<double>::infinity();
    for (int i = i_range.first; i <= i_range.second; ++i) {
        const double even = appendix_h(alpha, ts, std::exp(log_factorial_node(2 * i)));
        const double odd = appendix_h(alpha, ts, std::exp(log_factorial_node(2 * i - 1)));
        out.indices.push_back(i);
        out.h_even.push_back(even);
        out.h_odd.push_back(odd);
        out.gaps.push_back(std::abs(even - odd));
        out.min_gap = std::min(out.min_gap, out.gaps.back());
    }

    const HistoryData hist = appendix_history(alpha, ts);
    const double T = 2.0;
    out.pbar_bound = hist.M / (order.gamma_alpha() * std::pow(T - hist.t, 1.0 - alpha));
    for (int j = 1; j <= 8; ++j) {
        const double node = std::exp(log_factorial_node(j));
        for (double theta : {node, 0.5 * node}) {
            out.theta_samples.push_back(theta);
            out.scaled_pbar.push_back(std::pow(theta, 1.0 - alpha) * pbar_rescaled(hist, order, T, theta));
        }
    }
    return out;
}

SemigroupReport semigroup(const Problem& problem, const HistoryData& h, const Mesh& mesh, double fraction,
                          const SolverOptions& options) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("semigroup: fraction must lie in (0, 1)");
    const auto path = solve_nonlinear(problem, h, mesh, options);
    const double t = h.t, L = problem.T - t;
    const auto u = mesh.nodes();
    std::size_t split = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(mesh.N())));
    split = std::clamp<std::size_t>(split, 1, mesh.N() - 1);

    // the Caputo derivative of the solution is f along it; interpolate linearly between nodes
    std::vector<double> breaks(split + 1), left(split), right(split);
    for (std::size_t j = 0; j <= split; ++j) breaks[j] = t + u[j] * L;
    for (std::size_t j = 0; j < split; ++j) {
        left[j] = path.rhs[j];
        right[j] = path.rhs[j + 1];
    }
    const PiecewiseLinear tail(std::move(breaks), std::move(left), std::move(right));
    const HistoryData moved(t + u[split] * L, h.w0, h.lw.joined(tail));
    const double restarted = solve_nonlinear(problem, moved, mesh, options).end_value();
    return {moved.t, path.end_value(), restarted, std::abs(restarted - path.end_value())};
}

RescalingReport rescaling_agreement(const Problem& problem, const HistoryData& h, const Mesh& rescaled_mesh,
                                    double direct_grading, const SolverOptions& options) {
    const auto resc = ci_derivatives(problem, h, rescaled_mesh, options);
    const auto direct = ci_derivatives_direct(
        problem, h, Mesh::graded(rescaled_mesh.N(), direct_grading, problem.T - h.t), options);
    RescalingReport out{resc.rho, direct.rho, resc.p_T, direct.p_T, resc.q_T, direct.q_T, 0.0};
    out.max_difference = std::max({std::abs(resc.rho - direct.rho), std::abs(resc.p_T - direct.p_T),
                                   std::abs(resc.q_T - direct.q_T)});
    return out;
}

double substitution_residual(const Mesh& mesh, const Order& order, std::span<const double> c,
                             const SingularFreeTerm& ybar, std::span<const double> d, const SolutionPath& path,
                             const SolverOptions& options) {
    const std::size_t N = mesh.N();
    const double alpha = order.alpha(), ga = order.gamma_alpha();
    if (c.size() != N + 1 || path.values.size() != N + 1) throw ValidationError("residual: size mismatch");
    const AbelWeights abel(mesh, alpha);
    const TwoSidedWeights two(mesh, alpha, options.starting_weights);
    const auto u = mesh.nodes();

    // s from the reconstructed y; s(0) = 0 by construction
    std::vector<double> s(N + 1, 0.0);
    for (std::size_t j = 1; j <= N; ++j)
        s[j] = std::pow(u[j], 1.0 - alpha) * (path.values[j] - ybar.value(order, u[j], j));

    double worst = 0.0;
    std::vector<double> wt, wa;
    for (std::size_t n = 1; n <= N; ++n) {
        two.trapezoid(n, wt);
        abel.trapezoid(n, wa);
        double singular = 0.0, regular = 0.0, corrected = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            singular += wt[j] * c[j];
            regular += wa[j] * (c[j] * ybar.regular[j] + (d.empty() ? 0.0 : d[j]));
            corrected += wt[j] * c[j] * s[j];
        }
        const double integral = ybar.singular_coeff / ga * singular + regular + corrected;
        const double res = path.values[n] - ybar.value(order, u[n], n) - integral / ga;
        worst = std::max(worst, std::pow(u[n], 1.0 - alpha) * std::abs(res));
    }
    return worst;
}

LipschitzReport lipschitz_check(const Problem& problem, const HistoryData& h, double amplitude,
                                const FdSchedule& schedule, const Mesh& mesh, const SolverOptions& options) {
    schedule.validate(h.t, problem.T);
    const double t = h.t, T = problem.T, alpha = problem.order.alpha();
    const Extension flat = Extension::constant(h, T, 0.0);
    LipschitzReport out;
    out.steps = schedule.steps;
    out.differences.resize(schedule.steps.size());
    parallel_for(schedule.steps.size(), [&](std::size_t i) {
        const double d = schedule.steps[i];
        const double mid = t + 0.5 * d;
        const Extension swing(h, PiecewiseLinear::piecewise_constant({t, mid, T}, std::vector{amplitude, -amplitude}));
        const double a = solve_rho(problem, flat.restrict_to(t + d), mesh, options);
        const double b = solve_rho(problem, swing.restrict_to(t + d), mesh, options);
        out.differences[i] = std::abs(a - b);
    });
    for (std::size_t i = 0; i < out.steps.size(); ++i)
        out.ratios.push_back(out.differences[i] / std::pow(out.steps[i], 1.0 + alpha));
    out.mu = 2.0 * *std::max_element(out.ratios.begin(), out.ratios.begin() + std::min<std::size_t>(2, out.ratios.size()));
    out.stable = std::all_of(out.ratios.begin(), out.ratios.end(), [&](double r) { return r <= out.mu; });
    return out;
}

}  // namespace fracsens::verification
