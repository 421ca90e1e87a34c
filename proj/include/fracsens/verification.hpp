#pragma once

#include "fracsens/problem_model.hpp"
#include "fracsens/sensitivity.hpp"
#include "fracsens/volterra.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace fracsens::verification {

// Offsets tau - t for the difference quotients, strictly decreasing.
struct FdSchedule {
    std::vector<double> steps;
    std::vector<double> ell_values;

    // 2^-k (T - t) / 4 for k = k_first..k_last
    static FdSchedule geometric(double t, double T, int k_first = 2, int k_last = 10,
                                std::vector<double> ell_values = {-1.0, 0.0, 1.0, 2.0});
    void validate(double t, double T) const;
};

// Number of worker threads: FRAC_SENS_THREADS if set, otherwise the hardware count.
std::size_t thread_budget();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

struct Extrapolation {
    double limit = 0.0;
    double tol = 0.0;           // |L_K - L_{K-1}| plus the fit residual
    double fit_residual = 0.0;  // max |model - data|
    std::vector<double> exponents;
};

// Fits values ~ L + sum c_i step^{g_i} with g from {k alpha + m} (the first `terms` positive ones).
Extrapolation richardson(std::span<const double> steps, std::span<const double> values, double alpha,
                         std::size_t terms = 5);

enum class CalibratedQuantity {
    State,        // nodal x errors
    Sensitivity,  // errors of p(T) and q(T)
};

// max over N = 256..4096 of the error times N^(1+alpha): nodal x on the quadratic manufactured problem,
// or p(T), q(T) on that problem and (relative) on x' = x, x(0) = 1
double calibration_constant(double alpha, CalibratedQuantity quantity = CalibratedQuantity::State);
// 10 C N^-(1+alpha), scaled by max(1, |scale|)
double tol_solver(double C, double alpha, std::size_t N, double scale = 1.0);

struct FdResult {
    double ell = 0.0;
    std::vector<double> steps;
    std::vector<double> quotients;
    Extrapolation extrapolation;
};

// Difference quotients along the constant-derivative extension; every solve uses `mesh`.
FdResult fd_directional(const Problem& problem, const HistoryData& h, double ell, const FdSchedule& schedule,
                        const Mesh& mesh, const SolverOptions& options = {});

// l(xi) = sign(sin(frequency (xi - t))) on [t, T], as exact cells between the zeros.
PiecewiseLinear sign_sine_extension(double t, double T, double frequency);

struct CiResidualReport {
    std::vector<double> steps;
    std::vector<double> residuals;
    std::vector<double> ratios;  // residual / step
    double slope = 0.0;          // least-squares slope of log residual against log step
    double p_T = 0.0;
    double q_T = 0.0;
};

// p(T), q(T) and every rho solve use `mesh`.
CiResidualReport ci_residual(const Problem& problem, const HistoryData& h, const Extension& extension,
                             const FdSchedule& schedule, const Mesh& mesh, const SolverOptions& options = {});

struct FreeTermReport {
    std::vector<double> thetas;
    std::vector<double> steps;
    // indexed [step][theta]
    std::vector<std::vector<double>> pointwise;
    std::vector<std::vector<double>> pointwise_majorant;
    std::vector<std::vector<double>> weighted;
    std::vector<std::vector<double>> weighted_majorant;
    bool majorant_holds = true;
};

FreeTermReport free_term_limits(const Problem& problem, const HistoryData& h, double ell,
                                const FdSchedule& schedule, std::span<const double> thetas);

struct AppendixReport {
    double alpha = 0.0;
    double theta_star = 0.0;
    double threshold = 0.0;  // admissible theta_star lie below this
    int i_star = 0;
    double eps_star = 0.0;
    std::vector<int> indices;
    std::vector<double> h_even;  // h(1/(2i)!)
    std::vector<double> h_odd;   // h(1/(2i-1)!)
    std::vector<double> gaps;
    double min_gap = 0.0;
    std::vector<double> theta_samples;
    std::vector<double> scaled_pbar;  // theta^(1-alpha) pbar(theta) from the history below
    double pbar_bound = 0.0;
};

double appendix_threshold(double alpha);
// h(theta) = integral_0^{1/theta} l(theta u) (1 + u)^(alpha - 2) du, by exact block antiderivatives;
// max_block > 0 drops the blocks beyond that index
double appendix_h(double alpha, double theta_star, double theta, int max_block = 0);
// The alternating history on [0, 1] (t = 1), blocks through index max_block.
HistoryData appendix_history(double alpha, double theta_star, int max_block = 12);
// theta_star <= 0 selects 0.8 times the threshold
AppendixReport appendix_example(const Order& order, std::pair<int, int> i_range, double theta_star = 0.0);

struct SemigroupReport {
    double split_tau = 0.0;
    double direct = 0.0;
    double restarted = 0.0;
    double difference = 0.0;
};

// Restarts at the mesh node nearest to t + fraction (T - t), with the history extended by f along the path.
SemigroupReport semigroup(const Problem& problem, const HistoryData& h, const Mesh& mesh, double fraction = 0.5,
                          const SolverOptions& options = {});

struct RescalingReport {
    double rho_rescaled = 0.0, rho_direct = 0.0;
    double p_rescaled = 0.0, p_direct = 0.0;
    double q_rescaled = 0.0, q_direct = 0.0;
    double max_difference = 0.0;
};

// Rescaled solves on `rescaled_mesh` against direct solves on a graded mesh of [0, T - t]
// with the same number of cells.
RescalingReport rescaling_agreement(const Problem& problem, const HistoryData& h, const Mesh& rescaled_mesh,
                                    double direct_grading, const SolverOptions& options = {});

// Max nodal residual of the linear equation written for y, with the integral evaluated by the
// product rules applied to the reconstructed y.
double substitution_residual(const Mesh& mesh, const Order& order, std::span<const double> c,
                             const SingularFreeTerm& ybar, std::span<const double> d, const SolutionPath& path,
                             const SolverOptions& options = {});

struct LipschitzReport {
    std::vector<double> steps;
    std::vector<double> differences;
    std::vector<double> ratios;  // difference / step^(1+alpha)
    double mu = 0.0;             // fitted on the two largest steps
    bool stable = true;
};

// Compares ell = 0 with ell = +amp then -amp (equal integrals) on each offset.
LipschitzReport lipschitz_check(const Problem& problem, const HistoryData& h, double amplitude,
                                const FdSchedule& schedule, const Mesh& mesh, const SolverOptions& options = {});

}  // namespace fracsens::verification
