#pragma once

#include "fracsens/problem_model.hpp"
#include "fracsens/volterra.hpp"

#include <vector>

namespace fracsens {

struct SensitivityCoefficients {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> a_resc;  // (T - t)^alpha * a
    std::vector<double> b_resc;
};

struct FreeTermPair {
    SingularFreeTerm pbar;
    SingularFreeTerm qbar;
};

struct SensitivityResult {
    double rho = 0.0;
    double p_T = 0.0;  // time derivative of order alpha
    double q_T = 0.0;  // state derivative of order alpha
    SolutionPath x_path;
    SolutionPath p_path;
    SolutionPath q_path;
    std::size_t kink_warnings = 0;
};

// Free term of the p equation at tau in (t, T]:
// pbar(tau) = -lw(t-) (tau - t)^(alpha-1) / Gamma(alpha) + regular(tau).
struct PbarParts {
    double lw_at_t;
    double regular;
};
PbarParts pbar_parts(const HistoryData& h, const Order& order, double T, double tau);

// Rescaled pbar at theta in (0, 1].
double pbar_rescaled(const HistoryData& h, const Order& order, double T, double theta);
double qbar_rescaled(double t, double T, const Order& order, double theta);

double rho(const Problem& problem, const HistoryData& h, const Mesh& mesh, const SolverOptions& options = {});

// Rescaled free terms on a mesh of [0, 1].
FreeTermPair pbar_qbar(const Problem& problem, const HistoryData& h, const Mesh& mesh);

SensitivityCoefficients coefficients(const Problem& problem, const SolutionPath& x, double t, double T);

SensitivityResult ci_derivatives(const Problem& problem, const HistoryData& h, const Mesh& mesh,
                                 const SolverOptions& options = {});

// Cross-check: the unscaled equations on [t, T]; mesh covers [0, T - t].
SensitivityResult ci_derivatives_direct(const Problem& problem, const HistoryData& h, const Mesh& mesh,
                                        const SolverOptions& options = {});

}  // namespace fracsens
