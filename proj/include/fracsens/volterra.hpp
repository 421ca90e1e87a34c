#pragma once

#include "fracsens/problem_model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracsens {

enum class Corrector { Newton, FixedPoint };

struct SolverOptions {
    Corrector corrector = Corrector::Newton;
    double fixed_point_tol = 1e-12;
    int fixed_point_max_iter = 50;
    // Starting-weight correction of the two-sided kernel rule for the leading
    // fractional powers k*alpha < 1 of the regularized unknown.
    bool starting_weights = true;
};

struct GrowthReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max |f| / (gamma (1 + |x|)) over visited nodes
};

struct SingularRepr {
    std::vector<double> s;     // s(0) = 0
    std::vector<double> ybar;  // free term at the nodes; ybar[0] is not representable (NaN)
};

struct SolutionPath {
    Mesh mesh;
    std::vector<double> values;  // values[0] is NaN for singular solutions
    std::optional<SingularRepr> singular;
    std::vector<double> rhs;  // f(tau_j, x_j) for nonlinear solves
    GrowthReport growth;

    double end_value() const { return values.back(); }
};

// ybar(theta) = singular_coeff * theta^(alpha-1) / Gamma(alpha) + regular(theta).
struct SingularFreeTerm {
    double singular_coeff = 0.0;
    std::vector<double> regular;                    // node values, regular[0] is the limit at 0
    std::function<double(double)> regular_evaluator;  // optional, used off-mesh

    double value(const Order& order, double theta, std::size_t node) const;
};

struct LinearVolterraProblem {
    Mesh mesh;
    Order order;
    std::vector<double> c;
    std::vector<double> d;
    SingularFreeTerm ybar;
};

// The rescaled equation on [0, 1]; mesh must have length 1.
SolutionPath solve_nonlinear(const Problem& problem, const HistoryData& history, const Mesh& mesh,
                             const SolverOptions& options = {});

// The unscaled equation on [t, T]; mesh offsets from t, length T - t.
SolutionPath solve_nonlinear_direct(const Problem& problem, const HistoryData& history, const Mesh& mesh,
                                    const SolverOptions& options = {});

SolutionPath solve_linear_singular(const LinearVolterraProblem& lp, const SolverOptions& options = {});

struct LinearRhs {
    const SingularFreeTerm* ybar;
    std::span<const double> d;  // empty means d = 0
};

// Several right-hand sides sharing mesh, order and coefficient c.
std::vector<SolutionPath> solve_linear_singular_batch(const Mesh& mesh, const Order& order,
                                                      std::span<const double> c,
                                                      std::span<const LinearRhs> rhs,
                                                      const SolverOptions& options = {});

// Right-hand side of the fractional Gronwall estimate on [0, 1] for
// y <= yhat / (Gamma(alpha) theta^(1-alpha)) + ybar_r + (c / Gamma(alpha)) I(y).
std::vector<double> gronwall_bound(double yhat, std::span<const double> ybar_regular, double c,
                                   const Mesh& mesh, const Order& order);

// Product integration weights, exposed for the residual checks.
class AbelWeights {
public:
    AbelWeights(const Mesh& mesh, double alpha);
    // w[0..n] such that sum w_j g_j = integral_0^{u_n} g_lin(z) (u_n - z)^(alpha-1) dz
    void trapezoid(std::size_t n, std::vector<double>& w) const;
    // w[0..n-1], g held at the left end of each cell
    void rectangle(std::size_t n, std::vector<double>& w) const;

private:
    const Mesh* mesh_;
    double alpha_;
    std::vector<double> m0_, left_, right_;  // uniform tables by distance n - j
};

class TwoSidedWeights {
public:
    TwoSidedWeights(const Mesh& mesh, double alpha, bool starting_weights);
    // w[0..n] for integral_0^{u_n} g_lin(z) z^(alpha-1) (u_n - z)^(alpha-1) dz
    void trapezoid(std::size_t n, std::vector<double>& w) const;

private:
    void raw(std::size_t n, std::vector<double>& w) const;
    const Mesh* mesh_;
    double alpha_;
    bool starting_;
    std::vector<double> exponents_;
    std::vector<std::vector<double>> powers_;  // powers_[i][j] = u_j^exponents_[i]
    int gauss_points_ = 8;
    std::vector<double> table_;  // uniform: (m + x_k)^(alpha-1), row-major by m
};

}  // namespace fracsens
