#pragma once

#include "fracsens/expr.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracsens {

class Order {
public:
    explicit Order(double alpha);
    double alpha() const { return alpha_; }
    double gamma_alpha() const { return gamma_alpha_; }
    double one_minus_alpha() const { return 1.0 - alpha_; }

private:
    double alpha_;
    double gamma_alpha_;
};

// Piecewise-linear function on consecutive cells [b_i, b_{i+1}]; values may
// jump between cells. Piecewise-constant data is the case left == right.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> breaks, std::vector<double> left, std::vector<double> right);

    static PiecewiseLinear constant(double a, double b, double value);
    static PiecewiseLinear piecewise_constant(std::vector<double> breaks, std::span<const double> values);
    // Continuous interpolant of fn sampled at `cells + 1` equispaced nodes.
    static PiecewiseLinear sampled(double a, double b, std::size_t cells,
                                   const std::function<double(double)>& fn);
    // Cell-midpoint samples of fn, held constant per cell.
    static PiecewiseLinear sampled_constant(double a, double b, std::size_t cells,
                                            const std::function<double(double)>& fn);

    bool empty() const { return left_.empty(); }
    std::size_t cells() const { return left_.size(); }
    double lower() const { return breaks_.front(); }
    double upper() const { return breaks_.back(); }
    std::span<const double> breaks() const { return breaks_; }
    std::span<const double> left_values() const { return left_; }
    std::span<const double> right_values() const { return right_; }

    double value(double xi) const;
    double max_abs() const;
    // Exact integral of the function over [lo, hi] intersected with its domain.
    double integral(double lo, double hi) const;
    // integral over [lower, min(upto, tau)] of value(xi) (tau - xi)^beta.
    double kernel_integral(double tau, double beta, double upto) const;

    PiecewiseLinear clipped(double hi) const;
    // Concatenation; other.lower() must equal upper().
    PiecewiseLinear joined(const PiecewiseLinear& other) const;

private:
    std::vector<double> breaks_;
    std::vector<double> left_;
    std::vector<double> right_;
};

// Initial pair (t, w): w(0) = w0 and the Caputo derivative lw of w on [0, t].
struct HistoryData {
    double t = 0.0;
    double w0 = 0.0;
    PiecewiseLinear lw;
    double M = 0.0;

    HistoryData() = default;
    HistoryData(double t, double w0, PiecewiseLinear lw, double margin = 0.0);

    static HistoryData point(double w0) { return HistoryData(0.0, w0, {}); }
    // Left limit of lw at t (zero for an empty history).
    double lw_at_t() const;
};

double eval_history(const HistoryData& h, const Order& order, double tau);
double free_term_xbar(const HistoryData& h, const Order& order, double T, double tau);
double lambda_ell(const HistoryData& h, const Order& order, double T, double c, double tau);

// History extended beyond t by a prescribed Caputo derivative on [t, T].
struct Extension {
    HistoryData base;
    PiecewiseLinear ell;

    Extension(HistoryData base, PiecewiseLinear ell);
    static Extension constant(const HistoryData& base, double T, double c);

    double value(const Order& order, double tau) const;
    // The extension seen as history data on [0, tau].
    HistoryData restrict_to(double tau) const;
    // integral_t^tau ell
    double increment(double tau) const;
};

class Mesh {
public:
    static Mesh uniform(std::size_t N, double length = 1.0);
    // nodes length * (j/N)^r
    static Mesh graded(std::size_t N, double r, double length = 1.0);

    std::size_t N() const { return nodes_.size() - 1; }
    std::span<const double> nodes() const { return nodes_; }
    double operator[](std::size_t j) const { return nodes_[j]; }
    double length() const { return nodes_.back(); }
    bool is_uniform() const { return uniform_; }
    double grading() const { return grading_; }
    Mesh scaled(double length) const;

private:
    Mesh(std::vector<double> nodes, bool uniform, double grading);
    std::vector<double> nodes_;
    bool uniform_;
    double grading_;
};

enum class RescaleDirection { ToTheta, ToTau };

double rescale(double t, double T, RescaleDirection direction, double value);
inline double to_theta(double t, double T, double tau) { return rescale(t, T, RescaleDirection::ToTheta, tau); }
inline double to_tau(double t, double T, double theta) { return rescale(t, T, RescaleDirection::ToTau, theta); }

// f(tau, x) with both partial derivatives.
struct ScalarField {
    using Fn = std::function<double(double, double)>;
    Fn value;
    Fn d_tau;
    Fn d_x;
    std::string description;
    // Count of evaluations where a derivative of abs(...) hit its kink.
    std::shared_ptr<std::atomic<std::size_t>> kink_hits = std::make_shared<std::atomic<std::size_t>>(0);

    static ScalarField from_expression(std::string_view src);
    static ScalarField from_functions(Fn value, Fn d_tau, Fn d_x, std::string description = {});
};

struct Problem {
    Order order;
    double T;
    ScalarField f;
    double growth_gamma;

    Problem(Order order, double T, ScalarField f, double growth_gamma);
};

}  // namespace fracsens
