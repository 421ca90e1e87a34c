#include "fracsens/problem_model.hpp"

#include "fracsens/errors.hpp"
#include "fracsens/kernels.hpp"
#include "fracsens/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fracsens {

namespace {

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

Order::Order(double alpha) : alpha_(alpha), gamma_alpha_(0.0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("order alpha must lie in (0, 1)");
    gamma_alpha_ = gamma(alpha);
}

// ---- PiecewiseLinear ----

PiecewiseLinear::PiecewiseLinear(std::vector<double> breaks, std::vector<double> left,
                                 std::vector<double> right)
    : breaks_(std::move(breaks)), left_(std::move(left)), right_(std::move(right)) {
    if (left_.size() != right_.size() || (breaks_.size() != left_.size() + 1 && !(breaks_.empty() && left_.empty())))
        throw ValidationError("piecewise function: breaks must have one more entry than values");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
        if (!(breaks_[i + 1] > breaks_[i])) throw ValidationError("piecewise function: breaks must increase");
    for (double v : breaks_) require_finite(v, "break point");
    for (double v : left_) require_finite(v, "piecewise value");
    for (double v : right_) require_finite(v, "piecewise value");
}

PiecewiseLinear PiecewiseLinear::constant(double a, double b, double value) {
    return PiecewiseLinear({a, b}, {value}, {value});
}

PiecewiseLinear PiecewiseLinear::piecewise_constant(std::vector<double> breaks, std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    return PiecewiseLinear(std::move(breaks), v, v);
}

PiecewiseLinear PiecewiseLinear::sampled(double a, double b, std::size_t cells,
                                         const std::function<double(double)>& fn) {
    if (cells == 0) throw ValidationError("sampled function needs at least one cell");
    std::vector<double> br(cells + 1), vals(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        br[i] = i == cells ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
        vals[i] = fn(br[i]);
    }
    std::vector<double> left(vals.begin(), vals.end() - 1), right(vals.begin() + 1, vals.end());
    return PiecewiseLinear(std::move(br), std::move(left), std::move(right));
}

PiecewiseLinear PiecewiseLinear::sampled_constant(double a, double b, std::size_t cells,
                                                  const std::function<double(double)>& fn) {
    if (cells == 0) throw ValidationError("sampled function needs at least one cell");
    std::vector<double> br(cells + 1), vals(cells);
    for (std::size_t i = 0; i <= cells; ++i)
        br[i] = i == cells ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) vals[i] = fn(0.5 * (br[i] + br[i + 1]));
    return piecewise_constant(std::move(br), vals);
}

double PiecewiseLinear::value(double xi) const {
    if (empty()) throw DomainError("value of an empty function");
    if (xi < lower() || xi > upper()) throw DomainError("piecewise function evaluated outside its domain");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), xi);
    std::size_t i = static_cast<std::size_t>(it - breaks_.begin());
    i = std::clamp<std::size_t>(i, 1, left_.size()) - 1;
    const double a = breaks_[i], b = breaks_[i + 1];
    return left_[i] + (right_[i] - left_[i]) * (xi - a) / (b - a);
}

double PiecewiseLinear::max_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < left_.size(); ++i) m = std::max({m, std::abs(left_[i]), std::abs(right_[i])});
    return m;
}

double PiecewiseLinear::integral(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < left_.size(); ++i) {
        const double a = breaks_[i], b = breaks_[i + 1];
        const double l = std::max(a, lo), r = std::min(b, hi);
        if (!(r > l)) continue;
        const double slope = (right_[i] - left_[i]) / (b - a);
        const double vl = left_[i] + slope * (l - a), vr = left_[i] + slope * (r - a);
        s += 0.5 * (vl + vr) * (r - l);
    }
    return s;
}

double PiecewiseLinear::kernel_integral(double tau, double beta, double upto) const {
    const double hi = std::min(upto, tau);
    double s = 0.0;
    for (std::size_t i = 0; i < left_.size(); ++i) {
        const double a = breaks_[i];
        if (a >= hi) break;
        const double b = breaks_[i + 1];
        const double end = std::min(b, hi);
        const double slope = (right_[i] - left_[i]) / (b - a);
        const auto m = kernels::power_kernel(tau - a, tau - end, beta);
        s += left_[i] * m.zeroth + slope * m.first;
    }
    return s;
}

PiecewiseLinear PiecewiseLinear::clipped(double hi) const {
    std::vector<double> br{breaks_.front()}, l, r;
    for (std::size_t i = 0; i < left_.size(); ++i) {
        const double a = breaks_[i], b = breaks_[i + 1];
        if (a >= hi) break;
        l.push_back(left_[i]);
        if (b <= hi) {
            br.push_back(b);
            r.push_back(right_[i]);
        } else {
            br.push_back(hi);
            r.push_back(left_[i] + (right_[i] - left_[i]) * (hi - a) / (b - a));
            break;
        }
    }
    return PiecewiseLinear(std::move(br), std::move(l), std::move(r));
}

PiecewiseLinear PiecewiseLinear::joined(const PiecewiseLinear& other) const {
    if (empty()) return other;
    if (other.empty()) return *this;
    if (!close_to(other.lower(), upper())) throw ValidationError("joined functions must share an endpoint");
    std::vector<double> br = breaks_, l = left_, r = right_;
    br.insert(br.end(), other.breaks_.begin() + 1, other.breaks_.end());
    l.insert(l.end(), other.left_.begin(), other.left_.end());
    r.insert(r.end(), other.right_.begin(), other.right_.end());
    return PiecewiseLinear(std::move(br), std::move(l), std::move(r));
}

// ---- HistoryData ----

HistoryData::HistoryData(double t_, double w0_, PiecewiseLinear lw_, double margin)
    : t(t_), w0(w0_), lw(std::move(lw_)) {
    require_finite(t, "t");
    require_finite(w0, "w0");
    if (t < 0.0) throw ValidationError("history time t must be nonnegative");
    if (!(margin >= 0.0)) throw ValidationError("bound margin must be nonnegative");
    if (t == 0.0) {
        if (!lw.empty()) throw ValidationError("history with t = 0 must have an empty lw");
    } else {
        if (lw.empty()) throw ValidationError("history with t > 0 needs lw on [0, t]");
        if (lw.lower() != 0.0 || !close_to(lw.upper(), t))
            throw ValidationError("lw must be defined exactly on [0, t]");
    }
    M = lw.max_abs() + margin;
}

double HistoryData::lw_at_t() const { return lw.empty() ? 0.0 : lw.right_values().back(); }

double eval_history(const HistoryData& h, const Order& order, double tau) {
    if (!(tau >= 0.0 && tau <= h.t)) throw DomainError("eval_history: tau outside [0, t]");
    if (h.lw.empty()) return h.w0;
    return h.w0 + h.lw.kernel_integral(tau, order.alpha() - 1.0, tau) / order.gamma_alpha();
}

double free_term_xbar(const HistoryData& h, const Order& order, double T, double tau) {
    if (!(tau >= 0.0 && tau <= T)) throw DomainError("free_term_xbar: tau outside [0, T]");
    if (h.lw.empty()) return h.w0;
    return h.w0 + h.lw.kernel_integral(tau, order.alpha() - 1.0, std::min(tau, h.t)) / order.gamma_alpha();
}

double lambda_ell(const HistoryData& h, const Order& order, double T, double c, double tau) {
    if (!(tau >= 0.0 && tau <= T)) throw DomainError("lambda_ell: tau outside [0, T]");
    if (tau <= h.t) return eval_history(h, order, tau);
    // I^alpha of the constant c over (t, tau]
    return free_term_xbar(h, order, T, tau) + c * std::pow(tau - h.t, order.alpha()) / (order.alpha() * order.gamma_alpha());
}

// ---- Extension ----

Extension::Extension(HistoryData base_, PiecewiseLinear ell_) : base(std::move(base_)), ell(std::move(ell_)) {
    if (ell.empty() || !close_to(ell.lower(), base.t))
        throw ValidationError("extension must start at the history time t");
}

Extension Extension::constant(const HistoryData& base, double T, double c) {
    if (!(T > base.t)) throw ValidationError("extension horizon must exceed t");
    return Extension(base, PiecewiseLinear::constant(base.t, T, c));
}

double Extension::value(const Order& order, double tau) const {
    if (tau <= base.t) return eval_history(base, order, tau);
    if (tau > ell.upper()) throw DomainError("extension evaluated beyond its horizon");
    double s = ell.kernel_integral(tau, order.alpha() - 1.0, tau);
    if (!base.lw.empty()) s += base.lw.kernel_integral(tau, order.alpha() - 1.0, base.t);
    return base.w0 + s / order.gamma_alpha();
}

HistoryData Extension::restrict_to(double tau) const {
    if (!(tau >= base.t && tau <= ell.upper())) throw DomainError("restriction time outside [t, T]");
    if (tau == base.t) return base;
    const PiecewiseLinear tail = ell.clipped(tau);
    HistoryData h(tau, base.w0, base.lw.joined(tail));
    h.M = std::max(base.M, tail.max_abs());
    return h;
}

double Extension::increment(double tau) const { return ell.integral(base.t, tau); }

// ---- Mesh ----

Mesh::Mesh(std::vector<double> nodes, bool uniform, double grading)
    : nodes_(std::move(nodes)), uniform_(uniform), grading_(grading) {}

Mesh Mesh::uniform(std::size_t N, double length) {
    if (N < 1) throw ValidationError("mesh needs at least one cell");
    if (!(length > 0.0)) throw ValidationError("mesh length must be positive");
    std::vector<double> nodes(N + 1);
    for (std::size_t j = 0; j <= N; ++j) nodes[j] = length * static_cast<double>(j) / static_cast<double>(N);
    nodes[N] = length;
    return Mesh(std::move(nodes), true, 1.0);
}

Mesh Mesh::graded(std::size_t N, double r, double length) {
    if (N < 1) throw ValidationError("mesh needs at least one cell");
    if (!(r >= 1.0)) throw ValidationError("grading exponent must be at least 1");
    std::vector<double> nodes(N + 1);
    for (std::size_t j = 0; j <= N; ++j)
        nodes[j] = length * std::pow(static_cast<double>(j) / static_cast<double>(N), r);
    nodes[N] = length;
    return Mesh(std::move(nodes), r == 1.0, r);
}

Mesh Mesh::scaled(double length) const {
    if (uniform_) return uniform(N(), length);
    return graded(N(), grading_, length);
}

double rescale(double t, double T, RescaleDirection direction, double value) {
    if (!(T > t)) throw DomainError("rescale: need t < T");
    if (direction == RescaleDirection::ToTheta) {
        if (!(value >= t && value <= T)) throw DomainError("rescale: tau outside [t, T]");
        return (value - t) / (T - t);
    }
    if (!(value >= 0.0 && value <= 1.0)) throw DomainError("rescale: theta outside [0, 1]");
    if (value == 1.0) return T;
    return t + value * (T - t);
}

// ---- ScalarField / Problem ----

ScalarField ScalarField::from_expression(std::string_view src) {
    const std::vector<std::string> vars{"tau", "x"};
    auto value = std::make_shared<expr::Ast>(expr::parse(src, vars));
    auto dtau = std::make_shared<expr::Ast>(expr::differentiate(*value, "tau"));
    auto dx = std::make_shared<expr::Ast>(expr::differentiate(*value, "x"));
    ScalarField f;
    auto hits = f.kink_hits;
    auto eval = [hits](const std::shared_ptr<expr::Ast>& ast) {
        return [ast, hits](double tau, double x) {
            const std::array<double, 2> b{tau, x};
            expr::EvalDiagnostics diag;
            const double v = expr::evaluate(*ast, b, &diag);
            if (diag.abs_subgradient_hits) *hits += diag.abs_subgradient_hits;
            return v;
        };
    };
    f.value = eval(value);
    f.d_tau = eval(dtau);
    f.d_x = eval(dx);
    f.description = std::string(src);
    return f;
}

ScalarField ScalarField::from_functions(Fn value, Fn d_tau, Fn d_x, std::string description) {
    ScalarField f;
    f.value = std::move(value);
    f.d_tau = std::move(d_tau);
    f.d_x = std::move(d_x);
    f.description = std::move(description);
    return f;
}

Problem::Problem(Order order_, double T_, ScalarField f_, double growth_gamma_)
    : order(order_), T(T_), f(std::move(f_)), growth_gamma(growth_gamma_) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be positive");
    if (!(growth_gamma >= 0.0) || !std::isfinite(growth_gamma))
        throw ValidationError("growth_gamma must be nonnegative");
    if (!f.value || !f.d_tau || !f.d_x) throw ValidationError("right-hand side needs value and both partials");
}

}  // namespace fracsens
