#include "doctest.h"

#include "fracsens/errors.hpp"
#include "fracsens/problem_model.hpp"
#include "fracsens/special_functions.hpp"
#include "support.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace fracsens;

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

// max over interior nodes of |L1 Caputo derivative - expected| on [lo, hi]
double l1_defect(const std::function<double(double)>& fn, double T, std::size_t N, double alpha, double lo,
                 double hi, const std::function<double(double)>& expected) {
    const double h = T / static_cast<double>(N);
    std::vector<double> v(N + 1);
    for (std::size_t j = 0; j <= N; ++j) v[j] = fn(h * static_cast<double>(j));
    const auto d = testing::l1_caputo(v, h, alpha);
    double worst = 0.0;
    for (std::size_t j = 1; j <= N; ++j) {
        const double tau = h * static_cast<double>(j);
        if (tau >= lo && tau <= hi) worst = std::max(worst, std::abs(d[j] - expected(tau)));
    }
    return worst;
}

}  // namespace

TEST_CASE("order caches gamma and rejects values outside (0, 1)") {
    const Order o(0.5);
    CHECK(o.gamma_alpha() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK_THROWS_AS(Order(0.0), DomainError);
    CHECK_THROWS_AS(Order(1.0), DomainError);
}

TEST_CASE("eval_history examples") {
    const Order o(0.5);
    SUBCASE("zero derivative keeps w0") {
        const HistoryData h(1.0, 3.0, PiecewiseLinear::constant(0.0, 1.0, 0.0));
        for (double tau : {0.0, 0.3, 1.0}) CHECK(eval_history(h, o, tau) == 3.0);
    }
    SUBCASE("unit derivative") {
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        CHECK(eval_history(h, o, 1.0) == doctest::Approx(2.0 * kInvSqrtPi).epsilon(1e-13));
        CHECK(eval_history(h, o, 1.0) == doctest::Approx(1.1283791671).epsilon(1e-10));
    }
    SUBCASE("linear derivative matches the monomial rule and quadrature") {
        const HistoryData h(1.0, 0.0, PiecewiseLinear({0.0, 1.0}, {0.0}, {1.0}));
        const double monomial = fracsens::gamma(2.0) / fracsens::gamma(2.5);
        boost::math::quadrature::tanh_sinh<double> q;
        const double quad =
            q.integrate([](double xi, double xc) { return xi / std::sqrt(xc > 0 ? xc : 1.0 - xi); }, 0.0, 1.0) /
            fracsens::gamma(0.5);
        CHECK(eval_history(h, o, 1.0) == doctest::Approx(monomial).epsilon(1e-13));
        CHECK(quad == doctest::Approx(monomial).epsilon(1e-10));
        CHECK(eval_history(h, o, 1.0) == doctest::Approx(0.7522527781).epsilon(1e-10));
    }
    SUBCASE("out of range") {
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        CHECK_THROWS_AS(eval_history(h, o, 1.5), DomainError);
        CHECK_THROWS_AS(eval_history(h, o, -0.1), DomainError);
    }
}

TEST_CASE("free_term_xbar examples") {
    const Order o(0.5);
    SUBCASE("zero derivative beyond t") {
        const HistoryData h(1.0, 2.5, PiecewiseLinear::constant(0.0, 1.0, 0.0));
        CHECK(free_term_xbar(h, o, 2.0, 1.7) == 2.5);
    }
    SUBCASE("continuity at t") {
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        const double at_t = free_term_xbar(h, o, 2.0, 1.0);
        CHECK(at_t == eval_history(h, o, 1.0));
        for (double eps : {1e-3, 1e-6}) {
            const double jump = 2.0 * (std::sqrt(1.0 + eps) - std::sqrt(eps) - 1.0) * kInvSqrtPi;
            CHECK(free_term_xbar(h, o, 2.0, 1.0 + eps) - at_t == doctest::Approx(jump).epsilon(1e-8));
        }
        CHECK(std::abs(free_term_xbar(h, o, 2.0, 1.0 + 1e-12) - at_t) < 2e-6);
    }
    SUBCASE("closed form beyond t") {
        // (1/Gamma(1/2)) int_0^1 (2 - xi)^(-1/2) dxi = 2 (sqrt2 - 1) / sqrtpi
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        const double expected = 2.0 * (std::sqrt(2.0) - 1.0) * kInvSqrtPi;
        CHECK(expected == doctest::Approx(0.46738995451).epsilon(1e-10));
        CHECK(free_term_xbar(h, o, 2.0, 2.0) == doctest::Approx(expected).epsilon(1e-13));
    }
    SUBCASE("point history") {
        CHECK(free_term_xbar(HistoryData::point(4.0), o, 1.0, 0.6) == 4.0);
        CHECK_THROWS_AS(free_term_xbar(HistoryData::point(4.0), o, 1.0, 1.2), DomainError);
    }
}

TEST_CASE("lambda_ell examples") {
    const Order o(0.5);
    const HistoryData h(1.0, 0.5, PiecewiseLinear::piecewise_constant({0.0, 0.4, 1.0}, std::vector{1.0, -2.0}));
    SUBCASE("zero extension is the free term") {
        for (double tau : {1.0, 1.25, 1.5, 2.0}) CHECK(lambda_ell(h, o, 2.0, 0.0, tau) == free_term_xbar(h, o, 2.0, tau));
    }
    SUBCASE("unit extension of a point history") {
        // Caputo derivative 1 on (0, 1] integrates to 1/Gamma(1.5)
        CHECK(lambda_ell(HistoryData::point(0.0), o, 1.0, 1.0, 1.0) == doctest::Approx(1.1283791671).epsilon(1e-10));
    }
    SUBCASE("restriction to [0, t] is the history") {
        for (double c : {-1.0, 2.0})
            for (int j = 0; j <= 16; ++j) {
                const double xi = j / 16.0;
                CHECK(lambda_ell(h, o, 2.0, c, xi) == eval_history(h, o, xi));
            }
    }
    SUBCASE("constant extension object agrees") {
        const auto ext = Extension::constant(h, 2.0, 1.5);
        for (double tau : {0.3, 1.0, 1.1, 1.9}) CHECK(ext.value(o, tau) == doctest::Approx(lambda_ell(h, o, 2.0, 1.5, tau)).epsilon(1e-13));
        CHECK(ext.increment(1.4) == doctest::Approx(1.5 * 0.4).epsilon(1e-14));
    }
}

TEST_CASE("rescale examples and round trip") {
    CHECK(to_theta(1.0, 2.0, 1.0) == 0.0);
    CHECK(to_theta(1.0, 2.0, 2.0) == 1.0);
    CHECK(to_theta(1.0, 2.0, 1.25) == 0.25);
    for (double tau : {0.5, 0.73, 1.1, 1.5})
        CHECK(to_tau(0.5, 1.5, to_theta(0.5, 1.5, tau)) == doctest::Approx(tau).epsilon(1e-15));
    CHECK_THROWS_AS(to_theta(1.0, 2.0, 2.5), DomainError);
    CHECK_THROWS_AS(to_tau(1.0, 2.0, -0.1), DomainError);
}

TEST_CASE("mesh invariants") {
    for (const Mesh& m : {Mesh::uniform(64), Mesh::graded(64, 4.0)}) {
        CHECK(m.N() == 64);
        CHECK(m[0] == 0.0);
        CHECK(m[64] == 1.0);
        for (std::size_t j = 1; j <= m.N(); ++j) CHECK(m[j] > m[j - 1]);
    }
    CHECK(Mesh::uniform(8)[3] == 3.0 / 8.0);
    CHECK(Mesh::graded(8, 2.0)[2] == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(Mesh::uniform(8).scaled(2.0).length() == 2.0);
    CHECK_THROWS_AS(Mesh::graded(8, 0.5), ValidationError);
}

TEST_CASE("history data invariants") {
    const HistoryData h(1.0, 0.0, PiecewiseLinear::piecewise_constant({0.0, 0.5, 1.0}, std::vector{0.3, -0.7}));
    CHECK(h.M == doctest::Approx(0.7));
    CHECK(h.lw_at_t() == -0.7);
    CHECK_THROWS_AS(HistoryData(0.0, 1.0, PiecewiseLinear::constant(0.0, 1.0, 1.0)), ValidationError);
    CHECK_THROWS_AS(HistoryData(1.0, 1.0, PiecewiseLinear::constant(0.0, 0.5, 1.0)), ValidationError);
}

TEST_CASE("representation round trip through the L1 scheme") {
    const Order o(0.5);
    const HistoryData h(1.0, 0.2, PiecewiseLinear::piecewise_constant({0.0, 0.5, 1.0}, std::vector{1.0, -0.5}));
    double prev = 1e300;
    for (std::size_t N : {256, 1024, 4096}) {
        const double hh = 1.0 / static_cast<double>(N);
        std::vector<double> v(N + 1);
        for (std::size_t j = 0; j <= N; ++j) v[j] = eval_history(h, o, std::min(1.0, hh * j));
        const auto d = testing::l1_caputo(v, hh, 0.5);
        const double e = std::max(std::abs(d[N / 4] - 1.0), std::abs(d[3 * N / 4] + 0.5));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("free term has zero Caputo derivative beyond t; lambda has derivative c") {
    const Order o(0.6);
    const double T = 2.0;
    const HistoryData h(1.0, 0.1, PiecewiseLinear::piecewise_constant({0.0, 0.4, 1.0}, std::vector{0.8, -0.3}));
    const auto xbar = [&](double tau) { return free_term_xbar(h, o, T, tau); };
    const auto lam = [&](double tau) { return lambda_ell(h, o, T, 1.5, tau); };
    const auto zero = [](double) { return 0.0; };
    const auto c = [](double) { return 1.5; };
    double prev_x = 1e300, prev_l = 1e300;
    for (std::size_t N : {512, 2048, 8192}) {
        const double ex = l1_defect(xbar, T, N, 0.6, 1.25, T, zero);
        const double el = l1_defect(lam, T, N, 0.6, 1.25, T, c);
        CHECK(ex < prev_x);
        CHECK(el < prev_l);
        prev_x = ex;
        prev_l = el;
    }
    CHECK(prev_x < 2e-3);
    CHECK(prev_l < 2e-3);
}

TEST_CASE("difference quotient of the rescaled free term obeys the weighted bound") {
    const Order o(0.5);
    const double t = 1.0, T = 2.0, eta = (T - t) / 2.0;
    const HistoryData h(t, 0.0, PiecewiseLinear::piecewise_constant({0.0, 0.6, 1.0}, std::vector{1.0, -1.0}));
    for (double c : {-2.0, 0.0, 1.0}) {
        const auto ext = Extension::constant(h, T, c);
        const double bound = (h.M + std::abs(c)) / (o.gamma_alpha() * std::pow(eta, 0.5));
        for (double tau : {1.01, 1.1, 1.3, 1.5}) {
            const HistoryData ht = ext.restrict_to(tau);
            for (double theta : {0.01, 0.1, 0.4, 0.8, 1.0}) {
                const double now = free_term_xbar(ht, o, T, tau + theta * (T - tau));
                const double base = free_term_xbar(h, o, T, t + theta * (T - t));
                CHECK(std::abs(now - base) / (tau - t) <= bound / std::pow(theta, 0.5));
            }
        }
    }
}

TEST_CASE("scalar field from an expression carries both partials") {
    const auto f = ScalarField::from_expression("tau * sin(x)");
    CHECK(f.value(2.0, 0.5) == doctest::Approx(2.0 * std::sin(0.5)));
    CHECK(f.d_tau(2.0, 0.5) == doctest::Approx(std::sin(0.5)));
    CHECK(f.d_x(2.0, 0.5) == doctest::Approx(2.0 * std::cos(0.5)));
    CHECK_THROWS_AS(ScalarField::from_expression("y + 1"), UnknownIdentifier);
}
