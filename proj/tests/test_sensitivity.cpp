#include "doctest.h"

#include "fracsens/sensitivity.hpp"
#include "fracsens/special_functions.hpp"
#include "fracsens/verification.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace fracsens;

namespace {
const double kE05 = 5.0089800807622835;
const double kE0505 = 5.5731696643100398;
}  // namespace

TEST_CASE("rho examples") {
    SUBCASE("constant solution") {
        const Problem p(Order(0.5), 1.0, ScalarField::from_expression("0"), 0.0);
        CHECK(rho(p, HistoryData(0.0, -1.25, {}), Mesh::uniform(64)) == -1.25);
    }
    SUBCASE("history integral only") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("0"), 0.0);
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        // I^alpha of 1 over (0, 1] seen from tau = 2: ((2)^a - 1^a) / Gamma(a + 1)
        const double expected = (std::sqrt(2.0) - 1.0) / fracsens::gamma(1.5);
        CHECK(rho(p, h, Mesh::uniform(256)) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(expected == doctest::Approx(0.46738995451).epsilon(1e-10));
    }
    SUBCASE("linear autonomous") {
        const Problem p(Order(0.5), 1.0, ScalarField::from_expression("x"), 1.0);
        CHECK(testing::rel_err(rho(p, HistoryData::point(1.0), Mesh::uniform(4096)), kE05) <= 5e-3);
    }
}

TEST_CASE("free terms") {
    SUBCASE("no history derivative gives pbar = 0") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("x"), 1.0);
        const HistoryData h(1.0, 0.3, PiecewiseLinear::constant(0.0, 1.0, 0.0));
        const Mesh m = Mesh::uniform(128);
        const auto ft = pbar_qbar(p, h, m);
        for (std::size_t j = 1; j <= 128; ++j) CHECK(ft.pbar.value(p.order, m[j], j) == 0.0);
    }
    SUBCASE("qbar closed form") {
        CHECK(qbar_rescaled(0.0, 1.0, Order(0.5), 0.25) == doctest::Approx(1.1283791671).epsilon(1e-10));
        const Order o(0.4);
        double prev = std::numeric_limits<double>::infinity();
        for (double th = 0.05; th <= 1.0; th += 0.05) {
            const double q = qbar_rescaled(0.5, 1.5, o, th);
            CHECK(q > 0.0);
            CHECK(q < prev);
            prev = q;
        }
    }
    SUBCASE("pbar decomposition matches the pointwise evaluator") {
        const auto cfg = testing::corpus("sine_rhs");
        const Problem p = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const Mesh m = Mesh::uniform(64);
        const auto ft = pbar_qbar(p, h, m);
        for (std::size_t j = 1; j <= 64; ++j) {
            CHECK(ft.pbar.value(p.order, m[j], j) == doctest::Approx(pbar_rescaled(h, p.order, p.T, m[j])).epsilon(1e-12));
            CHECK(ft.qbar.value(p.order, m[j], j) == doctest::Approx(qbar_rescaled(h.t, p.T, p.order, m[j])).epsilon(1e-12));
        }
    }
    SUBCASE("weighted pbar is bounded by M / (Gamma (T-t)^(1-alpha))") {
        for (const char* name : {"sine_rhs", "constant_history", "appendix_history"}) {
            CAPTURE(name);
            const auto cfg = testing::corpus(name);
            const Problem p = config::make_problem(cfg);
            const HistoryData h = config::make_history(cfg);
            const double alpha = p.order.alpha();
            const double bound = h.M / (p.order.gamma_alpha() * std::pow(p.T - h.t, 1.0 - alpha));
            const Mesh m = Mesh::graded(512, 2.0);
            for (std::size_t j = 1; j <= 512; ++j)
                CHECK(std::pow(m[j], 1.0 - alpha) * std::abs(pbar_rescaled(h, p.order, p.T, m[j])) <= bound * (1 + 1e-12));
        }
    }
}

TEST_CASE("coefficients") {
    const Mesh m = Mesh::uniform(64);
    SUBCASE("zero right-hand side") {
        const Problem p(Order(0.5), 1.0, ScalarField::from_expression("0"), 0.0);
        const auto x = solve_nonlinear(p, HistoryData::point(1.0), m);
        const auto c = coefficients(p, x, 0.0, 1.0);
        for (std::size_t j = 0; j <= 64; ++j) CHECK((c.a[j] == 0.0 && c.b[j] == 0.0));
    }
    SUBCASE("identity right-hand side") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("x"), 1.0);
        const HistoryData h(0.5, 1.0, PiecewiseLinear::constant(0.0, 0.5, 0.2));
        const auto x = solve_nonlinear(p, h, m);
        const auto c = coefficients(p, x, 0.5, 2.0);
        for (std::size_t j = 0; j <= 64; ++j) {
            CHECK(c.a[j] == 1.0);
            CHECK(c.b[j] == doctest::Approx(-0.5 * x.values[j] / 1.5).epsilon(1e-14));
            CHECK(c.a_resc[j] == std::pow(1.5, 0.5) * c.a[j]);
            CHECK(c.b_resc[j] == std::pow(1.5, 0.5) * c.b[j]);
        }
    }
    SUBCASE("endpoint value of b") {
        const Problem p(Order(0.7), 1.0, ScalarField::from_expression("sin(x) + tau^2"), 2.0);
        const auto x = solve_nonlinear(p, HistoryData::point(0.4), m);
        const auto c = coefficients(p, x, 0.0, 1.0);
        CHECK(c.b.back() == doctest::Approx(-0.7 * x.rhs.back()).epsilon(1e-14));
    }
}

TEST_CASE("ci_derivatives examples") {
    SUBCASE("zero right-hand side") {
        const Problem p(Order(0.5), 1.0, ScalarField::from_expression("0"), 0.0);
        const auto r = ci_derivatives(p, HistoryData::point(0.0), Mesh::uniform(256));
        CHECK(std::abs(r.p_T) <= 1e-8);
        CHECK(std::abs(r.q_T - 0.5641895835) <= 1e-8);
        CHECK(r.p_T == r.p_path.end_value());
        CHECK(r.q_T == r.q_path.end_value());
    }
    SUBCASE("zero right-hand side with a history") {
        const Problem p(Order(0.4), 3.0, ScalarField::from_expression("0"), 0.0);
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 0.8));
        const auto r = ci_derivatives(p, h, Mesh::uniform(256));
        CHECK(std::abs(r.p_T) <= 1e-12);
        CHECK(r.q_T == doctest::Approx(1.0 / (fracsens::gamma(0.4) * std::pow(2.0, 0.6))).epsilon(1e-12));
    }
    SUBCASE("linear autonomous") {
        const Problem p(Order(0.5), 1.0, ScalarField::from_expression("x"), 1.0);
        const auto r = ci_derivatives(p, HistoryData::point(1.0), Mesh::uniform(4096));
        CHECK(testing::rel_err(r.q_T, kE0505) <= 1e-2);
        CHECK(testing::rel_err(r.rho, kE05) <= 5e-3);
        // with t = 0 and f = x the p equation reduces to p = -q
        CHECK(std::abs(r.p_T + kE0505) <=
              testing::tol_solver(testing::calibrated(0.5, "sensitivity"), 0.5, 4096, kE0505));
        CHECK(r.q_T > 0.0);
    }
    SUBCASE("direct and rescaled forms agree") {
        const auto cfg = testing::corpus("sine_rhs");
        const Problem p = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const auto a = ci_derivatives(p, h, Mesh::uniform(512));
        const auto b = ci_derivatives_direct(p, h, Mesh::uniform(512, p.T - h.t));
        const double tol = testing::tol_solver(testing::calibrated(0.6, "sensitivity"), 0.6, 512, a.q_T);
        CHECK(std::abs(a.p_T - b.p_T) <= tol);
        CHECK(std::abs(a.q_T - b.q_T) <= tol);
    }
}

TEST_CASE("finite-difference oracle on the sine problem") {
    const auto cfg = testing::corpus("sine_rhs");
    const Problem p = config::make_problem(cfg);
    const HistoryData h = config::make_history(cfg);
    const std::size_t N = 1024;
    const Mesh m = Mesh::graded(N, 2.0 / cfg.alpha);
    const auto r = ci_derivatives(p, h, m);
    const auto schedule = verification::FdSchedule::geometric(h.t, p.T);
    const double C = testing::calibrated(0.6, "sensitivity");
    std::vector<double> ells, limits;
    for (double ell : {-1.0, 2.0}) {
        CAPTURE(ell);
        const auto fd = verification::fd_directional(p, h, ell, schedule, m);
        const double target = r.p_T + r.q_T * ell;
        CHECK(std::abs(fd.extrapolation.limit - target) <= fd.extrapolation.tol + testing::tol_solver(C, 0.6, N, target));
        ells.push_back(ell);
        limits.push_back(fd.extrapolation.limit);
    }
    const double slope = (limits[1] - limits[0]) / (ells[1] - ells[0]);
    const double intercept = limits[0] - slope * ells[0];
    CHECK(std::abs(slope - r.q_T) <= 1e-3 * std::abs(r.q_T));
    CHECK(std::abs(intercept - r.p_T) <= 1e-3 * std::max(1.0, std::abs(r.p_T)));
}
