#include "doctest.h"

#include "fracsens/errors.hpp"
#include "fracsens/special_functions.hpp"
#include "fracsens/verification.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace fracsens;
using namespace fracsens::verification;

TEST_CASE("schedule") {
    const auto s = FdSchedule::geometric(0.5, 1.5);
    REQUIRE(s.steps.size() == 9);
    CHECK(s.steps.front() == 0.0625);
    for (std::size_t i = 1; i < s.steps.size(); ++i) CHECK(s.steps[i] == s.steps[i - 1] / 2);
    FdSchedule bad{{0.1, 0.2}, {}};
    CHECK_THROWS_AS(bad.validate(0.0, 1.0), ValidationError);
    FdSchedule outside{{2.0, 0.1}, {}};
    CHECK_THROWS_AS(outside.validate(0.0, 1.0), ValidationError);
}

TEST_CASE("richardson recovers a known expansion") {
    const double alpha = 0.6;
    std::vector<double> steps, values;
    for (int k = 2; k <= 10; ++k) {
        const double d = std::ldexp(0.25, -k);
        steps.push_back(d);
        values.push_back(1.5 + 0.7 * std::pow(d, alpha) - 2.0 * d + 0.3 * std::pow(d, 2 * alpha));
    }
    const auto ex = richardson(steps, values, alpha);
    CHECK(std::abs(ex.limit - 1.5) < 1e-10);
    CHECK(ex.tol < 1e-8);
}

TEST_CASE("fd_directional examples") {
    const Problem p(Order(0.5), 1.0, ScalarField::from_expression("0"), 0.0);
    const auto h = HistoryData::point(0.0);
    const auto schedule = FdSchedule::geometric(0.0, 1.0);
    const Mesh m = Mesh::uniform(256);
    SUBCASE("flat extension") {
        const auto fd = fd_directional(p, h, 0.0, schedule, m);
        for (double q : fd.quotients) CHECK(q == 0.0);
    }
    SUBCASE("unit extension tends to 1 / Gamma(1/2)") {
        const auto fd = fd_directional(p, h, 1.0, schedule, m);
        const double target = 1.0 / std::sqrt(std::numbers::pi);
        // exact prelimit values: ((1)^a - (1 - d)^a) / (Gamma(a + 1) d)
        for (std::size_t i = 0; i < fd.steps.size(); ++i) {
            const double d = fd.steps[i];
            CHECK(fd.quotients[i] == doctest::Approx((1.0 - std::sqrt(1.0 - d)) / (fracsens::gamma(1.5) * d)).epsilon(1e-10));
        }
        CHECK(std::abs(fd.quotients.back() - target) < std::abs(fd.quotients.front() - target));
        CHECK(std::abs(fd.extrapolation.limit - target) <= fd.extrapolation.tol + 1e-10);
    }
}

TEST_CASE("ci_residual examples") {
    SUBCASE("constant extension without dynamics") {
        const double alpha = 0.5;
        const Problem p(Order(alpha), 1.0, ScalarField::from_expression("0"), 0.0);
        const auto h = HistoryData::point(0.0);
        const auto schedule = FdSchedule::geometric(0.0, 1.0);
        const double ell = 1.5;
        const auto rep = ci_residual(p, h, Extension::constant(h, 1.0, ell), schedule, Mesh::uniform(256));
        for (std::size_t i = 0; i < rep.steps.size(); ++i) {
            const double d = rep.steps[i];
            const double exact = (1.0 - std::pow(1.0 - d, alpha)) / (alpha * fracsens::gamma(alpha));
            const double bound = std::abs(exact - d / fracsens::gamma(alpha)) * std::abs(ell);
            CHECK(rep.residuals[i] <= bound + 1e-13);
        }
        CHECK(rep.slope > 1.05);
    }
    SUBCASE("flat extension only probes the time derivative") {
        const auto cfg = testing::corpus("sine_rhs");
        const Problem p = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const Mesh m = Mesh::graded(512, 2.0 / cfg.alpha);
        const auto schedule = FdSchedule::geometric(h.t, p.T, 2, 7);
        const auto rep = ci_residual(p, h, Extension::constant(h, p.T, 0.0), schedule, m);
        const auto fd = fd_directional(p, h, 0.0, schedule, m);
        for (std::size_t i = 0; i < rep.steps.size(); ++i)
            CHECK(rep.residuals[i] == doctest::Approx(std::abs(fd.quotients[i] - rep.p_T) * rep.steps[i]).epsilon(1e-9));
    }
    SUBCASE("oscillating extension on the sine problem") {
        const auto cfg = testing::corpus("sine_rhs");
        const Problem p = config::make_problem(cfg);
        const HistoryData h = config::make_history(cfg);
        const Extension ext(h, sign_sine_extension(h.t, p.T, 20.0));
        const auto rep = ci_residual(p, h, ext, FdSchedule::geometric(h.t, p.T), Mesh::graded(1024, 2.0 / cfg.alpha));
        for (double r : rep.residuals) CHECK(std::isfinite(r));
        CHECK(rep.slope > 1.05);
        CHECK(rep.ratios.back() <= 0.2 * rep.ratios.front());
    }
}

TEST_CASE("sign_sine_extension") {
    const auto pl = sign_sine_extension(0.5, 1.5, 20.0);
    CHECK(pl.lower() == 0.5);
    CHECK(pl.upper() == 1.5);
    for (double xi : {0.51, 0.6, 0.7, 0.9, 1.2, 1.49}) {
        const double s = std::sin(20.0 * (xi - 0.5));
        if (std::abs(s) > 1e-6) CHECK(pl.value(xi) == (s > 0 ? 1.0 : -1.0));
    }
}

TEST_CASE("free_term_limits") {
    const std::vector<double> thetas{0.1, 0.25, 0.5, 1.0};
    SUBCASE("everything vanishes without history or extension") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("x"), 1.0);
        const HistoryData h(1.0, 0.4, PiecewiseLinear::constant(0.0, 1.0, 0.0));
        const auto rep = free_term_limits(p, h, 0.0, FdSchedule::geometric(1.0, 2.0), thetas);
        for (const auto& row : rep.pointwise)
            for (double v : row) CHECK(v == 0.0);
        for (const auto& row : rep.weighted)
            for (double v : row) CHECK(v == 0.0);
    }
    SUBCASE("unit history derivative: decay under the majorant") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("x"), 1.0);
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 1.0));
        const auto rep = free_term_limits(p, h, 0.0, FdSchedule::geometric(1.0, 2.0), thetas);
        CHECK(rep.majorant_holds);
        // at theta = 1 the free term sits at T, where neither side moves
        for (const auto& row : rep.pointwise) CHECK(row.back() == 0.0);
        for (std::size_t k = 0; k + 1 < thetas.size(); ++k) {
            CAPTURE(thetas[k]);
            CHECK(rep.pointwise.back()[k] < rep.pointwise.front()[k]);
            CHECK(rep.weighted.back()[k] < rep.weighted.front()[k]);
        }
        const std::size_t half = 2;  // theta = 0.5
        for (std::size_t i = 0; i < rep.steps.size(); ++i)
            CHECK(rep.pointwise[i][half] <= rep.pointwise_majorant[i][half] * (1 + 1e-12));
    }
    SUBCASE("constant extension without history") {
        const Problem p(Order(0.5), 2.0, ScalarField::from_expression("x"), 1.0);
        const HistoryData h(1.0, 0.0, PiecewiseLinear::constant(0.0, 1.0, 0.0));
        const auto rep = free_term_limits(p, h, 2.0, FdSchedule::geometric(1.0, 2.0), thetas);
        CHECK(rep.majorant_holds);
        for (std::size_t k = 0; k < thetas.size(); ++k) {
            std::vector<double> vals;
            for (const auto& row : rep.pointwise) vals.push_back(row[k]);
            const auto ex = richardson(rep.steps, vals, 0.5);
            CHECK(std::abs(ex.limit) <= ex.tol + 1e-9);
        }
    }
}

TEST_CASE("appendix example matches the frozen fixture") {
    const auto fx = testing::fixture("appendix.json");
    const auto rep = appendix_example(Order(0.5), {3, 5}, fx["theta_star"].get<double>());
    CHECK(rep.threshold == doctest::Approx(fx["threshold"].get<double>()).epsilon(1e-14));
    CHECK(rep.threshold == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
    CHECK(rep.i_star == fx["i_star"].get<int>());
    CHECK(rep.eps_star == doctest::Approx(fx["eps_star"].get<double>()).epsilon(1e-12));
    const auto gaps = fx["gaps"].get<std::vector<double>>();
    REQUIRE(rep.gaps.size() == gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        CHECK(rep.gaps[i] == doctest::Approx(gaps[i]).epsilon(1e-12));
        CHECK(rep.gaps[i] >= fx["min_gap"].get<double>() * (1 - 1e-12));
        CHECK(rep.gaps[i] > rep.eps_star);
    }
    for (double v : rep.scaled_pbar) CHECK(std::abs(v) <= rep.pbar_bound * (1 + 1e-12));

    SUBCASE("default theta_star is 80% of the threshold") {
        CHECK(appendix_example(Order(0.5), {3, 4}).theta_star == doctest::Approx(0.1));
    }
    SUBCASE("oversized index is rejected") {
        CHECK_THROWS_AS(appendix_example(Order(0.5), {3, 9}, 0.1), RangeError);
    }
    SUBCASE("h by blocks agrees with adaptive quadrature") {
        for (double theta : {0.5, 0.2, 1.0 / 24.0}) {
            const double direct = appendix_h(0.5, 0.1, theta);
            CHECK(std::isfinite(direct));
            // truncating far blocks only changes the tail (1 + u)^(a - 1) beyond the cut
            CHECK(std::abs(appendix_h(0.5, 0.1, theta, 12) - direct) < 1e-3);
        }
    }
}

TEST_CASE("lipschitz smoke check") {
    const auto cfg = testing::corpus("sine_rhs");
    const Problem p = config::make_problem(cfg);
    const HistoryData h = config::make_history(cfg);
    const auto rep = lipschitz_check(p, h, 1.0, FdSchedule::geometric(h.t, p.T, 2, 7), Mesh::graded(512, 2.0 / cfg.alpha));
    CHECK(rep.stable);
    CHECK(rep.mu > 0.0);
    for (std::size_t i = 0; i < rep.steps.size(); ++i)
        CHECK(rep.differences[i] <= 2.0 * rep.mu * std::pow(rep.steps[i], 1.0 + cfg.alpha));
}

TEST_CASE("thread budget honours the environment") {
    CHECK(thread_budget() >= 1);
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    for (int v : hit) CHECK(v == 1);
}
