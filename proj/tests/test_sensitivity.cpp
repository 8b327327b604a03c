#include <cmath>

#include "doctest.h"
#include "kerr_bic/bistability.hpp"
#include "kerr_bic/sensitivity.hpp"
#include "support.hpp"

using namespace kerr_bic;
using doctest::Approx;

namespace {
TwoModeParams coupled() {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    return p;
}
}  // namespace

TEST_CASE("derivative oracles") {
    CHECK(dalpha_ddelta(1.0, -3.0) == Approx(1.0526315789473684).epsilon(1e-14));
    CHECK(dx_ddelta_b(0.5, effective_detuning(coupled())) == Approx(0.47).epsilon(1e-14));
}

TEST_CASE("derivative poles at the turning points") {
    const auto tp = turning_points_single(-3.0);
    try {
        dalpha_ddelta(tp.lower, -3.0);
        FAIL("expected PoleError");
    } catch (const PoleError& e) {
        CHECK(e.which() == TurningPoint::Lower);
    }
    try {
        dalpha_ddelta(tp.upper, -3.0);
        FAIL("expected PoleError");
    } catch (const PoleError& e) {
        CHECK(e.which() == TurningPoint::Upper);
    }
}

TEST_CASE("single-mode derivative matches finite differences on the lower branch") {
    std::mt19937_64 rng(61);
    for (int k = 0; k < 300; ++k) {
        const double d = test::uniform(rng, -8.0, -2.0);
        const double alpha = test::uniform(rng, 0.05, 0.9) * turning_points_single(d).lower;
        const double i = single_mode_intensity(alpha, d);
        const double h = 1e-5;
        const double up = solve_single_mode(i, d + h).front().response;
        const double dn = solve_single_mode(i, d - h).front().response;
        const double fd = (up - dn) / (2.0 * h);
        CHECK(dalpha_ddelta(alpha, d) == Approx(fd).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("two-mode derivative matches finite differences on the lower branch") {
    std::mt19937_64 rng(67);
    for (int k = 0; k < 300; ++k) {
        TwoModeParams p = test::random_bistable_two_mode(rng);
        const auto dt = effective_detuning(p);
        const double x = test::uniform(rng, 0.05, 0.9) * turning_points_two(dt).lower;
        const double i = two_mode_intensity(x, dt);
        const double h = 1e-6;
        TwoModeParams up = p, dn = p;
        up.delta_b += h;
        dn.delta_b -= h;
        const double fd = (solve_two_mode(i, up).front().response - solve_two_mode(i, dn).front().response) / (2.0 * h);
        CHECK(dx_ddelta_b(x, dt) == Approx(fd).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("branch selection") {
    const SingleModeSystem bistable{-3.0, 1.0};
    CHECK(root_on_branch(bistable, 4.0, Branch::Lower)->response == Approx(4.0 - 2.0 * std::sqrt(2.0)));
    CHECK(root_on_branch(bistable, 4.0, Branch::Middle)->response == Approx(4.0));
    CHECK(root_on_branch(bistable, 4.0, Branch::Upper)->response == Approx(4.0 + 2.0 * std::sqrt(2.0)));
    CHECK_FALSE(root_on_branch(bistable, 1.0, Branch::Upper).has_value());
    CHECK_FALSE(root_on_branch(bistable, 1.0, Branch::Middle).has_value());
    CHECK(root_on_branch(bistable, 1.0, Branch::Lower).has_value());

    const SingleModeSystem mono{-1.0, 1.0};
    CHECK(root_on_branch(mono, 2.0, Branch::Lower)->response == root_on_branch(mono, 2.0, Branch::Upper)->response);
    CHECK_FALSE(root_on_branch(mono, 2.0, Branch::Middle).has_value());
}

TEST_CASE("profile rows on an absent branch stay empty") {
    const std::vector<double> grid = {1.0, 4.0};
    const auto rows = sensitivity_profile(SingleModeSystem{-3.0, 1.0}, grid, Branch::Upper);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].response.has_value());
    CHECK_FALSE(rows[0].derivative.has_value());
    CHECK(rows[1].response.has_value());
    CHECK(*rows[1].derivative == Approx(dalpha_ddelta(*rows[1].response, -3.0)));
}

TEST_CASE("fit recovers a synthetic power law") {
    const double i_ref = 5.0;
    const auto grid = approach_grid(i_ref, 1e-6, 1e-3, 100, true);
    std::vector<ProfileRow> rows;
    for (double i : grid) rows.push_back({i, 1.0, 3.0 * std::pow(i_ref - i, -0.5)});
    const ScalingFit fit = fit_scaling(rows, i_ref, 1e-6 * (1 - 1e-9), 1e-3 * (1 + 1e-9));
    CHECK(fit.exponent == Approx(-0.5).epsilon(1e-10));
    CHECK(fit.prefactor() == Approx(3.0).epsilon(1e-9));
    CHECK(fit.r_squared == Approx(1.0).epsilon(1e-12));
    CHECK(fit.points >= 99);
}

TEST_CASE("fit rejects thin or two-sided windows") {
    std::vector<ProfileRow> few;
    for (int k = 1; k <= 10; ++k) few.push_back({1.0 - 1e-4 * k, 1.0, 1.0 * k});
    CHECK_THROWS_AS(fit_scaling(few, 1.0), DomainError);
    std::vector<ProfileRow> both;
    for (int k = 1; k <= 30; ++k) {
        both.push_back({1.0 - 1e-5 * k, 1.0, 1.0 * k});
        both.push_back({1.0 + 1e-5 * k, 1.0, 1.0 * k});
    }
    CHECK_THROWS_AS(fit_scaling(both, 1.0), DomainError);
    CHECK_THROWS_AS(fit_scaling(both, 1.0, 1e-3, 1e-4), DomainError);
}

TEST_CASE("approach grid is ascending and log-spaced") {
    const auto below = approach_grid(2.0, 1e-4, 1e-1, 4, true);
    REQUIRE(below.size() == 4);
    CHECK(below.front() == Approx(2.0 - 0.2));
    CHECK(below.back() == Approx(2.0 - 2e-4));
    const auto above = approach_grid(2.0, 1e-4, 1e-1, 4, false);
    CHECK(above.front() == Approx(2.0 + 2e-4));
    CHECK(above[1] - 2.0 == Approx(2e-3));
    for (std::size_t k = 1; k < 4; ++k) {
        CHECK(below[k] > below[k - 1]);
        CHECK(above[k] > above[k - 1]);
    }
    CHECK_THROWS_AS(approach_grid(2.0, 1e-4, 1e-1, 1, true), DomainError);
}

TEST_CASE("scaling near the single-mode fold") {
    const auto tp = turning_points_single(-3.0);
    const auto grid = approach_grid(tp.i_lower, kFitWindowLow, kFitWindowHigh, 200, true);
    const auto rows = sensitivity_profile(SingleModeSystem{-3.0, 1.0}, grid, Branch::Lower);
    const ScalingFit fit = fit_scaling(rows, tp.i_lower, kFitWindowLow * (1 - 1e-9), kFitWindowHigh * (1 + 1e-9));
    CHECK(fit.exponent == Approx(-0.5).epsilon(0.02));
    CHECK(fit.prefactor() == Approx(2.63).epsilon(0.02));
}
