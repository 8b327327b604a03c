#include <cmath>

#include "doctest.h"
#include "kerr_bic/bistability.hpp"
#include "kerr_bic/steady_state.hpp"
#include "support.hpp"

using namespace kerr_bic;
using doctest::Approx;

TEST_CASE("single mode at delta_t = -3, I = 4 has three roots") {
    const auto r = solve_single_mode(4.0, -3.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0].response == Approx(4.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r[1].response == Approx(4.0).epsilon(1e-14));
    CHECK(r[2].response == Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r[0].stability == Stability::Stable);
    CHECK(r[1].stability == Stability::Unstable);
    CHECK(r[2].stability == Stability::Stable);
}

TEST_CASE("single mode vertical cut inside the bistable window") {
    CHECK(solve_single_mode(5.0, -3.0).size() == 3);
    CHECK(solve_single_mode(1.0, 0.0).size() == 1);
    CHECK(solve_single_mode(0.0, -3.0).front().response == 0.0);
}

TEST_CASE("two-mode root at δa = g = 4, δb = 0") {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    const auto r = solve_two_mode(18.0, p);
    REQUIRE(r.size() == 1);
    CHECK(r[0].response == Approx(2.7246859787205431).epsilon(1e-13));
    CHECK(r[0].amplitude_b.has_value());
}

TEST_CASE("effective detuning at δa = g = 4, δb = 0") {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    const auto dt = effective_detuning(p);
    CHECK(dt.real_part == Approx(-64.0 / 17.0).epsilon(1e-15));
    CHECK(dt.imag_part == Approx(-33.0 / 17.0).epsilon(1e-15));
    CHECK(two_mode_intensity(1.0, dt) == Approx(6.8823529411764706).epsilon(1e-14));
}

TEST_CASE("single-mode roots solve the cubic and the amplitude equation") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 500; ++k) {
        const double d = test::uniform(rng, -10.0, 5.0), i = test::uniform(rng, 0.0, 50.0);
        const double u = test::uniform(rng, 0.1, 3.0);
        const double e = std::sqrt(i / (2.0 * u));
        for (const auto& r : solve_single_mode(i, d, u)) {
            CHECK(std::abs(single_mode_intensity(r.response, d) - i) < 1e-10 * (1.0 + i));
            const Complex a = r.amplitude_a;
            const Complex rhs = -Complex(0.0, 1.0) * Complex(d, -1.0) * a - Complex(0.0, 2.0 * u) * std::norm(a) * a + e;
            CHECK(std::abs(rhs) < 1e-9 * (1.0 + e));
            CHECK(4.0 * u * std::norm(a) == Approx(r.response).epsilon(1e-10));
        }
    }
}

TEST_CASE("two-mode roots solve the coupled steady equations") {
    std::mt19937_64 rng(19);
    const Complex i1{0.0, 1.0};
    for (int k = 0; k < 500; ++k) {
        TwoModeParams p = test::random_two_mode(rng);
        p.u = test::uniform(rng, 0.2, 2.0);
        const double i = test::uniform(rng, 0.0, 100.0);
        const double om = std::sqrt(i / p.u);
        const auto dt = effective_detuning(p);
        for (const auto& r : solve_two_mode(i, p)) {
            CHECK(std::abs(two_mode_intensity(r.response, dt) - i) < 1e-9 * (1.0 + i));
            const Complex a = r.amplitude_a, b = *r.amplitude_b;
            const Complex ra = -(i1 * p.delta_a + p.gamma_a) * a - i1 * p.g * b;
            const Complex rb = -(i1 * p.delta_b + p.gamma_b) * b - 2.0 * i1 * p.u * std::norm(b) * b - i1 * p.g * a + om;
            const double scale = 1.0 + om + std::abs(b) * (std::abs(p.delta_b) + p.g + 2.0 * r.response);
            CHECK(std::abs(ra) < 1e-9 * scale);
            CHECK(std::abs(rb) < 1e-9 * scale);
        }
    }
}

TEST_CASE("cavity-driven roots solve the coupled steady equations") {
    std::mt19937_64 rng(23);
    const Complex i1{0.0, 1.0};
    for (int k = 0; k < 300; ++k) {
        const TwoModeParams p = test::random_two_mode(rng);
        const double e = test::uniform(rng, 0.0, 10.0);
        for (const auto& r : solve_two_mode_cavity_driven(e, p)) {
            const Complex a = r.amplitude_a, b = *r.amplitude_b;
            CHECK(p.u * std::norm(b) == Approx(r.response).epsilon(1e-9));
            const Complex ra = -(i1 * p.delta_a + p.gamma_a) * a - i1 * p.g * b + e;
            const Complex rb = -(i1 * p.delta_b + p.gamma_b) * b - 2.0 * i1 * p.u * std::norm(b) * b - i1 * p.g * a;
            const double scale = 1.0 + e + std::abs(a) * (std::abs(p.delta_a) + p.g) + std::abs(b) * (10.0 + r.response);
            CHECK(std::abs(ra) < 1e-9 * scale);
            CHECK(std::abs(rb) < 1e-9 * scale);
        }
    }
}

TEST_CASE("steady solvers reject bad input") {
    CHECK_THROWS_AS(solve_single_mode(-1.0, -3.0), DomainError);
    CHECK_THROWS_AS(solve_single_mode(1.0, -3.0, 0.0), DomainError);
    TwoModeParams p;
    p.u = 0.0;
    CHECK_THROWS_AS(solve_two_mode(1.0, p), DomainError);
    p.u = 1.0;
    p.gamma_b = 0.0;
    CHECK_THROWS_AS(solve_two_mode(1.0, p), DomainError);
}

TEST_CASE("dispatch helper agrees with the direct solvers") {
    const auto a = solve_steady(SingleModeSystem{-3.0, 1.0}, 4.0);
    const auto b = solve_single_mode(4.0, -3.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].response == b[k].response);
}

namespace {
std::vector<double> grid(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}
}  // namespace

TEST_CASE("hysteresis sweeps jump at the turning drives") {
    const SingleModeSystem sys{-3.0, 1.0};
    const auto tp = turning_points_single(-3.0);
    auto up = grid(1.0, 7.0, 601);
    const double step = up[1] - up[0];

    const SweepTrace t_up = hysteresis_sweep(sys, up, SweepDirection::Up);
    REQUIRE(t_up.jumps.size() == 1);
    CHECK(t_up.jumps[0].drive_before <= tp.i_lower);
    CHECK(t_up.jumps[0].drive_after >= tp.i_lower);
    CHECK(t_up.jumps[0].drive_after - t_up.jumps[0].drive_before == Approx(step));
    CHECK(t_up.jumps[0].response_after > tp.upper);
    CHECK(t_up.bic_loci.size() == 2);

    std::vector<double> down(up.rbegin(), up.rend());
    const SweepTrace t_down = hysteresis_sweep(sys, down, SweepDirection::Down);
    REQUIRE(t_down.jumps.size() == 1);
    CHECK(t_down.jumps[0].drive_before >= tp.i_upper);
    CHECK(t_down.jumps[0].drive_after <= tp.i_upper);
    CHECK(t_down.jumps[0].response_after < tp.lower);

    for (const auto& pt : t_up.points) CHECK(pt.stability == Stability::Stable);
}

TEST_CASE("monostable sweep has no jumps") {
    const SweepTrace t = hysteresis_sweep(SingleModeSystem{-1.0, 1.0}, grid(0.0, 10.0, 101), SweepDirection::Up);
    CHECK(t.jumps.empty());
    CHECK(t.bic_loci.empty());
    for (std::size_t k = 1; k < t.points.size(); ++k) CHECK(t.points[k].response > t.points[k - 1].response);
}

TEST_CASE("hysteresis sweep validates its grid") {
    const SingleModeSystem sys{-3.0, 1.0};
    CHECK_THROWS_AS(hysteresis_sweep(sys, std::vector<double>{}, SweepDirection::Up), DomainError);
    CHECK_THROWS_AS(hysteresis_sweep(sys, std::vector<double>{1.0, 3.0, 2.0}, SweepDirection::Up), DomainError);
    CHECK_THROWS_AS(hysteresis_sweep(sys, std::vector<double>{1.0, 2.0}, SweepDirection::Down), DomainError);
}

TEST_CASE("two-mode hysteresis brackets the turning drives") {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    const auto tp = turning_points_two(effective_detuning(p));
    const auto up = grid(6.0, 7.5, 1501);
    const SweepTrace t = hysteresis_sweep(TwoModeSystem{p}, up, SweepDirection::Up);
    REQUIRE(t.jumps.size() == 1);
    CHECK(t.jumps[0].drive_before <= tp.i_lower);
    CHECK(t.jumps[0].drive_after >= tp.i_lower);
}
