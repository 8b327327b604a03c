#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "doctest.h"
#include "kerr_bic/dynamics.hpp"
#include "kerr_bic/sensitivity.hpp"
#include "kerr_bic/spectra.hpp"
#include "support.hpp"

using namespace kerr_bic;
using doctest::Approx;

TEST_CASE("single-mode trajectory relaxes to the lower steady state") {
    const double d = -3.0, i = 1.0, u = 1.0;
    IntegrationOptions o;
    o.t_final = 200.0;
    const Trajectory t = integrate_single(d, u, std::sqrt(i / (2.0 * u)), {0.0, 0.0}, o);
    CHECK(t.converged);
    CHECK_FALSE(t.diverged);
    const double alpha = 4.0 * u * std::norm(t.final_state().a);
    CHECK(std::abs(single_mode_intensity(alpha, d) - i) < 1e-8);
    CHECK(alpha == Approx(solve_single_mode(i, d).front().response).epsilon(1e-8));
    CHECK(t.components == 1);
    CHECK(t.occupation.size() == t.times.size());
}

TEST_CASE("single-mode trajectory lands on the upper branch from a large start") {
    const double d = -3.0, i = 4.0;
    IntegrationOptions o;
    o.t_final = 300.0;
    const Trajectory t = integrate_single(d, 1.0, std::sqrt(i / 2.0), {1.2, -0.5}, o);
    REQUIRE(t.converged);
    const double alpha = 4.0 * std::norm(t.final_state().a);
    CHECK(alpha == Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("two-mode trajectory relaxes to the steady state") {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    p.omega = std::sqrt(18.0);
    IntegrationOptions o;
    o.t_final = 500.0;
    o.dt = 0.005;
    const Trajectory t = integrate_two(p, {}, {}, o);
    REQUIRE(t.converged);
    const double x = p.u * std::norm(t.final_state().b);
    CHECK(std::abs(two_mode_intensity(x, effective_detuning(p)) - 18.0) < 1e-8);
    CHECK(x == Approx(2.7246859787205431).epsilon(1e-8));
    CHECK(t.components == 2);
}

TEST_CASE("cavity-driven trajectory relaxes to the cavity-driven steady state") {
    TwoModeParams p;
    p.delta_a = 4.0;
    p.delta_b = 20.0;
    p.g = 4.0;
    IntegrationOptions o;
    o.t_final = 500.0;
    const Trajectory t = integrate_two(p, {}, {}, o, DrivePort::Cavity, 2.0);
    REQUIRE(t.converged);
    const auto roots = solve_two_mode_cavity_driven(2.0, p);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(t.final_state().a - roots[0].amplitude_a) < 1e-8);
    CHECK(std::abs(t.final_state().b - *roots[0].amplitude_b) < 1e-8);
}

TEST_CASE("linearized propagation agrees with the eigen-decomposition") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        TwoModeParams p = test::random_two_mode(rng);
        const SteadyRoot root = two_mode_root_at(p, test::uniform(rng, 0.0, 3.0));
        const Matrix4 h = linearized_two_hamiltonian(p, root);
        std::array<Complex, 4> psi0;
        for (auto& v : psi0) v = {test::uniform(rng, -1.0, 1.0), test::uniform(rng, -1.0, 1.0)};
        const double tf = 1.0;
        const auto traj = integrate_linearized(h, psi0, tf, 1e-4, 100);

        Eigen::Matrix4cd m;
        Eigen::Vector4cd v0;
        for (int r = 0; r < 4; ++r) {
            v0(r) = psi0[r];
            for (int c = 0; c < 4; ++c) m(r, c) = h[r][c];
        }
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m);
        const Eigen::Matrix4cd vecs = es.eigenvectors();
        Eigen::Vector4cd coeffs = vecs.lu().solve(v0);
        for (int k = 0; k < 4; ++k) coeffs(k) *= std::exp(Complex(0.0, -1.0) * es.eigenvalues()(k) * traj.times.back());
        const Eigen::Vector4cd want = vecs * coeffs;
        CHECK(traj.times.back() == Approx(tf));
        for (int r = 0; r < 4; ++r) CHECK(std::abs(traj.states.back()[r] - want(r)) < 1e-8 * (1.0 + want.norm()));
    }
}

TEST_CASE("ringdown rate matches the linearized spectrum") {
    const SingleModeSystem sys{-3.0, 1.0};
    for (double i : {1.0, 4.0, 6.0}) {
        for (const auto& r : solve_single_mode(i, sys.delta_t)) {
            if (r.stability != Stability::Stable) continue;
            const RingdownResult rr = ringdown_rate(sys, r, 1e-4, kRingdownTimeCap);
            CHECK(rr.rate == Approx(rr.predicted_rate).epsilon(0.05));
            CHECK(rr.r_squared >= 0.99);
            CHECK_FALSE(rr.lower_bound);
        }
    }
    TwoModeParams p;
    p.delta_a = 4.0;
    p.g = 4.0;
    const TwoModeSystem two{p};
    const auto root = root_on_branch(two, 6.7, Branch::Lower);
    REQUIRE(root.has_value());
    const RingdownResult rr = ringdown_rate(two, *root, 1e-4, kRingdownTimeCap);
    CHECK(rr.rate == Approx(rr.predicted_rate).epsilon(0.05));
}

TEST_CASE("ringdown with a beat slower than the decay") {
    // Just below the exceptional point: λ = -i ± w with w ≈ 0.26, so the
    // window between 0.1·δ0 and 1e-9 spans less than one beat period.
    const double delta_t = -0.461137;
    const double alpha = 1.043335;
    const double i = 0.5 * alpha * (1.0 + (delta_t + 0.5 * alpha) * (delta_t + 0.5 * alpha));
    const SingleModeSystem sys{delta_t, 1.0};
    for (const auto& r : solve_single_mode(i, delta_t)) {
        if (r.stability != Stability::Stable) continue;
        const RingdownResult rr = ringdown_rate(sys, r, 1e-4, kRingdownTimeCap);
        CHECK(rr.rate == Approx(rr.predicted_rate).epsilon(0.01));
        CHECK(rr.r_squared >= 0.99);
    }
}

TEST_CASE("ringdown methods have names") {
    CHECK(std::string(to_string(RingdownMethod::Envelope)) == "envelope");
    CHECK(std::string(to_string(RingdownMethod::BeatMaxima)) == "beat_maxima");
    CHECK(std::string(to_string(RingdownMethod::LinearPrediction)) == "linear_prediction");
}

TEST_CASE("ringdown is deterministic") {
    const SingleModeSystem sys{-2.5, 1.0};
    const SteadyRoot r = solve_single_mode(2.0, -2.5).front();
    const RingdownResult a = ringdown_rate(sys, r, 1e-4, 1e3);
    const RingdownResult b = ringdown_rate(sys, r, 1e-4, 1e3);
    CHECK(a.rate == b.rate);
    CHECK(a.r_squared == b.r_squared);
    CHECK(a.samples_used == b.samples_used);
    CHECK(a.method == b.method);
}

TEST_CASE("ringdown preconditions") {
    const SingleModeSystem sys{-3.0, 1.0};
    const auto roots = solve_single_mode(4.0, -3.0);
    CHECK_THROWS_AS(ringdown_rate(sys, roots[1], 1e-4, 100.0), DomainError);
    CHECK_THROWS_AS(ringdown_rate(sys, roots[0], 0.0, 100.0), DomainError);
    CHECK_THROWS_AS(ringdown_rate(sys, roots[0], 1e-2, 100.0), DomainError);
    CHECK_THROWS_AS(ringdown_rate(sys, roots[0], 1e-4, -1.0), DomainError);
}

TEST_CASE("integration options are validated") {
    IntegrationOptions o;
    o.dt = 0.0;
    CHECK_THROWS_AS(integrate_single(-3.0, 1.0, 1.0, {}, o), DomainError);
    o.dt = 0.01;
    o.record_stride = 0;
    CHECK_THROWS_AS(integrate_single(-3.0, 1.0, 1.0, {}, o), DomainError);
    CHECK(default_time_step(0.5) == 0.01);
    CHECK(default_time_step(10.0) == Approx(0.001));
}

TEST_CASE("trajectory CSV") {
    IntegrationOptions o;
    o.t_final = 0.05;
    o.stop_on_convergence = false;
    const Trajectory t = integrate_single(-3.0, 1.0, 1.0, {}, o);
    std::ostringstream out;
    t.write_csv(out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,re_a,im_a");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == t.times.size());
}
