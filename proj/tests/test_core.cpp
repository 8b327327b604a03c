#include <cmath>
#include <limits>

#include "doctest.h"
#include "kerr_bic/core.hpp"
#include "support.hpp"

using namespace kerr_bic;
using doctest::Approx;

namespace {
constexpr double kTwoPi = 2.0 * constants::pi;
}

TEST_CASE("optical Kerr coefficient matches a high-precision evaluation") {
    const double u = kerr_coefficient_optical(1e-19, kTwoPi * 200e12, 1.5, 100e-18);
    CHECK(u == Approx(9404.098369163974).epsilon(1e-13));
}

TEST_CASE("optical drive amplitude matches a high-precision evaluation") {
    const double e = drive_rabi_optical(1e-3, kTwoPi * 1e6, kTwoPi * 200e12);
    CHECK(e == Approx(307937032009.42579).epsilon(1e-13));
}

TEST_CASE("magnon drive amplitude matches a high-precision evaluation") {
    const double om = drive_rabi_magnon(kTwoPi * 28e9, 4.22e27, 1e-3, 10e-3);
    CHECK(om == Approx(4.7762063851689452e18).epsilon(1e-13));
}

TEST_CASE("conversion homogeneity") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const double chi = test::uniform(rng, 1e-22, 1e-18), w = test::uniform(rng, 1e14, 1e15);
        const double n = test::uniform(rng, 1.0, 4.0), v = test::uniform(rng, 1e-19, 1e-15);
        const double s = test::uniform(rng, 0.1, 10.0);
        const double u = kerr_coefficient_optical(chi, w, n, v);
        CHECK(test::rel_diff(kerr_coefficient_optical(s * chi, w, n, v), s * u) < 1e-14);
        CHECK(test::rel_diff(kerr_coefficient_optical(chi, s * w, n, v), s * s * u) < 1e-14);
        CHECK(test::rel_diff(kerr_coefficient_optical(chi, w, s * n, v), u / s) < 1e-14);
        CHECK(test::rel_diff(kerr_coefficient_optical(chi, w, n, s * v), u / s) < 1e-14);

        const double p = test::uniform(rng, 1e-6, 1.0), g = test::uniform(rng, 1e5, 1e9);
        const double e = drive_rabi_optical(p, g, w);
        CHECK(test::rel_diff(drive_rabi_optical(s * p, g, w), std::sqrt(s) * e) < 1e-14);
        CHECK(test::rel_diff(drive_rabi_optical(p, s * g, w), std::sqrt(s) * e) < 1e-14);
        CHECK(test::rel_diff(drive_rabi_optical(p, g, s * w), e / std::sqrt(s)) < 1e-14);

        const double ge = test::uniform(rng, 1e9, 1e12), rho = test::uniform(rng, 1e26, 1e28);
        const double d = test::uniform(rng, 1e-4, 1e-2);
        const double om = drive_rabi_magnon(ge, rho, d, p);
        CHECK(test::rel_diff(drive_rabi_magnon(s * ge, rho, d, p), s * om) < 1e-14);
        CHECK(test::rel_diff(drive_rabi_magnon(ge, s * rho, d, p), std::sqrt(s) * om) < 1e-14);
        CHECK(test::rel_diff(drive_rabi_magnon(ge, rho, s * d, p), std::sqrt(s) * om) < 1e-14);

        // I = 2U|E|²/γ³ is invariant under U -> sU, E -> E/√s and scales as γ⁻³.
        const double i = normalized_drive_single(u, e, g);
        CHECK(test::rel_diff(normalized_drive_single(s * u, e / std::sqrt(s), g), i) < 1e-13);
        CHECK(test::rel_diff(normalized_drive_single(u, e, s * g), i / (s * s * s)) < 1e-13);
    }
}

TEST_CASE("conversions reject unphysical input") {
    CHECK_THROWS_AS(kerr_coefficient_optical(1e-19, 0.0, 1.5, 1e-16), DomainError);
    CHECK_THROWS_AS(kerr_coefficient_optical(1e-19, 1e15, -1.0, 1e-16), DomainError);
    CHECK_THROWS_AS(drive_rabi_optical(-1.0, 1e6, 1e15), DomainError);
    CHECK_THROWS_AS(drive_rabi_optical(1.0, 0.0, 1e15), DomainError);
    CHECK_THROWS_AS(drive_rabi_magnon(1e9, -1.0, 1e-3, 1e-3), DomainError);
    CHECK_THROWS_AS(normalized_drive_single(1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(kerr_coefficient_optical(std::numeric_limits<double>::quiet_NaN(), 1e15, 1.5, 1e-16),
                    DomainError);
    CHECK(drive_rabi_optical(0.0, 1e6, 1e15) == 0.0);
}

TEST_CASE("two-mode parameter validation") {
    TwoModeParams p;
    CHECK_NOTHROW(p.validate());
    p.gamma_a = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.gamma_a = 1.0;
    p.gamma_b = -0.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.gamma_b = 1.0;
    p.g = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("spectrum summary quantities") {
    const Spectrum s = Spectrum::from_eigenvalues({{1.0, -0.5}, {-2.0, -3.0}, {0.1, -1.0}});
    REQUIRE(s.decay_rates.size() == 3);
    CHECK(s.decay_rates[0] == 0.5);
    CHECK(s.min_decay_rate() == 0.5);
    CHECK(s.max_imag() == -0.5);
    CHECK(s.bic_measure == Approx(std::abs(Complex{0.1, -1.0})));
    CHECK_FALSE(s.is_bic());
    CHECK(Spectrum::from_eigenvalues({{0.0, 0.0}, {1.0, -1.0}}).is_bic());
}

TEST_CASE("stability labels") {
    CHECK(std::string(to_string(Stability::Stable)) == "stable");
    CHECK(std::string(to_string(Stability::Unstable)) == "unstable");
}
