#pragma once

// Shared random draws and comparison helpers for the test binaries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "kerr_bic/bistability.hpp"
#include "kerr_bic/core.hpp"

namespace kerr_bic::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Broad two-mode draw: detunings in [-10, 10], rates in [0.01, 3], g in [0, 6].
inline TwoModeParams random_two_mode(std::mt19937_64& rng) {
    TwoModeParams p;
    p.delta_a = uniform(rng, -10.0, 10.0);
    p.delta_b = uniform(rng, -10.0, 10.0);
    p.gamma_a = uniform(rng, 0.01, 3.0);
    p.gamma_b = uniform(rng, 0.01, 3.0);
    p.g = uniform(rng, 0.0, 6.0);
    p.u = 1.0;
    return p;
}

// Same distribution conditioned on δ̃_R < √3 δ̃_I with some room to spare.
inline TwoModeParams random_bistable_two_mode(std::mt19937_64& rng) {
    for (;;) {
        TwoModeParams p = random_two_mode(rng);
        const EffectiveDetuning dt = effective_detuning(p);
        if (dt.real_part < std::sqrt(3.0) * dt.imag_part - 1e-3) return p;
    }
}

// Sorts by real part, then imaginary part, for element-wise comparisons.
inline std::vector<Complex> sorted(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (std::abs(a.real() - b.real()) > 1e-9 * (1.0 + std::abs(a.real()))) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace kerr_bic::test
