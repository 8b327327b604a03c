#pragma once

// Routh-Hurwitz stability of the two-mode steady states and the stability
// labels handed to steady_state.

#include "kerr_bic/core.hpp"
#include "kerr_bic/spectra.hpp"

namespace kerr_bic {

// Relative band |a₄| <= band * scale inside which a steady state is reported
// marginal (and Unstable).
inline constexpr double kMarginalBand = 1e-12;

QuarticCoefficients routh_hurwitz_coeffs(const TwoModeParams& p, double x);

// a₁a₂a₃ - a₃² - a₁²a₄ in its three-term form
//   4γ_aγ_b(12x² + 8δ_b x - δ_a² + δ_b²)²
// + 4γ_aγ_b(γ_a+γ_b)²[24x² + 16δ_b x + 2(δ_a²+δ_b²) + (γ_a+γ_b)²]
// + 4g²(γ_a+γ_b)²[12x² + 8(δ_a+δ_b)x + (δ_a+δ_b)² + (γ_a+γ_b)²].
// The brackets are not sign-definite: for |δ_b| large against δ_a and the
// rates the margin goes negative near x ≈ -δ_b/3.
double hurwitz_margin(const TwoModeParams& p, double x);

// The same quantity expanded directly from the four coefficients.
double hurwitz_margin_direct(const TwoModeParams& p, double x);

// Full Routh-Hurwitz test: a₁ > 0, a₃ > 0, a₄ = det H > 0 and margin > 0.
// In the common regime only a₄ changes sign (at the turning points x±), but
// a₃ and the margin can fail on their own, which is an oscillatory
// instability with det H > 0.
bool is_stable(const TwoModeParams& p, double x);

struct StabilityVerdict {
    Stability stability = Stability::Stable;
    bool marginal = false;
};

StabilityVerdict classify_two_mode(const TwoModeParams& p, double x);

// Single mode: stable iff (3/4)α² + 2Δ̃α + Δ̃² + 1 > 0, i.e. det of the
// linearized 2x2 Hamiltonian is negative.
StabilityVerdict classify_single_mode(double alpha, double delta_t);

}  // namespace kerr_bic
