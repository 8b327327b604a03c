#pragma once

// Adiabatic elimination of mode b at large |δ_b|: the cavity-driven two-mode
// system becomes a single Kerr mode
//   ȧ = -(iδ̃_a + γ_a)a - iŨ|a|²a + ℰ,  δ̃_a = δ_a - g²/δ_b,  Ũ = 2(g/δ_b)⁴U.

#include <optional>
#include <vector>

#include "kerr_bic/bistability.hpp"
#include "kerr_bic/core.hpp"

namespace kerr_bic {

struct EffectiveSingleMode {
    double delta_eff = 0.0;  // δ̃_a
    double u_eff = 0.0;      // Ũ
    double gamma_eff = 0.0;  // γ_a
    double drive_eff = 0.0;  // ℰ
    // |δ_b| >= 10γ_b and |δ_b| >= 10|g|; below that the expansion is used
    // anyway and callers should warn.
    bool within_validity = false;

    // Single-mode parameters of the same steady states: Δ̃ = δ̃_a/γ_a and
    // I = Ũℰ²/γ_a³ (Ũ plays the role of 2U in the single-mode equation).
    double delta_t() const { return delta_eff / gamma_eff; }
    double normalized_drive() const { return u_eff * drive_eff * drive_eff / (gamma_eff * gamma_eff * gamma_eff); }
};

// Throws DomainError for δ_b = 0 or invalid rates.
EffectiveSingleMode effective_params(const TwoModeParams& p, double cavity_drive);

// b ≈ -ga/δ_b + 2(g/δ_b)³(U/δ_b)|a|²a. Throws DomainError for δ_b = 0.
Complex adiabatic_b(Complex a, const TwoModeParams& p);

// δ_b b + 2U|b|²b + ga evaluated at b = adiabatic_b(a): the b steady condition
// without drive and without γ_b. Of order δ_b⁻⁶ as δ_b grows.
Complex adiabatic_residual(Complex a, const TwoModeParams& p);

// Steady cavity occupations n = |a₀|² of the effective model, ascending.
// Solves Ũ²n³ + 2δ̃_aŨn² + (δ̃_a² + γ_a²)n - ℰ² = 0.
std::vector<double> effective_occupations(const EffectiveSingleMode& eff);

struct ReductionComparison {
    std::vector<double> full_occupation;       // |a₀|² of the cavity-driven two-mode model
    std::vector<double> effective_occupation;  // |a₀|² of the effective model
    std::vector<double> relative_error;        // per matched branch
    bool within_validity = false;

    double max_error() const;
};

// Matches branches in ascending |a₀|². Throws StructuralDisagreement when the
// two models have different numbers of steady states.
ReductionComparison reduction_error(const TwoModeParams& p, double cavity_drive);

// Turning points of the cavity-driven two-mode model in (x = U|b₀|², ℰ²),
// from x|D(x)|² = Ug²ℰ². Throws NoBistability when monostable, DomainError
// for g = 0 or U <= 0.
TurningPoints turning_drives_cavity(const TwoModeParams& p);

// Turning points of the effective model in (n = |a₀|², ℰ²).
TurningPoints turning_drives_effective(const EffectiveSingleMode& eff);

}  // namespace kerr_bic
