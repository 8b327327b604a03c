#pragma once

// Steady states of the driven Kerr systems: the forward cubic maps
// (response -> drive), their inversion with amplitude reconstruction and
// stability labels, and hysteresis sweeps by branch continuation.

#include <span>
#include <vector>

#include "kerr_bic/core.hpp"
#include "kerr_bic/polynomial.hpp"

namespace kerr_bic {

// δ̃ = δ_b - iγ_b - g²/(δ_a - iγ_a). Its imaginary part is always negative.
struct EffectiveDetuning {
    Complex value;
    double real_part = 0.0;
    double imag_part = 0.0;

    EffectiveDetuning() = default;
    explicit EffectiveDetuning(Complex v) : value(v), real_part(v.real()), imag_part(v.imag()) {}

    double abs2() const { return real_part * real_part + imag_part * imag_part; }
};

// I = (α/2)(1 + (Δ̃ + α/2)²)
double single_mode_intensity(double alpha, double delta_t);

// dI/dα = (3α²/4 + 2Δ̃α + Δ̃² + 1)/2
double single_mode_intensity_slope(double alpha, double delta_t);

// All steady states of the single mode for drive I, ascending in α. Amplitudes
// use α = 4(U/γ)|a₀|² and a real drive ℰ/γ = sqrt(I / (2U/γ)).
// `realness_tol` is handed to the cubic solver (see poly::real_cubic_roots).
std::vector<SteadyRoot> solve_single_mode(double i_drive, double delta_t,
                                          double u_over_gamma = 1.0,
                                          double realness_tol = poly::kRealnessTolerance);

// Complex amplitude a₀ of a single-mode root with real drive ℰ/γ.
Complex single_mode_amplitude(double alpha, double delta_t, double u_over_gamma);

EffectiveDetuning effective_detuning(const TwoModeParams& p);

// I = 4x³ + 4δ̃_R x² + |δ̃|² x
double two_mode_intensity(double x, const EffectiveDetuning& dt);

// dI/dx = 12x² + 8δ̃_R x + |δ̃|²
double two_mode_intensity_slope(double x, const EffectiveDetuning& dt);

// All steady states of the mode-b driven two-mode system for I = UΩ² (U > 0),
// ascending in x = U|b₀|². b₀ = -iΩ/(δ̃ + 2x) with real Ω = sqrt(I/U), and
// a₀ = -igb₀/(iδ_a + γ_a).
std::vector<SteadyRoot> solve_two_mode(double i_drive, const TwoModeParams& p,
                                       double realness_tol = poly::kRealnessTolerance);

// Steady states when the drive ℰ acts on mode a instead of b (Ω = 0), the
// configuration of the adiabatic-elimination argument. Returns roots
// ascending in x = U|b₀|² with a₀ = ℰ w/D, b₀ = -gℰ/D, w = δ_b - iγ_b + 2x,
// D = (iδ_a + γ_a) w - ig².
std::vector<SteadyRoot> solve_two_mode_cavity_driven(double cavity_drive, const TwoModeParams& p);

// ---------------------------------------------------------------------------
// Hysteresis
// ---------------------------------------------------------------------------

enum class SweepDirection { Up, Down };

struct SweepPoint {
    double drive = 0.0;
    double response = 0.0;
    Stability stability = Stability::Stable;
    std::size_t root_count = 0;
    bool jumped = false;  // the followed branch vanished before this point
};

struct JumpEvent {
    std::size_t index = 0;  // grid index of the first point after the jump
    double drive_before = 0.0;
    double drive_after = 0.0;
    double response_before = 0.0;
    double response_after = 0.0;
};

// Turning point of the response curve, where a BIC sits.
struct BicLocusPoint {
    double response = 0.0;
    double drive = 0.0;
};

struct SweepTrace {
    SweepDirection direction = SweepDirection::Up;
    std::vector<SweepPoint> points;
    std::vector<JumpEvent> jumps;
    std::vector<BicLocusPoint> bic_loci;  // empty when monostable
};

// Follows the stable branch nearest to the previous response across the drive
// grid. A jump is recorded when none of the current stable roots continues the
// followed one, i.e. every current stable root is closer to some other stable
// root of the previous grid point. Throws DomainError for an empty grid or one
// not strictly monotone in `direction`.
SweepTrace hysteresis_sweep(const KerrSystem& system, std::span<const double> i_values,
                            SweepDirection direction);

// Continuation step of hysteresis_sweep on precomputed root sets, one per
// drive value (lets callers solve the grid points concurrently).
SweepTrace follow_branches(const KerrSystem& system, std::span<const double> i_values,
                           std::span<const std::vector<SteadyRoot>> roots_per_point, SweepDirection direction);

// Roots for a system at drive I (dispatch helper shared by sweeps/profiles).
std::vector<SteadyRoot> solve_steady(const KerrSystem& system, double i_drive);

}  // namespace kerr_bic
