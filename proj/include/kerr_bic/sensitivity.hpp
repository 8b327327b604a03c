#pragma once

// Response derivatives with respect to the detuning, sensitivity profiles
// along a drive grid, and power-law fits of the divergence near turning and
// inflection points.

#include <optional>
#include <span>
#include <vector>

#include "kerr_bic/core.hpp"
#include "kerr_bic/steady_state.hpp"

namespace kerr_bic {

// Poles closer than this (absolute, in response units) raise PoleError.
inline constexpr double kPoleTolerance = 1e-12;

// dα/dΔ̃ = -8α(Δ̃ + α/2) / [3(α - α₋)(α - α₊)]. The denominator is evaluated
// as 3α² + 8Δ̃α + 4(Δ̃² + 1), which equals 3(α - α₋)(α - α₊) for every Δ̃.
double dalpha_ddelta(double alpha, double delta_t);

// dx/dδ_b = -x(x + δ̃_R/2) / [3(x - x₋)(x - x₊)], denominator evaluated as
// 3x² + 2δ̃_R x + |δ̃|²/4.
double dx_ddelta_b(double x, const EffectiveDetuning& dt);

enum class Branch { Lower, Middle, Upper };

const char* to_string(Branch b);

struct ProfileRow {
    double drive = 0.0;
    std::optional<double> response;    // empty: branch absent at this drive
    std::optional<double> derivative;
};

// Steady state on `branch` at drive I, or nothing if the branch does not
// exist there. In a monostable system the single root serves Lower and Upper.
std::optional<SteadyRoot> root_on_branch(const KerrSystem& system, double i_drive, Branch branch);

// Derivative of the response with respect to the system's detuning (Δ̃ for
// the single mode, δ_b for the two-mode system).
double response_derivative(const KerrSystem& system, double response);

std::vector<ProfileRow> sensitivity_profile(const KerrSystem& system, std::span<const double> i_grid,
                                            Branch branch);

struct ScalingFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double window_min = 0.0;  // smallest |I - I_ref| used
    double window_max = 0.0;
    std::size_t points = 0;

    double prefactor() const;
};

// Default relative fit window for |I - I_ref|/|I_ref|.
inline constexpr double kFitWindowLow = 1e-6;
inline constexpr double kFitWindowHigh = 1e-3;

// Least-squares line through (log|I - i_ref|, log|derivative|) over rows with
// rel_lo <= |I - i_ref|/|i_ref| <= rel_hi, excluding |I - i_ref| < 1e-6 |i_ref|.
// Throws DomainError with fewer than 20 usable rows or rows on both sides of
// i_ref.
ScalingFit fit_scaling(std::span<const ProfileRow> profile, double i_ref, double rel_lo = kFitWindowLow,
                       double rel_hi = kFitWindowHigh);

// Drives i_ref ∓ d for d log-spaced over [rel_lo, rel_hi]·|i_ref|, ascending
// in I. `below` selects the side.
std::vector<double> approach_grid(double i_ref, double rel_lo, double rel_hi, std::size_t count,
                                  bool below);

}  // namespace kerr_bic
