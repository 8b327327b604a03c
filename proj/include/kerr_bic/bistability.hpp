#pragma once

#include "kerr_bic/core.hpp"
#include "kerr_bic/steady_state.hpp"

namespace kerr_bic {

// Turning points of a cubic response curve. `lower`/`upper` are the response
// values (lower < upper unless degenerate); `i_lower`/`i_upper` the drives at
// those responses. Note i_lower > i_upper: the lower-response fold sits at the
// larger drive.
struct TurningPoints {
    double lower = 0.0;
    double upper = 0.0;
    double i_lower = 0.0;
    double i_upper = 0.0;
};

// α± = (-4Δ̃ ± 2 sqrt(Δ̃² - 3))/3. Requires Δ̃ <= -√3 (U > 0 convention);
// the cusp Δ̃ = -√3 returns α₋ = α₊. Throws NoBistability otherwise.
TurningPoints turning_points_single(double delta_t);

// Onset of bistability where dI/dα = d²I/dα² = 0.
struct CriticalPoint {
    double delta_c = 0.0;
    double alpha_c = 0.0;
    double i_c = 0.0;
};
CriticalPoint critical_point_single();

// UΔ < 0 and Δ² > 3γ².
bool is_bistable_single(double u, double delta, double gamma);

// x± = -δ̃_R/3 ± sqrt(δ̃_R² - 3δ̃_I²)/6. Throws NoBistability unless
// δ̃_R <= √3 δ̃_I; the cusp returns x₋ = x₊.
TurningPoints turning_points_two(const EffectiveDetuning& dt);

// δ̃_R < √3 δ̃_I (strict). Throws InvariantViolation if δ̃_I >= 0.
bool is_bistable_two(const EffectiveDetuning& dt);

}  // namespace kerr_bic
