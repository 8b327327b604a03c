#include "kerr_bic/bistability.hpp"

#include <cmath>
#include <limits>

namespace kerr_bic {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Discriminants within a few ulps of zero count as the cusp.
double cusp_clamped(double disc, double scale) {
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * scale;
    if (disc < -slack) return std::numeric_limits<double>::quiet_NaN();
    return std::max(disc, 0.0);
}

}  // namespace

TurningPoints turning_points_single(double delta_t) {
    require_finite(delta_t, "delta_t");
    if (delta_t >= 0.0) {
        throw NoBistability("no bistability: requires delta_t < -sqrt(3) for U > 0", delta_t, -kSqrt3);
    }
    const double disc = cusp_clamped(delta_t * delta_t - 3.0, delta_t * delta_t + 3.0);
    if (std::isnan(disc)) {
        throw NoBistability("no bistability: delta_t^2 <= 3", delta_t, -kSqrt3);
    }
    const double root = std::sqrt(disc);
    TurningPoints tp;
    tp.lower = (-4.0 * delta_t - 2.0 * root) / 3.0;
    tp.upper = (-4.0 * delta_t + 2.0 * root) / 3.0;
    tp.i_lower = single_mode_intensity(tp.lower, delta_t);
    tp.i_upper = single_mode_intensity(tp.upper, delta_t);
    return tp;
}

CriticalPoint critical_point_single() {
    CriticalPoint c;
    c.delta_c = -kSqrt3;
    c.alpha_c = 4.0 * kSqrt3 / 3.0;
    c.i_c = -0.5 * c.alpha_c * c.alpha_c * (c.delta_c + 0.5 * c.alpha_c);
    return c;
}

bool is_bistable_single(double u, double delta, double gamma) {
    require_finite(u, "u");
    require_finite(delta, "delta");
    if (!(gamma > 0.0)) throw DomainError("is_bistable_single: gamma must be positive");
    return u * delta < 0.0 && delta * delta > 3.0 * gamma * gamma;
}

bool is_bistable_two(const EffectiveDetuning& dt) {
    if (!(dt.imag_part < 0.0)) {
        throw InvariantViolation("effective detuning must have a negative imaginary part");
    }
    return dt.real_part < kSqrt3 * dt.imag_part;
}

TurningPoints turning_points_two(const EffectiveDetuning& dt) {
    if (!(dt.imag_part < 0.0)) {
        throw InvariantViolation("effective detuning must have a negative imaginary part");
    }
    const double boundary = kSqrt3 * dt.imag_part;
    if (dt.real_part >= 0.0) {
        throw NoBistability("no bistability: requires Re(delta~) < sqrt(3) Im(delta~)", dt.real_part, boundary);
    }
    const double r2 = dt.real_part * dt.real_part;
    const double i2 = 3.0 * dt.imag_part * dt.imag_part;
    const double disc = cusp_clamped(r2 - i2, r2 + i2);
    if (std::isnan(disc)) {
        throw NoBistability("no bistability: requires Re(delta~) < sqrt(3) Im(delta~)", dt.real_part, boundary);
    }
    const double root = std::sqrt(disc) / 6.0;
    TurningPoints tp;
    tp.lower = -dt.real_part / 3.0 - root;
    tp.upper = -dt.real_part / 3.0 + root;
    tp.i_lower = two_mode_intensity(tp.lower, dt);
    tp.i_upper = two_mode_intensity(tp.upper, dt);
    return tp;
}

}  // namespace kerr_bic
