#include "kerr_bic/stability.hpp"

#include <cmath>

namespace kerr_bic {

QuarticCoefficients routh_hurwitz_coeffs(const TwoModeParams& p, double x) {
    p.validate();
    require_finite(x, "x");
    if (x < 0.0) throw DomainError("routh_hurwitz_coeffs: x must be non-negative");
    const double da = p.delta_a, db = p.delta_b, ga = p.gamma_a, gb = p.gamma_b, g2 = p.g * p.g;
    QuarticCoefficients c;
    c.a1 = 2.0 * (ga + gb);
    c.a2 = da * da + 2.0 * g2 + (ga * ga + 4.0 * ga * gb + gb * gb) + (12.0 * x * x + 8.0 * db * x + db * db);
    c.a3 = 2.0 * da * da * gb + 2.0 * db * db * ga + 2.0 * (ga * gb + g2) * (ga + gb) + 16.0 * db * ga * x +
           24.0 * ga * x * x;
    c.a4 = det_h_two(p, x);
    return c;
}

double hurwitz_margin(const TwoModeParams& p, double x) {
    p.validate();
    if (x < 0.0) throw DomainError("hurwitz_margin: x must be non-negative");
    const double da = p.delta_a, db = p.delta_b, ga = p.gamma_a, gb = p.gamma_b, g2 = p.g * p.g;
    const double gs = ga + gb;
    const double q = 12.0 * x * x + 8.0 * db * x - da * da + db * db;
    const double t1 = 4.0 * ga * gb * q * q;
    const double t2 = 4.0 * ga * gb * gs * gs *
                      (24.0 * x * x + 16.0 * db * x + 2.0 * (da * da + db * db) + gs * gs);
    const double ds = da + db;
    const double t3 = 4.0 * g2 * gs * gs * (12.0 * x * x + 8.0 * ds * x + ds * ds + gs * gs);
    return t1 + t2 + t3;
}

double hurwitz_margin_direct(const TwoModeParams& p, double x) {
    const QuarticCoefficients c = routh_hurwitz_coeffs(p, x);
    return c.a1 * c.a2 * c.a3 - c.a3 * c.a3 - c.a1 * c.a1 * c.a4;
}

StabilityVerdict classify_two_mode(const TwoModeParams& p, double x) {
    const QuarticCoefficients c = routh_hurwitz_coeffs(p, x);
    const double margin = hurwitz_margin(p, x);
    const double margin_scale =
        std::abs(c.a1 * c.a2 * c.a3) + c.a3 * c.a3 + c.a1 * c.a1 * std::abs(c.a4);

    StabilityVerdict v;
    const bool hurwitz = c.a1 > 0.0 && c.a3 > 0.0 && c.a4 > 0.0 && margin > 0.0;
    v.stability = hurwitz ? Stability::Stable : Stability::Unstable;
    const bool det_edge = std::abs(c.a4) <= kMarginalBand * det_h_two_scale(p, x);
    const bool margin_edge = c.a4 > 0.0 && std::abs(margin) <= kMarginalBand * margin_scale;
    if (det_edge || margin_edge) {
        v.stability = Stability::Unstable;
        v.marginal = true;
    }
    return v;
}

bool is_stable(const TwoModeParams& p, double x) {
    return classify_two_mode(p, x).stability == Stability::Stable;
}

StabilityVerdict classify_single_mode(double alpha, double delta_t) {
    // -det of the linearized Hamiltonian
    const double value = 0.75 * alpha * alpha + 2.0 * delta_t * alpha + delta_t * delta_t + 1.0;
    const double scale = 0.75 * alpha * alpha + 2.0 * std::abs(delta_t * alpha) + delta_t * delta_t + 1.0;
    StabilityVerdict v;
    if (std::abs(value) <= kMarginalBand * scale) {
        v.stability = Stability::Unstable;
        v.marginal = true;
    } else {
        v.stability = value > 0.0 ? Stability::Stable : Stability::Unstable;
    }
    return v;
}

}  // namespace kerr_bic
