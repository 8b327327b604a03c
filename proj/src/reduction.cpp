#include "kerr_bic/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "kerr_bic/polynomial.hpp"
#include "kerr_bic/steady_state.hpp"

namespace kerr_bic {

namespace {

void require_detuned_b(const TwoModeParams& p, const char* who) {
    if (p.delta_b == 0.0) throw DomainError(std::string(who) + ": delta_b = 0 leaves mode b resonant");
}

}  // namespace

EffectiveSingleMode effective_params(const TwoModeParams& p, double cavity_drive) {
    p.validate();
    require_finite(cavity_drive, "cavity drive");
    require_detuned_b(p, "effective_params");
    const double r = p.g / p.delta_b;
    EffectiveSingleMode eff;
    eff.delta_eff = p.delta_a - p.g * p.g / p.delta_b;
    eff.u_eff = 2.0 * r * r * r * r * p.u;
    eff.gamma_eff = p.gamma_a;
    eff.drive_eff = cavity_drive;
    const double db = std::abs(p.delta_b);
    eff.within_validity = db >= 10.0 * p.gamma_b && db >= 10.0 * std::abs(p.g);
    return eff;
}

Complex adiabatic_b(Complex a, const TwoModeParams& p) {
    require_finite(a, "a");
    require_detuned_b(p, "adiabatic_b");
    const double r = p.g / p.delta_b;
    return -r * a + 2.0 * r * r * r * (p.u / p.delta_b) * std::norm(a) * a;
}

Complex adiabatic_residual(Complex a, const TwoModeParams& p) {
    const Complex b = adiabatic_b(a, p);
    return p.delta_b * b + 2.0 * p.u * std::norm(b) * b + p.g * a;
}

std::vector<double> effective_occupations(const EffectiveSingleMode& eff) {
    if (!(eff.gamma_eff > 0.0)) throw DomainError("effective_occupations: gamma must be positive");
    const double e2 = eff.drive_eff * eff.drive_eff;
    const double lin = eff.delta_eff * eff.delta_eff + eff.gamma_eff * eff.gamma_eff;
    if (eff.u_eff == 0.0 || e2 == 0.0) return {e2 / lin};

    const double u = eff.u_eff;
    auto raw = poly::real_cubic_roots(u * u, 2.0 * eff.delta_eff * u, lin, -e2);
    auto f = [&](double n) { return n * (std::pow(eff.delta_eff + u * n, 2) + eff.gamma_eff * eff.gamma_eff) - e2; };
    auto df = [&](double n) { return 3.0 * u * u * n * n + 4.0 * eff.delta_eff * u * n + lin; };
    std::vector<double> out;
    for (double n : raw) {
        n = poly::polish_root(f, df, n, 1e-14 * std::max(1.0, e2));
        if (n > 0.0) out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw NumericError("effective_occupations: no positive root");
    return out;
}

double ReductionComparison::max_error() const {
    double m = 0.0;
    for (double e : relative_error) m = std::max(m, e);
    return m;
}

ReductionComparison reduction_error(const TwoModeParams& p, double cavity_drive) {
    const EffectiveSingleMode eff = effective_params(p, cavity_drive);
    ReductionComparison cmp;
    cmp.within_validity = eff.within_validity;

    for (const auto& r : solve_two_mode_cavity_driven(cavity_drive, p)) {
        cmp.full_occupation.push_back(std::norm(r.amplitude_a));
    }
    std::sort(cmp.full_occupation.begin(), cmp.full_occupation.end());
    cmp.effective_occupation = effective_occupations(eff);

    if (cmp.full_occupation.size() != cmp.effective_occupation.size()) {
        throw StructuralDisagreement("reduction_error: full and effective models disagree on the number of steady states",
                                     cmp.full_occupation.size(), cmp.effective_occupation.size());
    }
    for (std::size_t k = 0; k < cmp.full_occupation.size(); ++k) {
        const double full = cmp.full_occupation[k];
        const double diff = std::abs(cmp.effective_occupation[k] - full);
        cmp.relative_error.push_back(full > 0.0 ? diff / full : diff);
    }
    return cmp;
}

TurningPoints turning_drives_cavity(const TwoModeParams& p) {
    p.validate();
    if (p.g == 0.0) throw DomainError("turning_drives_cavity: g = 0 decouples the Kerr mode");
    if (!(p.u > 0.0)) throw DomainError("turning_drives_cavity: U must be positive");
    // x|A x + B|² with A = 2(iδ_a + γ_a), B = (iδ_a + γ_a)(δ_b - iγ_b) - ig².
    const Complex ia_g(p.gamma_a, p.delta_a);
    const Complex a = 2.0 * ia_g;
    const Complex b = ia_g * Complex(p.delta_b, -p.gamma_b) - Complex(0.0, p.g * p.g);
    const double c2 = 3.0 * std::norm(a), c1 = 4.0 * (a * std::conj(b)).real(), c0 = std::norm(b);
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc <= 0.0) throw NoBistability("cavity-driven two-mode system is monostable", disc, 0.0);
    const double sq = std::sqrt(disc);
    // Stable quadratic formula.
    const double q = -0.5 * (c1 + std::copysign(sq, c1));
    double x1 = q / c2, x2 = c0 / q;
    if (x1 > x2) std::swap(x1, x2);
    if (x1 <= 0.0) throw NoBistability("cavity-driven turning points are not both positive", x1, 0.0);
    const double scale = p.u * p.g * p.g;
    auto e2 = [&](double x) { return x * std::norm(a * x + b) / scale; };
    return {x1, x2, e2(x1), e2(x2)};
}

TurningPoints turning_drives_effective(const EffectiveSingleMode& eff) {
    if (!(eff.u_eff > 0.0)) throw DomainError("turning_drives_effective: effective Kerr coefficient must be positive");
    const TurningPoints tp = turning_points_single(eff.delta_t());
    // α = 2Ũn/γ_a and I = Ũℰ²/γ_a³.
    const double g = eff.gamma_eff;
    const double n_per_alpha = g / (2.0 * eff.u_eff);
    const double e2_per_i = g * g * g / eff.u_eff;
    return {tp.lower * n_per_alpha, tp.upper * n_per_alpha, tp.i_lower * e2_per_i, tp.i_upper * e2_per_i};
}

}  // namespace kerr_bic
