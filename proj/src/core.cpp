#include "kerr_bic/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kerr_bic {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void require_finite(Complex value, const char* what) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void TwoModeParams::validate() const {
    require_finite(delta_a, "delta_a");
    require_finite(delta_b, "delta_b");
    require_finite(gamma_a, "gamma_a");
    require_finite(gamma_b, "gamma_b");
    require_finite(g, "g");
    require_finite(u, "u");
    require_finite(omega, "omega");
    if (!(gamma_a > 0.0) || !(gamma_b > 0.0)) {
        throw DomainError("two-mode decay rates gamma_a and gamma_b must be positive");
    }
}

const char* to_string(Stability s) {
    return s == Stability::Stable ? "stable" : "unstable";
}

Spectrum Spectrum::from_eigenvalues(std::vector<Complex> eigenvalues) {
    Spectrum s;
    s.decay_rates.reserve(eigenvalues.size());
    s.bic_measure = std::numeric_limits<double>::infinity();
    for (const Complex& l : eigenvalues) {
        s.decay_rates.push_back(-l.imag());
        s.bic_measure = std::min(s.bic_measure, std::abs(l));
    }
    s.eigenvalues = std::move(eigenvalues);
    return s;
}

double Spectrum::min_decay_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (double d : decay_rates) r = std::min(r, d);
    return r;
}

double Spectrum::max_imag() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const Complex& l : eigenvalues) m = std::max(m, l.imag());
    return m;
}

double kerr_coefficient_optical(double chi3, double omega_a, double n, double v_eff) {
    require_finite(chi3, "chi3");
    if (!(omega_a > 0.0) || !(n > 0.0) || !(v_eff > 0.0)) {
        throw DomainError("kerr_coefficient_optical: omega_a, n and v_eff must be positive");
    }
    using namespace constants;
    return 3.0 * hbar * omega_a * omega_a * chi3 / (4.0 * epsilon0 * n * v_eff);
}

double drive_rabi_optical(double p_d, double gamma, double omega_d) {
    if (!(p_d >= 0.0) || !std::isfinite(p_d)) {
        throw DomainError("drive_rabi_optical: drive power must be non-negative");
    }
    if (!(gamma > 0.0) || !(omega_d > 0.0)) {
        throw DomainError("drive_rabi_optical: gamma and omega_d must be positive");
    }
    return std::sqrt(2.0 * gamma * p_d / (constants::hbar * omega_d));
}

double drive_rabi_magnon(double gamma_e, double rho, double d, double p_d) {
    for (double v : {gamma_e, rho, d, p_d}) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("drive_rabi_magnon: inputs must be non-negative");
        }
    }
    using namespace constants;
    return gamma_e * std::sqrt(5.0 * pi * rho * d * p_d / (3.0 * speed_of_light));
}

double normalized_drive_single(double u, double drive, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("normalized_drive_single: gamma must be positive");
    return 2.0 * u * drive * drive / (gamma * gamma * gamma);
}

}  // namespace kerr_bic
