#pragma once

// Domain types shared by every module, the error hierarchy, and the
// conversions from physical platform parameters to the dimensionless model
// parameters. Everything downstream of this header is unit-free.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace kerr_bic {

using Complex = std::complex<double>;

template <std::size_t N>
using ComplexMatrix = std::array<std::array<Complex, N>, N>;

using Matrix2 = ComplexMatrix<2>;
using Matrix4 = ComplexMatrix<4>;

// CODATA-2018 exact/recommended values (SI).
namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double epsilon0 = 8.8541878128e-12;    // F / m
inline constexpr double speed_of_light = 299792458.0;   // m / s
}  // namespace constants

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violated by an argument (negative drive, zero rate, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Iterative solver did not converge or produced non-finite output.
class NumericError : public Error {
public:
    using Error::Error;
};

// A structural invariant of the model failed (e.g. Im(δ̃) >= 0).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// The requested operation needs a bistable regime that the parameters do
// not provide. `value` is the quantity tested, `boundary` the threshold.
class NoBistability : public Error {
public:
    NoBistability(const std::string& what, double value, double boundary)
        : Error(what), value_(value), boundary_(boundary) {}
    double value() const noexcept { return value_; }
    double boundary() const noexcept { return boundary_; }

private:
    double value_;
    double boundary_;
};

enum class TurningPoint { Lower, Upper };

// Response derivative evaluated on one of its poles.
class PoleError : public Error {
public:
    PoleError(const std::string& what, TurningPoint which)
        : Error(what), which_(which) {}
    TurningPoint which() const noexcept { return which_; }

private:
    TurningPoint which_;
};

// Exponential fit rejected (tail not exponential enough).
class FitError : public Error {
public:
    FitError(const std::string& what, double r_squared)
        : Error(what), r_squared_(r_squared) {}
    double r_squared() const noexcept { return r_squared_; }

private:
    double r_squared_;
};

// Full and reduced models disagree on the number of steady branches.
class StructuralDisagreement : public Error {
public:
    StructuralDisagreement(const std::string& what, std::size_t full_roots,
                           std::size_t reduced_roots)
        : Error(what), full_roots_(full_roots), reduced_roots_(reduced_roots) {}
    std::size_t full_roots() const noexcept { return full_roots_; }
    std::size_t reduced_roots() const noexcept { return reduced_roots_; }

private:
    std::size_t full_roots_;
    std::size_t reduced_roots_;
};

void require_finite(double value, const char* what);
void require_finite(Complex value, const char* what);

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

// Single driven Kerr mode in units of its linewidth. The library fixes U > 0;
// a U < 0 system maps onto this one under (U, Δ) -> (-U, -Δ).
struct SingleModeParams {
    double delta_t = 0.0;  // Δ/γ with Δ = ω_a - ω_d
};

// Two coupled modes, Kerr nonlinearity and drive on mode b. All entries share
// one rate unit.
struct TwoModeParams {
    double delta_a = 0.0;  // ω_a - ω_d
    double delta_b = 0.0;  // ω_b + U - ω_d
    double gamma_a = 1.0;
    double gamma_b = 1.0;
    double g = 0.0;
    double u = 1.0;
    double omega = 0.0;

    // Throws DomainError unless both decay rates are positive and every
    // field is finite.
    void validate() const;
};

// Linear two-mode system of the non-Hermitian coupled-mode Hamiltonian
// [[Δ_a - iκ, J], [J, Δ_b - iγ]] with J = g - iΓ. Rates may be negative (gain).
struct LinearTwoModeParams {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double g = 0.0;
    double dissipative_coupling = 0.0;  // Γ

    Complex coupling() const { return {g, -dissipative_coupling}; }
};

enum class Stability { Stable, Unstable };

const char* to_string(Stability s);

// One steady-state branch. `response` is α for the single mode and x = U|b₀|²
// for the two-mode system.
struct SteadyRoot {
    double response = 0.0;
    Complex amplitude_a{};
    std::optional<Complex> amplitude_b;
    Stability stability = Stability::Stable;
    // Set when the stability determinant vanishes within the marginal band;
    // such roots are reported Unstable.
    bool marginal = false;
};

inline constexpr double kDefaultBicTolerance = 1e-6;

struct Spectrum {
    std::vector<Complex> eigenvalues;
    std::vector<double> decay_rates;  // -Im(λ)
    double bic_measure = 0.0;         // min |λ|

    static Spectrum from_eigenvalues(std::vector<Complex> eigenvalues);

    double min_decay_rate() const;
    double max_imag() const;
    bool is_bic(double tolerance = kDefaultBicTolerance) const {
        return bic_measure < tolerance;
    }
};

// Systems addressed by sweeps, sensitivity profiles and ringdowns.
struct SingleModeSystem {
    double delta_t = 0.0;
    // U/γ, used only to turn α into a complex amplitude (α = 4(U/γ)|a₀|²).
    double u_over_gamma = 1.0;
};

struct TwoModeSystem {
    TwoModeParams params;
};

using KerrSystem = std::variant<SingleModeSystem, TwoModeSystem>;

// ---------------------------------------------------------------------------
// Physical -> model conversions (SI inputs, rates in rad/s)
// ---------------------------------------------------------------------------

// U = 3ħω_a²χ⁽³⁾ / (4ε₀ n V_eff)
double kerr_coefficient_optical(double chi3, double omega_a, double n, double v_eff);

// ℰ = sqrt(2γP_d / (ħω_d))
double drive_rabi_optical(double p_d, double gamma, double omega_d);

// Ω = γ_e sqrt(5πρ d P_d / (3c))
double drive_rabi_magnon(double gamma_e, double rho, double d, double p_d);

// Normalized single-mode drive I = 2U|ℰ|²/γ³.
double normalized_drive_single(double u, double drive, double gamma);

}  // namespace kerr_bic
