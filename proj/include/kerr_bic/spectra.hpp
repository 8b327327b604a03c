#pragma once

// Eigenvalue analysis: the linear non-Hermitian two-mode Hamiltonian and the
// linearized Hamiltonians of the Kerr systems. All eigenvalues live in the
// frame rotating at the drive, so |λ| -> 0 marks a BIC.

#include <span>
#include <vector>

#include "kerr_bic/core.hpp"
#include "kerr_bic/polynomial.hpp"
#include "kerr_bic/steady_state.hpp"

namespace kerr_bic {

enum class SymmetryTag { PT, AntiPT, None };

const char* to_string(SymmetryTag tag);

struct SymmetryClass {
    SymmetryTag tag = SymmetryTag::None;
    bool at_exceptional_point = false;
    bool at_bic = false;
};

// Coefficients of λ'⁴ + a₁λ'³ + a₂λ'² + a₃λ' + a₄ with λ' = -iλ.
struct QuarticCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
};

// λ± = (Δ_a+Δ_b)/2 - iγ̄ ± sqrt(((Δ_a-Δ_b)/2 - iγ̃)² + (g - iΓ)²), with
// γ̄ = (κ+γ)/2, γ̃ = (κ-γ)/2. Index 0 holds λ₊, index 1 λ₋.
Spectrum linear_two_mode_eigenvalues(const LinearTwoModeParams& p);

Matrix2 linear_two_mode_hamiltonian(const LinearTwoModeParams& p);

SymmetryClass classify_symmetry(const LinearTwoModeParams& p, double tol);

// [[Δ̃+α-i, β], [-β*, -Δ̃-α-i]] with |β| = α/2, arg β = 2·a0_phase.
Matrix2 linearized_single_hamiltonian(double alpha, double delta_t, double a0_phase);

// (α/2)² - (Δ̃+α)² - 1
double det_h_single(double alpha, double delta_t);

// λ = -i ± sqrt((Δ̃+α)² - (α/2)²); index 0 carries the + branch.
Spectrum eigenvalues_single(double alpha, double delta_t);

// 4x4 Hamiltonian of the perturbations [A, B, A†, B†] about the steady state
// (a₀, b₀) with x = U|b₀|². Throws DomainError if the root is inconsistent
// with p (missing b₀ or U|b₀|² != x).
Matrix4 linearized_two_hamiltonian(const TwoModeParams& p, const SteadyRoot& root);

// Closed-form det H: 12(δ_a²+γ_a²)x² + 8(-δ_a g² + δ_b δ_a² + δ_b γ_a²)x
//                    + (g² - δ_aδ_b + γ_aγ_b)² + (δ_aγ_b + δ_bγ_a)²
double det_h_two(const TwoModeParams& p, double x);

// Sum of the magnitudes of the terms of det_h_two; the scale for relative
// zero tests.
double det_h_two_scale(const TwoModeParams& p, double x);

// Four eigenvalues from the characteristic polynomial of -iH (real
// coefficients up to rounding) solved by Durand-Kerner, mapped back with
// λ = iλ'. Throws NumericError on non-convergence.
Spectrum eigenvalues_two(const TwoModeParams& p, const SteadyRoot& root,
                         const poly::DurandKernerOptions& options = {});

// Characteristic polynomial of -iH computed numerically from the matrix
// (independent of the closed forms in `stability`).
QuarticCoefficients numeric_quartic_coefficients(const TwoModeParams& p, const SteadyRoot& root);

// Root with x = U|b₀|² and the given phase of b₀; amplitude a₀ follows the
// steady relation a₀ = -igb₀/(iδ_a + γ_a). Used to probe arbitrary x.
SteadyRoot two_mode_root_at(const TwoModeParams& p, double x, double b0_phase = 0.0);

struct BicPoint {
    double delta_b = 0.0;
    TurningPoint branch = TurningPoint::Lower;
    double x = 0.0;
    double drive = 0.0;
};

struct BicLocus {
    std::vector<BicPoint> points;  // grid order, lower before upper
    std::vector<double> gaps;      // δ_b values without bistability
};

// Both turning points x± and their drives I(x±) for every bistable δ_b.
BicLocus bic_locus(const TwoModeParams& p, std::span<const double> delta_b_grid);

}  // namespace kerr_bic
