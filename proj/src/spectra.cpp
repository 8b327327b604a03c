#include "kerr_bic/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "kerr_bic/bistability.hpp"

namespace kerr_bic {

const char* to_string(SymmetryTag tag) {
    switch (tag) {
        case SymmetryTag::PT: return "PT";
        case SymmetryTag::AntiPT: return "antiPT";
        case SymmetryTag::None: break;
    }
    return "none";
}

namespace {

constexpr Complex kI{0.0, 1.0};

// Square-root argument of the linear two-mode eigenvalue formula.
Complex linear_discriminant(const LinearTwoModeParams& p) {
    const double gamma_diff = 0.5 * (p.kappa - p.gamma);
    const Complex half_split(0.5 * (p.delta_a - p.delta_b), -gamma_diff);
    const Complex j = p.coupling();
    return half_split * half_split + j * j;
}

}  // namespace

Matrix2 linear_two_mode_hamiltonian(const LinearTwoModeParams& p) {
    const Complex j = p.coupling();
    return {{{Complex(p.delta_a, -p.kappa), j}, {j, Complex(p.delta_b, -p.gamma)}}};
}

Spectrum linear_two_mode_eigenvalues(const LinearTwoModeParams& p) {
    const double gamma_mean = 0.5 * (p.kappa + p.gamma);
    const Complex centre(0.5 * (p.delta_a + p.delta_b), -gamma_mean);
    const Complex root = poly::branch_sqrt(linear_discriminant(p));
    return Spectrum::from_eigenvalues({centre + root, centre - root});
}

SymmetryClass classify_symmetry(const LinearTwoModeParams& p, double tol) {
    if (!(tol > 0.0)) throw DomainError("classify_symmetry: tolerance must be positive");
    SymmetryClass c;
    const bool pt = std::abs(p.kappa + p.gamma) <= tol && std::abs(p.dissipative_coupling) <= tol &&
                    std::abs(p.delta_a - p.delta_b) <= tol;
    const bool anti_pt = std::abs(p.g) <= tol && std::abs(p.kappa - p.gamma) <= tol &&
                         std::abs(p.delta_a + p.delta_b) <= tol;
    if (pt) {
        c.tag = SymmetryTag::PT;
    } else if (anti_pt) {
        c.tag = SymmetryTag::AntiPT;
    }
    c.at_exceptional_point = std::abs(linear_discriminant(p)) <= tol;
    c.at_bic = linear_two_mode_eigenvalues(p).bic_measure < tol;
    return c;
}

Matrix2 linearized_single_hamiltonian(double alpha, double delta_t, double a0_phase) {
    require_finite(alpha, "alpha");
    require_finite(delta_t, "delta_t");
    require_finite(a0_phase, "a0_phase");
    if (alpha < 0.0) throw DomainError("linearized_single_hamiltonian: alpha must be non-negative");
    const double shift = delta_t + alpha;
    const Complex beta = std::polar(0.5 * alpha, 2.0 * a0_phase);
    return {{{Complex(shift, -1.0), beta}, {-std::conj(beta), Complex(-shift, -1.0)}}};
}

double det_h_single(double alpha, double delta_t) {
    const double shift = delta_t + alpha;
    return 0.25 * alpha * alpha - shift * shift - 1.0;
}

Spectrum eigenvalues_single(double alpha, double delta_t) {
    require_finite(alpha, "alpha");
    require_finite(delta_t, "delta_t");
    if (alpha < 0.0) throw DomainError("eigenvalues_single: alpha must be non-negative");
    const double shift = delta_t + alpha;
    const double half = 0.5 * alpha;
    // (Δ̃+α)² - (α/2)² factored to keep digits near the BIC.
    const double arg = (shift - half) * (shift + half);
    const Complex root = poly::branch_sqrt(Complex(arg, 0.0));
    return Spectrum::from_eigenvalues({-kI + root, -kI - root});
}

SteadyRoot two_mode_root_at(const TwoModeParams& p, double x, double b0_phase) {
    p.validate();
    if (x < 0.0) throw DomainError("two_mode_root_at: x must be non-negative");
    if (!(p.u > 0.0) && x != 0.0) throw DomainError("two_mode_root_at: x > 0 needs U > 0");
    SteadyRoot r;
    r.response = x;
    const double mag = (x == 0.0) ? 0.0 : std::sqrt(x / p.u);
    const Complex b0 = std::polar(mag, b0_phase);
    r.amplitude_b = b0;
    r.amplitude_a = Complex(0.0, -p.g) * b0 / Complex(p.gamma_a, p.delta_a);
    return r;
}

Matrix4 linearized_two_hamiltonian(const TwoModeParams& p, const SteadyRoot& root) {
    p.validate();
    if (!root.amplitude_b) {
        throw DomainError("linearized_two_hamiltonian: root carries no mode-b amplitude");
    }
    const Complex b0 = *root.amplitude_b;
    require_finite(b0, "b0");
    const double x = root.response;
    if (std::abs(p.u * std::norm(b0) - x) > 1e-10 * std::max(1.0, std::abs(x))) {
        throw DomainError("linearized_two_hamiltonian: root inconsistent with U|b0|^2 = x");
    }
    const Complex pump = 2.0 * p.u * b0 * b0;
    Matrix4 h{};
    h[0][0] = Complex(p.delta_a, -p.gamma_a);
    h[0][1] = p.g;
    h[1][0] = p.g;
    h[1][1] = Complex(p.delta_b + 4.0 * x, -p.gamma_b);
    h[1][3] = pump;
    h[2][2] = Complex(-p.delta_a, -p.gamma_a);
    h[2][3] = -p.g;
    h[3][1] = -std::conj(pump);
    h[3][2] = -p.g;
    h[3][3] = Complex(-p.delta_b - 4.0 * x, -p.gamma_b);
    return h;
}

double det_h_two(const TwoModeParams& p, double x) {
    const double da = p.delta_a, db = p.delta_b, ga = p.gamma_a, gb = p.gamma_b, g2 = p.g * p.g;
    const double c0 = g2 - da * db + ga * gb;
    const double c1 = da * gb + db * ga;
    return 12.0 * (da * da + ga * ga) * x * x + 8.0 * (-da * g2 + db * da * da + db * ga * ga) * x +
           c0 * c0 + c1 * c1;
}

double det_h_two_scale(const TwoModeParams& p, double x) {
    const double da = p.delta_a, db = p.delta_b, ga = p.gamma_a, gb = p.gamma_b, g2 = p.g * p.g;
    const double c0 = g2 - da * db + ga * gb;
    const double c1 = da * gb + db * ga;
    return 12.0 * (da * da + ga * ga) * x * x +
           8.0 * (std::abs(da) * g2 + std::abs(db) * (da * da + ga * ga)) * std::abs(x) +
           c0 * c0 + c1 * c1;
}

namespace {

Matrix4 rotated(const Matrix4& h) {
    Matrix4 m = h;
    for (auto& row : m) {
        for (auto& e : row) e *= -kI;
    }
    return m;
}

}  // namespace

QuarticCoefficients numeric_quartic_coefficients(const TwoModeParams& p, const SteadyRoot& root) {
    const auto c = poly::characteristic_polynomial(rotated(linearized_two_hamiltonian(p, root)));
    return {c[0].real(), c[1].real(), c[2].real(), c[3].real()};
}

Spectrum eigenvalues_two(const TwoModeParams& p, const SteadyRoot& root,
                         const poly::DurandKernerOptions& options) {
    const auto coeffs = poly::characteristic_polynomial(rotated(linearized_two_hamiltonian(p, root)));
    auto primed = poly::durand_kerner(coeffs, options);
    std::vector<Complex> lambdas;
    lambdas.reserve(primed.size());
    for (const Complex& lp : primed) lambdas.push_back(kI * lp);
    std::sort(lambdas.begin(), lambdas.end(),
              [](const Complex& l, const Complex& r) { return std::abs(l) < std::abs(r); });
    return Spectrum::from_eigenvalues(std::move(lambdas));
}

BicLocus bic_locus(const TwoModeParams& p, std::span<const double> delta_b_grid) {
    if (delta_b_grid.empty()) throw DomainError("bic_locus: empty delta_b grid");
    BicLocus locus;
    for (double db : delta_b_grid) {
        TwoModeParams q = p;
        q.delta_b = db;
        const EffectiveDetuning dt = effective_detuning(q);
        if (!is_bistable_two(dt)) {
            locus.gaps.push_back(db);
            continue;
        }
        const TurningPoints tp = turning_points_two(dt);
        locus.points.push_back({db, TurningPoint::Lower, tp.lower, tp.i_lower});
        locus.points.push_back({db, TurningPoint::Upper, tp.upper, tp.i_upper});
    }
    return locus;
}

}  // namespace kerr_bic
