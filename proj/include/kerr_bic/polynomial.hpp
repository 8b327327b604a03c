#pragma once

// Polynomial and small-matrix numerics: the real cubic used by every
// steady-state solve, Durand-Kerner for the quartic eigenvalue problem, and
// characteristic polynomials/determinants of 2x2 and 4x4 complex matrices.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "kerr_bic/core.hpp"

namespace kerr_bic::poly {

// A complex cubic root is accepted as real when |Im| <= tol * (1 + |Re|).
inline constexpr double kRealnessTolerance = 1e-9;

// Real roots of c3 x³ + c2 x² + c1 x + c0 (c3 != 0), ascending. Trigonometric
// form when three distinct real roots exist, Cardano otherwise. A complex pair
// that passes the realness test is returned as a double root, so the result
// always holds 1 or 3 values.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0,
                                     double realness_tol = kRealnessTolerance);

// Newton polish of a root of `f` (at most `max_iter` steps, each accepted only
// if it lowers |f|). When the result still misses `target_residual`, a sign
// change is searched in a widening neighbourhood and bisected.
template <class F, class D>
double polish_root(F&& f, D&& df, double x, double target_residual, int max_iter = 5) {
    double fx = f(x);
    for (int it = 0; it < max_iter && std::abs(fx) > 0.0; ++it) {
        const double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double xn = x - fx / d;
        const double fn = f(xn);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = xn;
        fx = fn;
    }
    if (std::abs(fx) <= target_residual) return x;

    // Multiplicity-aware fallback: near a double root the residual is flat, so
    // look for the sign change of the nearby simple pair and bisect it.
    for (double h = 1e-12 * (1.0 + std::abs(x)); h < 1e-3 * (1.0 + std::abs(x)); h *= 4.0) {
        for (double side : {-1.0, 1.0}) {
            double lo = x, hi = x + side * h;
            double flo = fx, fhi = f(hi);
            if ((flo < 0.0) == (fhi < 0.0)) continue;
            for (int k = 0; k < 200 && std::abs(hi - lo) > 0.0; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                const double fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                    fhi = fm;
                }
            }
            return std::abs(flo) <= std::abs(fhi) ? lo : hi;
        }
    }
    return x;
}

struct DurandKernerOptions {
    int max_iterations = 200;
    double relative_tolerance = 1e-13;
    std::uint64_t seed = 0x6b657272u;  // initial-circle perturbation
};

// Roots of the monic polynomial z^n + c[0] z^(n-1) + ... + c[n-1] by
// Weierstrass/Durand-Kerner simultaneous iteration from a randomly perturbed
// circle, finished with one guarded Newton step per root. Converged when every
// update is below tol * (1 + |z|) or every residual sits at the rounding floor
// of the polynomial evaluation. Throws NumericError otherwise.
std::vector<Complex> durand_kerner(std::span<const Complex> monic_coeffs,
                                   const DurandKernerOptions& options = {});

// Horner evaluation of the monic polynomial above.
Complex evaluate_monic(std::span<const Complex> monic_coeffs, Complex z);

// Coefficients c of det(zI - M) = z^n + c[0] z^(n-1) + ... + c[n-1] via the
// Faddeev-LeVerrier recursion.
std::vector<Complex> characteristic_polynomial(const Matrix2& m);
std::vector<Complex> characteristic_polynomial(const Matrix4& m);

Complex determinant(const Matrix2& m);
// Cofactor expansion along the first row.
Complex determinant(const Matrix4& m);

Complex trace(const Matrix2& m);
Complex trace(const Matrix4& m);

// Principal square root, with the imaginary axis resolved towards +i so that
// sqrt(-r) = +i sqrt(r) regardless of the sign of a zero imaginary part.
Complex branch_sqrt(Complex z);

}  // namespace kerr_bic::poly
