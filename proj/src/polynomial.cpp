#include "kerr_bic/polynomial.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

namespace kerr_bic::poly {

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0,
                                     double realness_tol) {
    if (c3 == 0.0 || !std::isfinite(c3)) {
        throw DomainError("real_cubic_roots: leading coefficient must be non-zero");
    }
    const double a = c2 / c3;
    const double b = c1 / c3;
    const double c = c0 / c3;

    // x = t - a/3  ->  t³ + p t + q = 0
    const double shift = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::vector<double> roots;
    roots.reserve(3);
    if (disc < 0.0) {
        // Three distinct real roots (casus irreducibilis).
        const double r = std::sqrt(-p / 3.0);
        const double arg = std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            roots.push_back(2.0 * r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
        }
    } else {
        // One real root plus a conjugate pair; u chosen to avoid cancellation.
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 - std::copysign(sq, q));
        const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        const double t = u + v;
        roots.push_back(t - shift);
        const double re = -t / 2.0 - shift;
        const double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
        if (im <= realness_tol * (1.0 + std::abs(re))) {
            roots.push_back(re);
            roots.push_back(re);
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Complex evaluate_monic(std::span<const Complex> c, Complex z) {
    Complex acc{1.0, 0.0};
    for (const Complex& ck : c) acc = acc * z + ck;
    return acc;
}

namespace {

// Rounding-error bound of Horner evaluation at z.
double evaluation_floor(std::span<const Complex> c, Complex z) {
    const double az = std::abs(z);
    double acc = 1.0;
    for (const Complex& ck : c) acc = acc * az + std::abs(ck);
    return 8.0 * static_cast<double>(c.size() + 1) * std::numeric_limits<double>::epsilon() * acc;
}

Complex evaluate_monic_derivative(std::span<const Complex> c, Complex z) {
    const std::size_t n = c.size();
    Complex acc{static_cast<double>(n), 0.0};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        acc = acc * z + static_cast<double>(n - 1 - k) * c[k];
    }
    return acc;
}

}  // namespace

std::vector<Complex> durand_kerner(std::span<const Complex> c, const DurandKernerOptions& opt) {
    const std::size_t n = c.size();
    if (n == 0) return {};
    for (const Complex& ck : c) require_finite(ck, "polynomial coefficient");
    if (n == 1) return {-c[0]};

    // Fujiwara-style radius keeps the start circle on the scale of the roots.
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / static_cast<double>(k + 1)));
    }
    radius = std::max(radius, 1e-3);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const Complex centre = -c[0] / static_cast<double>(n);
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25 + jitter(rng)) /
                             static_cast<double>(n) + 0.4;
        z[k] = centre + radius * (1.0 + jitter(rng)) * Complex(std::cos(angle), std::sin(angle));
    }

    bool converged = false;
    for (int it = 0; it < opt.max_iterations && !converged; ++it) {
        bool small_updates = true;
        bool at_floor = true;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex pz = evaluate_monic(c, z[i]);
            if (std::abs(pz) > evaluation_floor(c, z[i])) at_floor = false;
            Complex denom{1.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) denom *= (z[i] - z[j]);
            }
            if (denom == Complex{}) {
                denom = Complex(std::numeric_limits<double>::epsilon(), 0.0);
            }
            const Complex step = pz / denom;
            z[i] -= step;
            if (std::abs(step) >= opt.relative_tolerance * (1.0 + std::abs(z[i]))) {
                small_updates = false;
            }
        }
        converged = small_updates || at_floor;
    }
    for (const Complex& zi : z) require_finite(zi, "durand_kerner root");
    if (!converged) {
        throw NumericError("durand_kerner: no convergence after " +
                           std::to_string(opt.max_iterations) + " iterations");
    }

    for (Complex& zi : z) {
        const Complex pz = evaluate_monic(c, zi);
        const Complex dz = evaluate_monic_derivative(c, zi);
        if (dz == Complex{}) continue;
        const Complex candidate = zi - pz / dz;
        if (std::isfinite(candidate.real()) && std::isfinite(candidate.imag()) &&
            std::abs(evaluate_monic(c, candidate)) < std::abs(pz)) {
            zi = candidate;
        }
    }
    return z;
}

namespace {

template <std::size_t N>
std::vector<Complex> faddeev_leverrier(const ComplexMatrix<N>& a) {
    // M_0 = 0, c_0 = 1; M_k = A M_{k-1} + c_{k-1} I; c_k = -tr(A M_k)/k
    ComplexMatrix<N> m{};
    std::vector<Complex> coeffs;
    coeffs.reserve(N);
    Complex c_prev{1.0, 0.0};
    for (std::size_t k = 1; k <= N; ++k) {
        ComplexMatrix<N> next{};
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                Complex s{};
                for (std::size_t l = 0; l < N; ++l) s += a[i][l] * m[l][j];
                next[i][j] = s;
            }
            next[i][i] += c_prev;
        }
        m = next;
        Complex tr{};
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t l = 0; l < N; ++l) tr += a[i][l] * m[l][i];
        }
        c_prev = -tr / static_cast<double>(k);
        coeffs.push_back(c_prev);
    }
    return coeffs;
}

}  // namespace

std::vector<Complex> characteristic_polynomial(const Matrix2& m) { return faddeev_leverrier(m); }
std::vector<Complex> characteristic_polynomial(const Matrix4& m) { return faddeev_leverrier(m); }

Complex determinant(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

Complex determinant(const Matrix4& m) {
    auto minor3 = [&m](std::size_t skip_col) {
        std::array<std::array<Complex, 3>, 3> s{};
        for (std::size_t r = 1; r < 4; ++r) {
            std::size_t cc = 0;
            for (std::size_t col = 0; col < 4; ++col) {
                if (col == skip_col) continue;
                s[r - 1][cc++] = m[r][col];
            }
        }
        return s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) -
               s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0]) +
               s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    };
    Complex det{};
    for (std::size_t col = 0; col < 4; ++col) {
        const double sign = (col % 2 == 0) ? 1.0 : -1.0;
        det += sign * m[0][col] * minor3(col);
    }
    return det;
}

Complex trace(const Matrix2& m) { return m[0][0] + m[1][1]; }
Complex trace(const Matrix4& m) { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }

Complex branch_sqrt(Complex z) {
    Complex s = std::sqrt(z);
    if (s.real() == 0.0 && s.imag() < 0.0) s = -s;
    return s;
}

}  // namespace kerr_bic::poly
