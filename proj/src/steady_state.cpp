#include "kerr_bic/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kerr_bic/bistability.hpp"
#include "kerr_bic/polynomial.hpp"
#include "kerr_bic/stability.hpp"

namespace kerr_bic {

namespace {

constexpr double kResidualTolerance = 1e-12;

void require_drive(double i_drive) {
    require_finite(i_drive, "drive");
    if (i_drive < 0.0) throw DomainError("drive must be non-negative");
}

template <class F, class D>
std::vector<double> polished_positive_roots(std::vector<double> raw, double i_drive, F&& f, D&& df) {
    const double target = kResidualTolerance * std::max(1.0, i_drive);
    for (double& r : raw) {
        r = poly::polish_root(f, df, r, target);
        // Roots of the drive cubics are positive for I > 0; clamp rounding
        // below zero.
        if (r < 0.0) r = 0.0;
    }
    std::sort(raw.begin(), raw.end());
    return raw;
}

}  // namespace

double single_mode_intensity(double alpha, double delta_t) {
    require_finite(alpha, "alpha");
    require_finite(delta_t, "delta_t");
    if (alpha < 0.0) throw DomainError("single_mode_intensity: alpha must be non-negative");
    const double s = delta_t + 0.5 * alpha;
    return 0.5 * alpha * (1.0 + s * s);
}

double single_mode_intensity_slope(double alpha, double delta_t) {
    return 0.5 * (0.75 * alpha * alpha + 2.0 * delta_t * alpha + delta_t * delta_t + 1.0);
}

Complex single_mode_amplitude(double alpha, double delta_t, double u_over_gamma) {
    if (!(u_over_gamma > 0.0)) {
        throw DomainError("single_mode_amplitude: U/gamma must be positive");
    }
    const double s = delta_t + 0.5 * alpha;
    const double drive = std::sqrt(0.5 * alpha * (1.0 + s * s) / (2.0 * u_over_gamma));
    return drive / Complex(1.0, s);
}

std::vector<SteadyRoot> solve_single_mode(double i_drive, double delta_t, double u_over_gamma,
                                          double realness_tol) {
    require_drive(i_drive);
    require_finite(delta_t, "delta_t");
    if (!(u_over_gamma > 0.0)) throw DomainError("solve_single_mode: U/gamma must be positive");

    std::vector<double> alphas;
    if (i_drive == 0.0) {
        alphas = {0.0};
    } else {
        const double d = delta_t;
        auto raw = poly::real_cubic_roots(0.125, 0.5 * d, 0.5 * (1.0 + d * d), -i_drive, realness_tol);
        auto f = [&](double a) {
            const double s = d + 0.5 * a;
            return 0.5 * a * (1.0 + s * s) - i_drive;
        };
        auto df = [&](double a) { return single_mode_intensity_slope(a, d); };
        alphas = polished_positive_roots(std::move(raw), i_drive, f, df);
    }

    const double drive = std::sqrt(i_drive / (2.0 * u_over_gamma));
    std::vector<SteadyRoot> roots;
    roots.reserve(alphas.size());
    for (double a : alphas) {
        SteadyRoot r;
        r.response = a;
        r.amplitude_a = drive / Complex(1.0, delta_t + 0.5 * a);
        const auto verdict = classify_single_mode(a, delta_t);
        r.stability = verdict.stability;
        r.marginal = verdict.marginal;
        roots.push_back(r);
    }
    return roots;
}

EffectiveDetuning effective_detuning(const TwoModeParams& p) {
    p.validate();
    const Complex v = Complex(p.delta_b, -p.gamma_b) - p.g * p.g / Complex(p.delta_a, -p.gamma_a);
    return EffectiveDetuning(v);
}

double two_mode_intensity(double x, const EffectiveDetuning& dt) {
    require_finite(x, "x");
    if (x < 0.0) throw DomainError("two_mode_intensity: x must be non-negative");
    return 4.0 * x * x * x + 4.0 * dt.real_part * x * x + dt.abs2() * x;
}

double two_mode_intensity_slope(double x, const EffectiveDetuning& dt) {
    return 12.0 * x * x + 8.0 * dt.real_part * x + dt.abs2();
}

std::vector<SteadyRoot> solve_two_mode(double i_drive, const TwoModeParams& p, double realness_tol) {
    require_drive(i_drive);
    const EffectiveDetuning dt = effective_detuning(p);
    if (!(p.u > 0.0)) throw DomainError("solve_two_mode: Kerr coefficient U must be positive");

    std::vector<double> xs;
    if (i_drive == 0.0) {
        xs = {0.0};
    } else {
        auto raw = poly::real_cubic_roots(4.0, 4.0 * dt.real_part, dt.abs2(), -i_drive, realness_tol);
        auto f = [&](double x) { return x * std::norm(dt.value + 2.0 * x) - i_drive; };
        auto df = [&](double x) { return two_mode_intensity_slope(x, dt); };
        xs = polished_positive_roots(std::move(raw), i_drive, f, df);
    }

    const double omega = std::sqrt(i_drive / p.u);
    const Complex ia_g(p.gamma_a, p.delta_a);  // iδ_a + γ_a
    std::vector<SteadyRoot> roots;
    roots.reserve(xs.size());
    for (double x : xs) {
        SteadyRoot r;
        r.response = x;
        const Complex b0 = Complex(0.0, -omega) / (dt.value + 2.0 * x);
        r.amplitude_b = b0;
        r.amplitude_a = Complex(0.0, -p.g) * b0 / ia_g;
        const auto verdict = classify_two_mode(p, x);
        r.stability = verdict.stability;
        r.marginal = verdict.marginal;
        roots.push_back(r);
    }
    return roots;
}

std::vector<SteadyRoot> solve_two_mode_cavity_driven(double cavity_drive, const TwoModeParams& p) {
    p.validate();
    require_finite(cavity_drive, "cavity drive");
    if (p.u < 0.0) throw DomainError("solve_two_mode_cavity_driven: U must be non-negative");

    const Complex ia_g(p.gamma_a, p.delta_a);  // iδ_a + γ_a
    const Complex c1 = 2.0 * ia_g;
    const Complex c0 = ia_g * Complex(p.delta_b, -p.gamma_b) - Complex(0.0, p.g * p.g);
    const double source = p.u * p.g * p.g * cavity_drive * cavity_drive;

    std::vector<double> xs;
    if (source == 0.0) {
        xs = {0.0};
    } else {
        auto raw = poly::real_cubic_roots(std::norm(c1), 2.0 * (c0 * std::conj(c1)).real(),
                                          std::norm(c0), -source);
        auto f = [&](double x) { return x * std::norm(c0 + c1 * x) - source; };
        auto df = [&](double x) {
            return std::norm(c0) + 4.0 * (c0 * std::conj(c1)).real() * x + 3.0 * std::norm(c1) * x * x;
        };
        xs = polished_positive_roots(std::move(raw), source, f, df);
    }

    std::vector<SteadyRoot> roots;
    roots.reserve(xs.size());
    for (double x : xs) {
        const Complex w = Complex(p.delta_b + 2.0 * x, -p.gamma_b);
        const Complex d = ia_g * w - Complex(0.0, p.g * p.g);
        SteadyRoot r;
        r.response = x;
        r.amplitude_a = cavity_drive * w / d;
        r.amplitude_b = -p.g * cavity_drive / d;
        const auto verdict = classify_two_mode(p, x);
        r.stability = verdict.stability;
        r.marginal = verdict.marginal;
        roots.push_back(r);
    }
    return roots;
}

std::vector<SteadyRoot> solve_steady(const KerrSystem& system, double i_drive) {
    if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
        return solve_single_mode(i_drive, s->delta_t, s->u_over_gamma);
    }
    return solve_two_mode(i_drive, std::get<TwoModeSystem>(system).params);
}

namespace {

std::vector<BicLocusPoint> turning_loci(const KerrSystem& system) {
    std::optional<TurningPoints> tp;
    try {
        if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
            tp = turning_points_single(s->delta_t);
        } else {
            tp = turning_points_two(effective_detuning(std::get<TwoModeSystem>(system).params));
        }
    } catch (const NoBistability&) {
        return {};
    }
    return {{tp->lower, tp->i_lower}, {tp->upper, tp->i_upper}};
}

std::size_t nearest_index(const std::vector<double>& values, double target) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double d = std::abs(values[k] - target);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

void check_sweep_grid(std::span<const double> i_values, SweepDirection direction) {
    if (i_values.empty()) throw DomainError("hysteresis_sweep: empty drive grid");
    for (std::size_t k = 1; k < i_values.size(); ++k) {
        const bool ok = direction == SweepDirection::Up ? i_values[k] > i_values[k - 1]
                                                        : i_values[k] < i_values[k - 1];
        if (!ok) throw DomainError("hysteresis_sweep: drive grid not strictly monotone in the sweep direction");
    }
}

}  // namespace

SweepTrace hysteresis_sweep(const KerrSystem& system, std::span<const double> i_values,
                            SweepDirection direction) {
    check_sweep_grid(i_values, direction);
    std::vector<std::vector<SteadyRoot>> roots;
    roots.reserve(i_values.size());
    for (double i : i_values) roots.push_back(solve_steady(system, i));
    return follow_branches(system, i_values, roots, direction);
}

SweepTrace follow_branches(const KerrSystem& system, std::span<const double> i_values,
                           std::span<const std::vector<SteadyRoot>> roots_per_point, SweepDirection direction) {
    check_sweep_grid(i_values, direction);
    if (roots_per_point.size() != i_values.size()) {
        throw DomainError("follow_branches: one root set per drive value required");
    }
    SweepTrace trace;
    trace.direction = direction;
    trace.bic_loci = turning_loci(system);
    trace.points.reserve(i_values.size());

    std::vector<double> prev_stable;
    std::size_t followed = 0;
    for (std::size_t k = 0; k < i_values.size(); ++k) {
        const auto& roots = roots_per_point[k];
        std::vector<double> stable;
        for (const auto& r : roots) {
            if (r.stability == Stability::Stable) stable.push_back(r.response);
        }
        if (stable.empty()) {
            throw NumericError("hysteresis_sweep: no stable steady state at I = " +
                               std::to_string(i_values[k]));
        }

        SweepPoint pt;
        pt.drive = i_values[k];
        pt.root_count = roots.size();
        pt.stability = Stability::Stable;
        std::size_t chosen = 0;
        if (k == 0) {
            // Start on the branch the sweep enters from: lowest response when
            // driving up, highest when driving down.
            chosen = direction == SweepDirection::Up ? 0 : stable.size() - 1;
        } else {
            const double prev_value = prev_stable[followed];
            std::vector<std::size_t> continuing;
            for (std::size_t j = 0; j < stable.size(); ++j) {
                if (nearest_index(prev_stable, stable[j]) == followed) continuing.push_back(j);
            }
            if (!continuing.empty()) {
                chosen = continuing.front();
                for (std::size_t j : continuing) {
                    if (std::abs(stable[j] - prev_value) < std::abs(stable[chosen] - prev_value)) chosen = j;
                }
            } else {
                chosen = nearest_index(stable, prev_value);
                pt.jumped = true;
                trace.jumps.push_back({k, i_values[k - 1], i_values[k], prev_value, stable[chosen]});
            }
        }
        pt.response = stable[chosen];
        trace.points.push_back(pt);
        prev_stable = std::move(stable);
        followed = chosen;
    }
    return trace;
}

}  // namespace kerr_bic
