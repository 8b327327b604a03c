#include "kerr_bic/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "kerr_bic/bistability.hpp"

namespace kerr_bic {

const char* to_string(Branch b) {
    switch (b) {
        case Branch::Lower: return "lower";
        case Branch::Middle: return "middle";
        case Branch::Upper: return "upper";
    }
    return "lower";
}

namespace {

void check_pole(double value, const std::optional<TurningPoints>& tp) {
    if (!tp) return;
    if (std::abs(value - tp->lower) <= kPoleTolerance) {
        throw PoleError("derivative evaluated at the lower turning point", TurningPoint::Lower);
    }
    if (std::abs(value - tp->upper) <= kPoleTolerance) {
        throw PoleError("derivative evaluated at the upper turning point", TurningPoint::Upper);
    }
}

std::optional<TurningPoints> single_turning(double delta_t) {
    try {
        return turning_points_single(delta_t);
    } catch (const NoBistability&) {
        return std::nullopt;
    }
}

std::optional<TurningPoints> two_turning(const EffectiveDetuning& dt) {
    try {
        return turning_points_two(dt);
    } catch (const NoBistability&) {
        return std::nullopt;
    }
}

std::optional<TurningPoints> system_turning(const KerrSystem& system) {
    if (const auto* s = std::get_if<SingleModeSystem>(&system)) return single_turning(s->delta_t);
    return two_turning(effective_detuning(std::get<TwoModeSystem>(system).params));
}

}  // namespace

double dalpha_ddelta(double alpha, double delta_t) {
    require_finite(alpha, "alpha");
    require_finite(delta_t, "delta_t");
    check_pole(alpha, single_turning(delta_t));
    const double denom = 3.0 * alpha * alpha + 8.0 * delta_t * alpha + 4.0 * (delta_t * delta_t + 1.0);
    if (denom == 0.0) throw PoleError("derivative pole", TurningPoint::Lower);
    return -8.0 * alpha * (delta_t + 0.5 * alpha) / denom;
}

double dx_ddelta_b(double x, const EffectiveDetuning& dt) {
    require_finite(x, "x");
    check_pole(x, two_turning(dt));
    const double denom = 3.0 * x * x + 2.0 * dt.real_part * x + 0.25 * dt.abs2();
    if (denom == 0.0) throw PoleError("derivative pole", TurningPoint::Lower);
    return -x * (x + 0.5 * dt.real_part) / denom;
}

double response_derivative(const KerrSystem& system, double response) {
    if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
        return dalpha_ddelta(response, s->delta_t);
    }
    return dx_ddelta_b(response, effective_detuning(std::get<TwoModeSystem>(system).params));
}

std::optional<SteadyRoot> root_on_branch(const KerrSystem& system, double i_drive, Branch branch) {
    const auto roots = solve_steady(system, i_drive);
    if (roots.size() == 3) {
        return roots[branch == Branch::Lower ? 0 : branch == Branch::Middle ? 1 : 2];
    }
    if (branch == Branch::Middle) return std::nullopt;
    const SteadyRoot& only = roots.front();
    const auto tp = system_turning(system);
    if (!tp || tp->lower == tp->upper) return only;  // monostable or at the cusp
    // A lone root sits below the lower fold or above the upper one.
    const bool on_lower = only.response <= tp->lower;
    if ((branch == Branch::Lower) == on_lower) return only;
    return std::nullopt;
}

std::vector<ProfileRow> sensitivity_profile(const KerrSystem& system, std::span<const double> i_grid,
                                            Branch branch) {
    std::vector<ProfileRow> rows;
    rows.reserve(i_grid.size());
    for (double i : i_grid) {
        ProfileRow row;
        row.drive = i;
        if (auto r = root_on_branch(system, i, branch)) {
            try {
                row.derivative = response_derivative(system, r->response);
                row.response = r->response;
            } catch (const PoleError&) {
                // Grid landed on a fold: leave a gap.
            }
        }
        rows.push_back(row);
    }
    return rows;
}

double ScalingFit::prefactor() const { return std::exp(intercept); }

ScalingFit fit_scaling(std::span<const ProfileRow> profile, double i_ref, double rel_lo, double rel_hi) {
    if (!(rel_lo > 0.0) || !(rel_hi > rel_lo)) {
        throw DomainError("fit_scaling: window must satisfy 0 < lo < hi");
    }
    const double scale = std::abs(i_ref);
    std::vector<double> xs, ys;
    bool below = false, above = false;
    for (const auto& row : profile) {
        if (!row.derivative) continue;
        const double dist = std::abs(row.drive - i_ref);
        const double rel = dist / scale;
        if (rel < rel_lo || rel > rel_hi || dist < 1e-6 * scale) continue;
        if (*row.derivative == 0.0) continue;
        (row.drive < i_ref ? below : above) = true;
        xs.push_back(std::log(dist));
        ys.push_back(std::log(std::abs(*row.derivative)));
    }
    if (below && above) throw DomainError("fit_scaling: points on both sides of the reference drive");
    if (xs.size() < 20) {
        throw DomainError("fit_scaling: need at least 20 points in the window, got " + std::to_string(xs.size()));
    }

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (sxx == 0.0) throw DomainError("fit_scaling: degenerate window");

    ScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (fit.intercept + fit.exponent * xs[k]);
        sse += e * e;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.exponent_stderr = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    fit.window_min = std::exp(*std::min_element(xs.begin(), xs.end()));
    fit.window_max = std::exp(*std::max_element(xs.begin(), xs.end()));
    fit.points = xs.size();
    return fit;
}

std::vector<double> approach_grid(double i_ref, double rel_lo, double rel_hi, std::size_t count, bool below) {
    if (count < 2) throw DomainError("approach_grid: need at least two points");
    if (!(rel_lo > 0.0) || !(rel_hi > rel_lo)) throw DomainError("approach_grid: need 0 < lo < hi");
    std::vector<double> grid(count);
    const double l0 = std::log(rel_lo), l1 = std::log(rel_hi);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        const double d = std::exp(l0 + t * (l1 - l0)) * std::abs(i_ref);
        grid[k] = below ? i_ref - d : i_ref + d;
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

}  // namespace kerr_bic
