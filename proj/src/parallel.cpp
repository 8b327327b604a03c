#include "kerr_bic/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "kerr_bic/bistability.hpp"

namespace kerr_bic::parallel {

int default_jobs() {
    if (const char* env = std::getenv("KERR_BIC_JOBS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

std::vector<std::vector<SteadyRoot>> steady_grid(const KerrSystem& system, std::span<const double> i_grid,
                                                 int jobs) {
    return unwrap(map_indexed(i_grid.size(), [&](std::size_t k) { return solve_steady(system, i_grid[k]); }, jobs));
}

std::vector<std::vector<SteadyRoot>> steady_grid_serial(const KerrSystem& system, std::span<const double> i_grid) {
    return unwrap(map_indexed_serial(i_grid.size(), [&](std::size_t k) { return solve_steady(system, i_grid[k]); }));
}

SweepTrace hysteresis_sweep(const KerrSystem& system, std::span<const double> i_values, SweepDirection direction,
                            int jobs) {
    // Validate the grid before spending time on it.
    if (i_values.empty()) return kerr_bic::hysteresis_sweep(system, i_values, direction);
    const auto roots = steady_grid(system, i_values, jobs);
    return follow_branches(system, i_values, roots, direction);
}

std::vector<ProfileRow> sensitivity_profile(const KerrSystem& system, std::span<const double> i_grid,
                                            Branch branch, int jobs) {
    return unwrap(map_indexed(
        i_grid.size(),
        [&](std::size_t k) { return kerr_bic::sensitivity_profile(system, i_grid.subspan(k, 1), branch).front(); },
        jobs));
}

BicLocus bic_locus(const TwoModeParams& p, std::span<const double> delta_b_grid, int jobs) {
    if (delta_b_grid.empty()) throw DomainError("bic_locus: empty delta_b grid");
    // Each point is cheap: hand out contiguous blocks, a few per thread.
    const std::size_t n = delta_b_grid.size();
    const std::size_t blocks = std::min<std::size_t>(n, 4 * static_cast<std::size_t>(jobs > 0 ? jobs : default_jobs()));
    auto parts = unwrap(map_indexed(
        blocks,
        [&](std::size_t b) {
            const std::size_t first = b * n / blocks, last = (b + 1) * n / blocks;
            return kerr_bic::bic_locus(p, delta_b_grid.subspan(first, last - first));
        },
        jobs));
    BicLocus locus;
    for (auto& part : parts) {
        locus.points.insert(locus.points.end(), part.points.begin(), part.points.end());
        locus.gaps.insert(locus.gaps.end(), part.gaps.begin(), part.gaps.end());
    }
    return locus;
}

}  // namespace kerr_bic::parallel
