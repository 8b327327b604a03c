#pragma once

// Grid kernels in two flavours: an OpenMP version and the serial reference it
// must match bit for bit. Results always come back in input order; a failure
// at one index is captured and does not stop the others.

#include <exception>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <omp.h>

#include "kerr_bic/sensitivity.hpp"
#include "kerr_bic/spectra.hpp"
#include "kerr_bic/steady_state.hpp"

namespace kerr_bic::parallel {

// KERR_BIC_JOBS if set to a positive integer, otherwise the OpenMP default.
int default_jobs();

template <class T>
struct Outcome {
    std::optional<T> value;
    std::exception_ptr error;

    bool ok() const { return value.has_value(); }
    // Returns the value or rethrows the captured exception.
    const T& get() const {
        if (error) std::rethrow_exception(error);
        return *value;
    }
};

template <class F>
using result_of_index = std::invoke_result_t<F&, std::size_t>;

template <class F>
std::vector<Outcome<result_of_index<F>>> map_indexed_serial(std::size_t n, F&& f) {
    std::vector<Outcome<result_of_index<F>>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            out[i].value = f(i);
        } catch (...) {
            out[i].error = std::current_exception();
        }
    }
    return out;
}

template <class F>
std::vector<Outcome<result_of_index<F>>> map_indexed(std::size_t n, F&& f, int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    std::vector<Outcome<result_of_index<F>>> out(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
    for (long long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k].value = f(k);
        } catch (...) {
            out[k].error = std::current_exception();
        }
    }
    return out;
}

// Rethrows the first captured error in index order, otherwise unwraps.
template <class T>
std::vector<T> unwrap(std::vector<Outcome<T>>&& outcomes) {
    std::vector<T> values;
    values.reserve(outcomes.size());
    for (auto& o : outcomes) {
        if (o.error) std::rethrow_exception(o.error);
        values.push_back(std::move(*o.value));
    }
    return values;
}

// Steady states at every drive of the grid.
std::vector<std::vector<SteadyRoot>> steady_grid(const KerrSystem& system, std::span<const double> i_grid,
                                                 int jobs = 0);
std::vector<std::vector<SteadyRoot>> steady_grid_serial(const KerrSystem& system, std::span<const double> i_grid);

SweepTrace hysteresis_sweep(const KerrSystem& system, std::span<const double> i_values, SweepDirection direction,
                            int jobs = 0);

std::vector<ProfileRow> sensitivity_profile(const KerrSystem& system, std::span<const double> i_grid,
                                            Branch branch, int jobs = 0);

BicLocus bic_locus(const TwoModeParams& p, std::span<const double> delta_b_grid, int jobs = 0);

}  // namespace kerr_bic::parallel
