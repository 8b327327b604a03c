#pragma once

// Time-domain oracle: fixed-step RK4 integration of the nonlinear equations of
// motion and of the linearized perturbation dynamics, and ringdown-rate
// measurement around stable steady states.

#include <array>
#include <iosfwd>
#include <vector>

#include "kerr_bic/core.hpp"

namespace kerr_bic {

struct ModeState {
    Complex a{};
    Complex b{};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ModeState> states;
    std::vector<double> occupation;  // |a|² + |b|² per retained sample
    std::size_t components = 1;      // 1: (a), 2: (a, b)
    bool converged = false;
    bool diverged = false;

    const ModeState& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }

    // Columns t, re_a, im_a[, re_b, im_b]; 17 significant digits.
    void write_csv(std::ostream& out) const;
};

struct IntegrationOptions {
    double t_final = 100.0;
    double dt = 0.01;
    std::size_t record_stride = 1;
    bool stop_on_convergence = true;
    double convergence_rate = 1e-10;  // |Δstate|/dt below this => converged
    double divergence_norm = 1e8;
};

// ȧ = -i(Δ̃ - i)a - 2i(U/γ)|a|²a + ℰ/γ in units where γ = 1.
Trajectory integrate_single(double delta_t, double u_over_gamma, Complex drive, Complex a_init,
                            const IntegrationOptions& options);

enum class DrivePort { ModeB, Cavity };

// ȧ = -(iδ_a + γ_a)a - igb [+ ℰ]
// ḃ = -(iδ_b + γ_b)b - 2iU|b|²b - iga [+ Ω]
// With DrivePort::ModeB the drive is p.omega on b; with DrivePort::Cavity it
// is `cavity_drive` on a and b is undriven.
Trajectory integrate_two(const TwoModeParams& p, Complex a_init, Complex b_init,
                         const IntegrationOptions& options, DrivePort port = DrivePort::ModeB,
                         Complex cavity_drive = {});

// ψ̇ = -iHψ for a linearized Hamiltonian; returns the samples at every
// `record_stride` steps starting with ψ(0).
template <std::size_t N>
struct LinearTrajectory {
    std::vector<double> times;
    std::vector<std::array<Complex, N>> states;
};

LinearTrajectory<2> integrate_linearized(const Matrix2& h, const std::array<Complex, 2>& psi0,
                                         double t_final, double dt, std::size_t record_stride = 1);
LinearTrajectory<4> integrate_linearized(const Matrix4& h, const std::array<Complex, 4>& psi0,
                                         double t_final, double dt, std::size_t record_stride = 1);

// 0.01 / max(1, spectral radius estimate).
double default_time_step(double spectral_radius_estimate);
double spectral_radius_estimate(const KerrSystem& system, const SteadyRoot& root);

enum class RingdownMethod {
    Envelope,          // straight line through log of the running-max envelope
    BeatMaxima,        // line through the beat maxima of log‖dev‖
    LinearPrediction,  // damped-exponential model of the complex deviation
};

const char* to_string(RingdownMethod method);

struct RingdownResult {
    double rate = 0.0;            // fitted decay rate of ‖state - root‖
    double predicted_rate = 0.0;  // min(-Im λ) of the linearized spectrum
    double r_squared = 0.0;
    bool lower_bound = false;     // tail never reached the floor before t_final;
                                  // 1/rate is then only a lifetime lower bound
    std::size_t samples_used = 0;
    double t_end = 0.0;
    RingdownMethod method = RingdownMethod::Envelope;
};

inline constexpr double kRingdownTimeCap = 1e4;

// Perturbs a stable root by `perturbation` (relative to ‖root‖) along the
// least-damped linearized mode, integrates the full nonlinear equations and
// fits log‖state - root‖ against t over the later half of the samples with
// 1e-9 <= ‖dev‖ <= 0.1·‖initial dev‖. When the tail beats (the λ, -λ* pair
// share a decay rate but not a frequency) the line goes through the beat
// maxima, found by detrending with the current rate; a tail without beats
// uses its running-max envelope. If the band holds fewer than three beat
// maxima, or that fit has r² < 0.99, the rate comes from linear prediction
// on the complex deviation samples. t_final is capped at 1e4; dt <= 0
// selects the default step. Throws FitError when r² < 0.99 or too few
// samples remain.
RingdownResult ringdown_rate(const KerrSystem& system, const SteadyRoot& root, double perturbation,
                             double t_final, double dt = 0.0);

}  // namespace kerr_bic
