#include "kerr_bic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <optional>
#include <span>

#include "kerr_bic/polynomial.hpp"
#include "kerr_bic/spectra.hpp"

namespace kerr_bic {

namespace {

using State2 = std::array<Complex, 2>;

template <std::size_t N>
std::array<Complex, N> axpy(const std::array<Complex, N>& x, double h, const std::array<Complex, N>& k) {
    std::array<Complex, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + h * k[i];
    return out;
}

template <std::size_t N, class Rhs>
std::array<Complex, N> rk4_step(const Rhs& f, const std::array<Complex, N>& y, double h) {
    const auto k1 = f(y);
    const auto k2 = f(axpy(y, 0.5 * h, k1));
    const auto k3 = f(axpy(y, 0.5 * h, k2));
    const auto k4 = f(axpy(y, h, k3));
    std::array<Complex, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

template <std::size_t N>
double norm(const std::array<Complex, N>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

template <std::size_t N>
double distance(const std::array<Complex, N>& u, const std::array<Complex, N>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::norm(u[i] - v[i]);
    return std::sqrt(s);
}

void check_options(const IntegrationOptions& o) {
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw DomainError("integrate: dt must be positive");
    if (!(o.t_final > 0.0) || !std::isfinite(o.t_final)) throw DomainError("integrate: t_final must be positive");
    if (o.record_stride == 0) throw DomainError("integrate: record_stride must be at least 1");
}

std::size_t step_count(double t_final, double dt) {
    return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

// Eigenvector of h for the least-damped eigenvalue in spec, by inverse
// iteration with a slightly offset shift.
template <std::size_t N>
std::array<Complex, N> slowest_eigenvector(const ComplexMatrix<N>& h, const Spectrum& spec) {
    Complex lambda = spec.eigenvalues.front();
    for (const auto& l : spec.eigenvalues) {
        if (l.imag() > lambda.imag()) lambda = l;
    }
    const Complex shift = lambda + Complex(1e-9, 1e-9) * (1.0 + std::abs(lambda));
    std::array<Complex, N> v{};
    for (std::size_t i = 0; i < N; ++i) v[i] = Complex(1.0, 0.1 * static_cast<double>(i + 1));
    for (int iter = 0; iter < 4; ++iter) {
        auto m = h;
        for (std::size_t i = 0; i < N; ++i) m[i][i] -= shift;
        auto w = v;
        // Gaussian elimination with partial pivoting.
        for (std::size_t c = 0; c < N; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < N; ++r) {
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
            }
            std::swap(m[c], m[piv]);
            std::swap(w[c], w[piv]);
            if (m[c][c] == Complex{}) m[c][c] = 1e-300;
            for (std::size_t r = c + 1; r < N; ++r) {
                const Complex k = m[r][c] / m[c][c];
                for (std::size_t j = c; j < N; ++j) m[r][j] -= k * m[c][j];
                w[r] -= k * w[c];
            }
        }
        for (std::size_t c = N; c-- > 0;) {
            for (std::size_t j = c + 1; j < N; ++j) w[c] -= m[c][j] * w[j];
            w[c] /= m[c][c];
        }
        const double n = norm(w);
        if (!(n > 0.0) || !std::isfinite(n)) break;
        for (auto& c : w) c /= n;
        v = w;
    }
    return v;
}

// Mode amplitudes of a real perturbation built from an eigenvector of the
// [modes, conjugates] Hamiltonian: v and its conjugate partner (eigenvalue
// -λ*, same decay rate) combined. Returns the first half, zero-padded to two.
template <std::size_t N>
State2 physical_mode(const std::array<Complex, N>& v) {
    constexpr std::size_t half = N / 2;
    State2 re{}, im{};
    for (std::size_t k = 0; k < half; ++k) {
        re[k] = v[k] + std::conj(v[k + half]);
        im[k] = Complex(0.0, 1.0) * (v[k] - std::conj(v[k + half]));
    }
    const State2& out = norm(re) >= norm(im) ? re : im;
    if (!(norm(out) > 0.0)) throw NumericError("ringdown_rate: degenerate perturbation direction");
    return out;
}

template <class Rhs>
Trajectory run(const Rhs& f, State2 y, std::size_t components, const IntegrationOptions& o) {
    check_options(o);
    require_finite(y[0], "a_init");
    require_finite(y[1], "b_init");

    Trajectory tr;
    tr.components = components;
    auto record = [&](double t, const State2& s) {
        tr.times.push_back(t);
        tr.states.push_back({s[0], s[1]});
        tr.occupation.push_back(std::norm(s[0]) + std::norm(s[1]));
    };
    record(0.0, y);

    const std::size_t steps = step_count(o.t_final, o.dt);
    for (std::size_t n = 1; n <= steps; ++n) {
        const State2 next = rk4_step<2>(f, y, o.dt);
        const double nrm = norm(next);
        if (!std::isfinite(nrm) || nrm > o.divergence_norm) {
            tr.diverged = true;
            if (tr.times.back() != static_cast<double>(n - 1) * o.dt) record(static_cast<double>(n - 1) * o.dt, y);
            return tr;
        }
        const double rate = distance(next, y) / o.dt;
        y = next;
        const double t = static_cast<double>(n) * o.dt;
        const bool done = rate < o.convergence_rate;
        if (done) tr.converged = true;
        if (n % o.record_stride == 0 || n == steps || (done && o.stop_on_convergence)) record(t, y);
        if (done && o.stop_on_convergence) break;
    }
    return tr;
}

template <std::size_t N>
LinearTrajectory<N> run_linear(const ComplexMatrix<N>& h, const std::array<Complex, N>& psi0, double t_final,
                               double dt, std::size_t stride) {
    if (!(dt > 0.0) || !(t_final > 0.0)) throw DomainError("integrate_linearized: dt and t_final must be positive");
    if (stride == 0) throw DomainError("integrate_linearized: record_stride must be at least 1");
    const auto f = [&h](const std::array<Complex, N>& psi) {
        std::array<Complex, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            Complex s{};
            for (std::size_t j = 0; j < N; ++j) s += h[i][j] * psi[j];
            out[i] = Complex(0.0, -1.0) * s;
        }
        return out;
    };
    LinearTrajectory<N> tr;
    tr.times.push_back(0.0);
    tr.states.push_back(psi0);
    auto psi = psi0;
    const std::size_t steps = step_count(t_final, dt);
    for (std::size_t n = 1; n <= steps; ++n) {
        psi = rk4_step<N>(f, psi, dt);
        if (n % stride == 0 || n == steps) {
            tr.times.push_back(static_cast<double>(n) * dt);
            tr.states.push_back(psi);
        }
    }
    return tr;
}

constexpr std::size_t kMinBeatPeaks = 3;
constexpr double kCleanFit = 0.999;
constexpr double kMinRSquared = 0.99;

struct LeastSquares {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LeastSquares fit_line(std::span<const double> xs, std::span<const double> ys) {
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
    LeastSquares out;
    if (sxx == 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r_squared = syy > 0.0 ? 1.0 - (syy - out.slope * sxy) / syy : 1.0;
    return out;
}

double vnorm(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return std::sqrt(s);
}

Complex vdot(const std::vector<Complex>& u, const std::vector<Complex>& v) {
    Complex s{};
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

// Complex least squares by modified Gram-Schmidt. nullopt when the columns
// are numerically dependent.
std::optional<std::vector<Complex>> least_squares(std::vector<std::vector<Complex>> cols, std::vector<Complex> rhs) {
    const std::size_t m = cols.size();
    std::vector<std::vector<Complex>> r(m, std::vector<Complex>(m));
    for (std::size_t j = 0; j < m; ++j) {
        const double n0 = vnorm(cols[j]);
        for (std::size_t i = 0; i < j; ++i) {
            const Complex d = vdot(cols[i], cols[j]);
            r[i][j] = d;
            for (std::size_t k = 0; k < rhs.size(); ++k) cols[j][k] -= d * cols[i][k];
        }
        const double nj = vnorm(cols[j]);
        if (!(nj > 1e-10 * n0) || !std::isfinite(nj)) return std::nullopt;
        r[j][j] = nj;
        for (auto& c : cols[j]) c /= nj;
    }
    std::vector<Complex> qb(m);
    for (std::size_t j = 0; j < m; ++j) {
        qb[j] = vdot(cols[j], rhs);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= qb[j] * cols[j][k];
    }
    std::vector<Complex> x(m);
    for (std::size_t j = m; j-- > 0;) {
        Complex acc = qb[j];
        for (std::size_t i = j + 1; i < m; ++i) acc -= r[j][i] * x[i];
        x[j] = acc / r[j][j];
    }
    return x;
}

struct PronyFit {
    double rate = 0.0;
    double r_squared = 0.0;
};

// Linear prediction: samples z_n (step h) of a sum of `order` damped
// exponentials obey z_{n+M} + c_{M-1} z_{n+M-1} + ... + c_0 z_n = 0. The
// recurrence roots μ give rates -ln|μ|/h; the result is the mode carrying
// the most amplitude at the last sample. Equations are weighted by 1/‖z_n‖
// so the late samples count as much as the early ones.
std::optional<PronyFit> prony_fit(std::span<const State2> z, double h, std::size_t order) {
    const std::size_t n = z.size();
    if (n < 3 * order + 3) return std::nullopt;
    const std::size_t comps = std::any_of(z.begin(), z.end(), [](const State2& s) { return s[1] != Complex{}; }) ? 2 : 1;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double nk = norm(z[k]);
        if (!(nk > 0.0)) return std::nullopt;
        w[k] = 1.0 / nk;
    }

    std::vector<std::vector<Complex>> cols(order);
    std::vector<Complex> rhs;
    for (std::size_t c = 0; c < comps; ++c) {
        for (std::size_t k = 0; k + order < n; ++k) {
            for (std::size_t j = 0; j < order; ++j) cols[j].push_back(w[k] * z[k + j][c]);
            rhs.push_back(-w[k] * z[k + order][c]);
        }
    }
    const auto coef = least_squares(std::move(cols), std::move(rhs));
    if (!coef) return std::nullopt;
    std::vector<Complex> monic(order);
    for (std::size_t j = 0; j < order; ++j) monic[j] = (*coef)[order - 1 - j];
    std::vector<Complex> mu;
    try {
        mu = order == 1 ? std::vector<Complex>{-monic[0]} : poly::durand_kerner(monic);
    } catch (const NumericError&) {
        return std::nullopt;
    }
    for (const auto& m : mu) {
        if (!(std::abs(m) > 0.0) || !std::isfinite(std::abs(m))) return std::nullopt;
    }

    // Amplitudes per component, then the relative reconstruction error.
    std::vector<std::vector<Complex>> amp(comps);
    for (std::size_t c = 0; c < comps; ++c) {
        std::vector<std::vector<Complex>> vc(order, std::vector<Complex>(n));
        std::vector<Complex> b(n);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < order; ++j) vc[j][k] = w[k] * std::pow(mu[j], static_cast<double>(k));
            b[k] = w[k] * z[k][c];
        }
        auto a = least_squares(std::move(vc), std::move(b));
        if (!a) return std::nullopt;
        amp[c] = std::move(*a);
    }
    double resid = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = 0.0;
        for (std::size_t c = 0; c < comps; ++c) {
            Complex fit{};
            for (std::size_t j = 0; j < order; ++j) fit += amp[c][j] * std::pow(mu[j], static_cast<double>(k));
            e += std::norm(z[k][c] - fit);
        }
        resid += e * w[k] * w[k];
    }
    PronyFit out;
    out.r_squared = 1.0 - resid / static_cast<double>(n);

    std::size_t best = 0;
    double best_weight = -1.0;
    for (std::size_t j = 0; j < order; ++j) {
        double a2 = 0.0;
        for (std::size_t c = 0; c < comps; ++c) a2 += std::norm(amp[c][j]);
        const double weight = std::sqrt(a2) * std::pow(std::abs(mu[j]), static_cast<double>(n - 1));
        if (weight > best_weight) {
            best_weight = weight;
            best = j;
        }
    }
    out.rate = -std::log(std::abs(mu[best])) / h;
    return out;
}

}  // namespace

void Trajectory::write_csv(std::ostream& out) const {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << (components == 2 ? "t,re_a,im_a,re_b,im_b\n" : "t,re_a,im_a\n");
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << times[k] << ',' << states[k].a.real() << ',' << states[k].a.imag();
        if (components == 2) out << ',' << states[k].b.real() << ',' << states[k].b.imag();
        out << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

Trajectory integrate_single(double delta_t, double u_over_gamma, Complex drive, Complex a_init,
                            const IntegrationOptions& options) {
    require_finite(delta_t, "delta_t");
    require_finite(u_over_gamma, "u_over_gamma");
    require_finite(drive, "drive");
    const Complex lin = Complex(0.0, -1.0) * Complex(delta_t, -1.0);
    const auto f = [=](const State2& y) {
        const Complex a = y[0];
        return State2{lin * a - Complex(0.0, 2.0 * u_over_gamma * std::norm(a)) * a + drive, Complex{}};
    };
    return run(f, State2{a_init, Complex{}}, 1, options);
}

Trajectory integrate_two(const TwoModeParams& p, Complex a_init, Complex b_init, const IntegrationOptions& options,
                         DrivePort port, Complex cavity_drive) {
    p.validate();
    require_finite(cavity_drive, "cavity_drive");
    const Complex la(p.gamma_a, p.delta_a);  // iδ_a + γ_a
    const Complex lb(p.gamma_b, p.delta_b);
    const Complex ig(0.0, p.g);
    const Complex drive_a = port == DrivePort::Cavity ? cavity_drive : Complex{};
    const Complex drive_b = port == DrivePort::ModeB ? Complex(p.omega, 0.0) : Complex{};
    const double u = p.u;
    const auto f = [=](const State2& y) {
        const Complex a = y[0], b = y[1];
        return State2{-la * a - ig * b + drive_a,
                      -lb * b - Complex(0.0, 2.0 * u * std::norm(b)) * b - ig * a + drive_b};
    };
    return run(f, State2{a_init, b_init}, 2, options);
}

LinearTrajectory<2> integrate_linearized(const Matrix2& h, const std::array<Complex, 2>& psi0, double t_final,
                                         double dt, std::size_t record_stride) {
    return run_linear<2>(h, psi0, t_final, dt, record_stride);
}

LinearTrajectory<4> integrate_linearized(const Matrix4& h, const std::array<Complex, 4>& psi0, double t_final,
                                         double dt, std::size_t record_stride) {
    return run_linear<4>(h, psi0, t_final, dt, record_stride);
}

const char* to_string(RingdownMethod method) {
    switch (method) {
        case RingdownMethod::Envelope: return "envelope";
        case RingdownMethod::BeatMaxima: return "beat_maxima";
        case RingdownMethod::LinearPrediction: return "linear_prediction";
    }
    return "unknown";
}

double default_time_step(double spectral_radius_estimate) {
    return 0.01 / std::max(1.0, spectral_radius_estimate);
}

double spectral_radius_estimate(const KerrSystem& system, const SteadyRoot& root) {
    if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
        return std::abs(s->delta_t) + 1.0 + 1.5 * std::abs(root.response);
    }
    const auto& p = std::get<TwoModeSystem>(system).params;
    const double x = std::abs(root.response);
    return std::max(std::abs(p.delta_a) + p.gamma_a, std::abs(p.delta_b) + p.gamma_b + 4.0 * x) + std::abs(p.g) +
           2.0 * x;
}

RingdownResult ringdown_rate(const KerrSystem& system, const SteadyRoot& root, double perturbation, double t_final,
                             double dt) {
    if (root.stability != Stability::Stable) throw DomainError("ringdown_rate: root must be stable");
    if (!(perturbation > 0.0) || perturbation > 1e-3) {
        throw DomainError("ringdown_rate: perturbation must lie in (0, 1e-3]");
    }
    if (!(t_final > 0.0)) throw DomainError("ringdown_rate: t_final must be positive");
    t_final = std::min(t_final, kRingdownTimeCap);
    if (!(dt > 0.0)) dt = default_time_step(spectral_radius_estimate(system, root));

    RingdownResult result;
    State2 y0{root.amplitude_a, root.amplitude_b.value_or(Complex{})};
    std::function<State2(const State2&)> f;
    State2 dir{};  // kick along the slowest linearized mode

    if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
        const double u = s->u_over_gamma;
        const Complex a0 = root.amplitude_a;
        // Drive that makes a0 an exact fixed point of the integrated equation.
        const Complex drive = Complex(1.0, s->delta_t + 2.0 * u * std::norm(a0)) * a0;
        const Complex lin = Complex(0.0, -1.0) * Complex(s->delta_t, -1.0);
        f = [=](const State2& y) {
            return State2{lin * y[0] - Complex(0.0, 2.0 * u * std::norm(y[0])) * y[0] + drive, Complex{}};
        };
        const Spectrum spec = eigenvalues_single(root.response, s->delta_t);
        result.predicted_rate = spec.min_decay_rate();
        const auto v = physical_mode(
            slowest_eigenvector(linearized_single_hamiltonian(root.response, s->delta_t, std::arg(a0)), spec));
        dir = {v[0], Complex{}};
    } else {
        const auto& p = std::get<TwoModeSystem>(system).params;
        p.validate();
        if (!root.amplitude_b) throw DomainError("ringdown_rate: two-mode root without b amplitude");
        const Complex la(p.gamma_a, p.delta_a), lb(p.gamma_b, p.delta_b), ig(0.0, p.g);
        const Complex a0 = root.amplitude_a, b0 = *root.amplitude_b;
        const double u = p.u;
        // The a-equation holds at the root by construction; Ω absorbs rounding
        // in the b-equation.
        const Complex omega = lb * b0 + Complex(0.0, 2.0 * u * std::norm(b0)) * b0 + ig * a0;
        const Complex drive_a = la * a0 + ig * b0;
        f = [=](const State2& y) {
            return State2{-la * y[0] - ig * y[1] + drive_a,
                          -lb * y[1] - Complex(0.0, 2.0 * u * std::norm(y[1])) * y[1] - ig * y[0] + omega};
        };
        const Spectrum spec = eigenvalues_two(p, root);
        result.predicted_rate = spec.min_decay_rate();
        const auto v = physical_mode(slowest_eigenvector(linearized_two_hamiltonian(p, root), spec));
        dir = {v[0], v[1]};
    }

    const double dn = norm(dir);
    const double scale = norm(y0) > 0.0 ? norm(y0) : 1.0;
    const double delta0 = perturbation * scale;
    State2 y = y0;
    for (std::size_t i = 0; i < 2; ++i) y[i] += dir[i] * (delta0 / dn);

    constexpr double floor = 1e-9;
    constexpr double stop = 1e-11;
    std::vector<double> ts{0.0}, devs{delta0};
    // Complex deviations for linear prediction, every `rec` steps (about half
    // a radian of the fastest rotation).
    const std::size_t rec = std::max<std::size_t>(
        1, static_cast<std::size_t>(0.5 / (std::max(1.0, spectral_radius_estimate(system, root)) * dt)));
    std::vector<State2> rec_dev{State2{y[0] - y0[0], y[1] - y0[1]}};
    const std::size_t steps = step_count(t_final, dt);
    bool reached_floor = false;
    for (std::size_t n = 1; n <= steps; ++n) {
        y = rk4_step<2>(f, y, dt);
        const double d = distance(y, y0);
        if (!std::isfinite(d)) throw NumericError("ringdown_rate: integration produced non-finite state");
        ts.push_back(static_cast<double>(n) * dt);
        devs.push_back(d);
        if (n % rec == 0) rec_dev.push_back(State2{y[0] - y0[0], y[1] - y0[1]});
        if (d < stop) {
            reached_floor = true;
            break;
        }
    }
    result.t_end = ts.back();
    result.lower_bound = !reached_floor;

    // Upper envelope: running maximum taken from the right.
    std::vector<double> env(devs.size());
    double m = 0.0;
    for (std::size_t k = devs.size(); k-- > 0;) {
        m = std::max(m, devs[k]);
        env[k] = m;
    }
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < env.size(); ++k) {
        if (env[k] >= floor && env[k] <= 0.1 * delta0) idx.push_back(k);
    }
    const std::size_t half = idx.size() / 2;
    std::vector<std::size_t> tail(idx.begin() + static_cast<std::ptrdiff_t>(half), idx.end());

    std::vector<double> xs, ys;
    for (std::size_t k : tail) {
        xs.push_back(ts[k]);
        ys.push_back(std::log(env[k]));
    }
    LeastSquares ls = xs.size() >= 2 ? fit_line(xs, ys) : LeastSquares{};

    // In the tail the deviation is e^{-rt}·P(t) with P periodic (the beat
    // between λ and -λ*). The maxima of log‖dev‖ + rt are the maxima of P and
    // lie exactly on the decay line; the staircase envelope does not. Locate
    // them with the current rate estimate and refit until they settle.
    auto detrended_maxima = [&](std::span<const std::size_t> range, double rate) {
        std::vector<std::size_t> out;
        auto g = [&](std::size_t k) { return std::log(devs[k]) + rate * ts[k]; };
        for (std::size_t k : range) {
            if (k > 0 && k + 1 < devs.size() && g(k) >= g(k - 1) && g(k) > g(k + 1)) out.push_back(k);
        }
        return out;
    };
    // Line through the beat maxima of `range`. Several beat frequencies give
    // maxima of unequal height; the ones on or above the line (the upper
    // envelope) are kept until the fit is clean.
    struct BeatFit {
        LeastSquares line;
        std::size_t points = 0;
    };
    auto beat_fit = [&](std::span<const std::size_t> range, double rate) -> std::optional<BeatFit> {
        auto peaks = detrended_maxima(range, rate);
        if (peaks.size() < kMinBeatPeaks) return std::nullopt;
        std::vector<double> px, py;
        for (std::size_t k : peaks) {
            px.push_back(ts[k]);
            py.push_back(std::log(devs[k]));
        }
        LeastSquares line = fit_line(px, py);
        while (line.r_squared < kCleanFit) {
            std::vector<double> ux, uy;
            for (std::size_t j = 0; j < px.size(); ++j) {
                if (py[j] >= line.intercept + line.slope * px[j]) {
                    ux.push_back(px[j]);
                    uy.push_back(py[j]);
                }
            }
            if (ux.size() < kMinBeatPeaks || ux.size() == px.size()) break;
            px = std::move(ux);
            py = std::move(uy);
            line = fit_line(px, py);
        }
        return BeatFit{line, px.size()};
    };

    std::size_t beat_points = 0;
    for (int iter = 0; iter < 4 && xs.size() >= 2; ++iter) {
        const double rate = -ls.slope;
        auto fit = beat_fit(tail, rate);
        // A slow or multi-frequency beat can leave too few (or too uneven)
        // maxima in the late half; only then is the whole band tried.
        if (!fit || fit->line.r_squared < kMinRSquared) {
            const auto wide = beat_fit(idx, rate);
            if (wide && (!fit || wide->line.r_squared > fit->line.r_squared)) fit = wide;
        }
        if (!fit) break;
        const bool settled =
            beat_points == fit->points && std::abs(fit->line.slope - ls.slope) <= 1e-12 * std::abs(ls.slope);
        ls = fit->line;
        beat_points = fit->points;
        if (settled) break;
    }
    result.method = beat_points > 0 ? RingdownMethod::BeatMaxima : RingdownMethod::Envelope;
    result.samples_used = beat_points > 0 ? beat_points : xs.size();
    result.rate = -ls.slope;
    result.r_squared = ls.r_squared;

    auto min_samples = [&] { return result.method == RingdownMethod::Envelope ? std::size_t{10} : kMinBeatPeaks; };

    // Without beat maxima in the band (a beat period longer than the whole
    // decay, near an exceptional point) a bent envelope still fits a line
    // well, so the decay is identified from the complex deviation samples; a
    // clean identification replaces the envelope. An unclean beat fit is
    // replaced by a better one.
    const bool envelope_only = beat_points == 0;
    if (!tail.empty() && (envelope_only || ls.r_squared < kMinRSquared || result.samples_used < min_samples())) {
        auto samples_in = [&](std::size_t first, std::size_t last) {
            return std::span<const State2>(rec_dev).subspan((first + rec - 1) / rec,
                                                            last / rec + 1 - (first + rec - 1) / rec);
        };
        std::optional<PronyFit> best;
        std::size_t used = 0;
        for (const auto& [first, last] : {std::pair{tail.front(), tail.back()}, std::pair{idx.front(), idx.back()}}) {
            if (last / rec + 1 <= (first + rec - 1) / rec) continue;
            const auto z = samples_in(first, last);
            for (std::size_t order = 1; order <= (std::holds_alternative<TwoModeSystem>(system) ? 4u : 2u); ++order) {
                const auto fit = prony_fit(z, static_cast<double>(rec) * dt, order);
                if (fit && (!best || fit->r_squared > best->r_squared)) {
                    best = fit;
                    used = z.size();
                }
                if (best && best->r_squared >= kCleanFit) break;
            }
            if (best && best->r_squared >= kCleanFit) break;
        }
        if (best && ((envelope_only && best->r_squared >= kCleanFit) || best->r_squared > result.r_squared)) {
            result.method = RingdownMethod::LinearPrediction;
            result.rate = best->rate;
            result.r_squared = best->r_squared;
            result.samples_used = used;
        }
    }
    if (result.samples_used < min_samples()) {
        throw FitError("ringdown_rate: too few tail samples (" + std::to_string(result.samples_used) + ")", 0.0);
    }
    if (result.r_squared < kMinRSquared) {
        throw FitError("ringdown_rate: tail is not exponential (r^2 = " + std::to_string(result.r_squared) + ")",
                       result.r_squared);
    }
    return result;
}

}  // namespace kerr_bic
