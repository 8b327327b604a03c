#include "kerr_bic/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kerr_bic/bistability.hpp"
#include "kerr_bic/dynamics.hpp"
#include "kerr_bic/parallel.hpp"
#include "kerr_bic/reduction.hpp"
#include "kerr_bic/spectra.hpp"
#include "kerr_bic/stability.hpp"

namespace kerr_bic::cli {

namespace {

using Params = std::map<std::string, double>;
using Row = std::vector<Cell>;

const std::vector<std::string> kCommands = {"steady", "sweep",    "spectrum", "bic",
                                            "sensitivity", "ringdown", "reduce", "linear2"};

const std::set<std::string> kPhysicalOnly = {"chi3", "omega-a", "n",   "v-eff", "power", "gamma-e",
                                             "rho",  "d",       "delta", "omega-d"};

Cell flag(bool b) { return std::string(b ? "true" : "false"); }

double need(const Params& p, const std::string& name) {
    const auto it = p.find(name);
    if (it == p.end()) throw ConfigError("missing parameter --" + name);
    return it->second;
}

double get_or(const Params& p, const std::string& name, double fallback) {
    const auto it = p.find(name);
    return it == p.end() ? fallback : it->second;
}

std::optional<double> get_opt(const Params& p, const std::string& name) {
    const auto it = p.find(name);
    if (it == p.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// System setup
// ---------------------------------------------------------------------------

struct SingleSetup {
    SingleModeSystem system;
    std::optional<double> drive;
};

SingleSetup single_setup(const RunConfig& c, const Params& p) {
    SingleSetup s;
    if (c.physical) {
        const double gamma = need(p, "gamma");
        const double u = kerr_coefficient_optical(need(p, "chi3"), need(p, "omega-a"), need(p, "n"), need(p, "v-eff"));
        const double e = drive_rabi_optical(need(p, "power"), gamma, need(p, "omega-d"));
        s.system.delta_t = need(p, "delta") / gamma;
        s.system.u_over_gamma = u / gamma;
        s.drive = normalized_drive_single(u, e, gamma);
    } else {
        s.system.delta_t = need(p, "delta-t");
        s.system.u_over_gamma = get_or(p, "u-over-gamma", 1.0);
        s.drive = get_opt(p, "i");
    }
    return s;
}

struct TwoSetup {
    TwoModeParams params;
    std::optional<double> drive;  // I = UΩ²
};

TwoSetup two_setup(const RunConfig& c, const Params& p) {
    TwoSetup s;
    auto& q = s.params;
    q.delta_a = need(p, "delta-a");
    q.delta_b = need(p, "delta-b");
    q.gamma_a = get_or(p, "gamma-a", 1.0);
    q.gamma_b = get_or(p, "gamma-b", 1.0);
    q.g = need(p, "g");
    q.u = get_or(p, "u", 1.0);
    std::optional<double> omega;
    if (c.physical) {
        omega = drive_rabi_magnon(need(p, "gamma-e"), need(p, "rho"), need(p, "d"), need(p, "power"));
    } else {
        omega = get_opt(p, "omega");
        if (auto i = get_opt(p, "i")) {
            if (omega) throw ConfigError("give either --i or --omega, not both");
            s.drive = *i;
            if (q.u > 0.0 && *i >= 0.0) q.omega = std::sqrt(*i / q.u);
        }
    }
    if (omega) {
        q.omega = *omega;
        s.drive = q.u * *omega * *omega;
    }
    q.validate();
    return s;
}

double need_drive(const std::optional<double>& drive) {
    if (!drive) throw ConfigError("missing parameter --i (normalized drive)");
    return *drive;
}

KerrSystem kerr_system(const RunConfig& c, const Params& p, std::optional<double>& drive) {
    if (c.system == SystemKind::Single) {
        auto s = single_setup(c, p);
        drive = s.drive;
        return s.system;
    }
    if (c.system == SystemKind::Two) {
        auto s = two_setup(c, p);
        drive = s.drive;
        return TwoModeSystem{s.params};
    }
    throw ConfigError(c.command + " needs --system single or two");
}

Branch parse_branch(const std::string& name) {
    if (name == "lower") return Branch::Lower;
    if (name == "middle") return Branch::Middle;
    if (name == "upper") return Branch::Upper;
    throw ConfigError("unknown branch '" + name + "' (lower, middle, upper)");
}

// ---------------------------------------------------------------------------
// Tabulation over an optional sweep
// ---------------------------------------------------------------------------

using RowFn = std::function<std::vector<Row>(const Params&, bool in_sweep)>;

Table tabulate(const RunConfig& c, std::vector<std::string> columns, const RowFn& fn) {
    Table t;
    t.command = c.command;
    if (!c.sweep) {
        t.columns = std::move(columns);
        for (auto& row : fn(c.parameters, false)) t.add_row(std::move(row));
        return t;
    }
    const auto values = c.sweep->values();
    const std::string& var = c.sweep->variable;
    auto blocks = parallel::unwrap(parallel::map_indexed(
        values.size(),
        [&](std::size_t k) {
            Params q = c.parameters;
            q[var] = values[k];
            return fn(q, true);
        },
        c.jobs));
    columns.insert(columns.begin(), var);
    t.columns = std::move(columns);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        for (auto& row : blocks[k]) {
            row.insert(row.begin(), values[k]);
            t.add_row(std::move(row));
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

Table cmd_steady(const RunConfig& c) {
    const bool two = c.system == SystemKind::Two;
    std::vector<std::string> cols = {"i", "response", "re_a", "im_a"};
    if (two) cols.insert(cols.end(), {"re_b", "im_b"});
    cols.insert(cols.end(), {"stability", "marginal", "det_h"});
    return tabulate(c, cols, [&](const Params& p, bool) {
        std::vector<Row> rows;
        if (two) {
            const auto s = two_setup(c, p);
            const double i = need_drive(s.drive);
            for (const auto& r : solve_two_mode(i, s.params, c.tolerances.root_realness)) {
                rows.push_back({i, r.response, r.amplitude_a.real(), r.amplitude_a.imag(), r.amplitude_b->real(),
                                r.amplitude_b->imag(), std::string(to_string(r.stability)), flag(r.marginal),
                                det_h_two(s.params, r.response)});
            }
        } else {
            const auto s = single_setup(c, p);
            const double i = need_drive(s.drive);
            for (const auto& r : solve_single_mode(i, s.system.delta_t, s.system.u_over_gamma,
                                                   c.tolerances.root_realness)) {
                rows.push_back({i, r.response, r.amplitude_a.real(), r.amplitude_a.imag(),
                                std::string(to_string(r.stability)), flag(r.marginal),
                                det_h_single(r.response, s.system.delta_t)});
            }
        }
        return rows;
    });
}

Table cmd_sweep(const RunConfig& c) {
    if (!c.sweep || c.sweep->variable != "i") throw ConfigError("sweep needs --sweep i:start:stop:count[:up|down]");
    Params p = c.parameters;
    p["i"] = 0.0;
    std::optional<double> unused;
    const KerrSystem system = kerr_system(c, p, unused);
    const auto values = c.sweep->values();
    const SweepTrace trace = parallel::hysteresis_sweep(system, values, c.sweep->effective_direction(), c.jobs);

    Table t;
    t.command = c.command;
    t.columns = {"i", "response", "stability", "root_count", "jumped"};
    for (const auto& pt : trace.points) {
        t.add_row({pt.drive, pt.response, std::string(to_string(pt.stability)), static_cast<double>(pt.root_count),
                   flag(pt.jumped)});
    }
    t.summary.emplace_back("direction", std::string(trace.direction == SweepDirection::Up ? "up" : "down"));
    t.summary.emplace_back("jumps", static_cast<double>(trace.jumps.size()));
    for (std::size_t k = 0; k < trace.jumps.size(); ++k) {
        const auto& j = trace.jumps[k];
        const std::string key = "jump" + std::to_string(k) + "_";
        t.summary.emplace_back(key + "drive_before", j.drive_before);
        t.summary.emplace_back(key + "drive_after", j.drive_after);
        t.summary.emplace_back(key + "response_before", j.response_before);
        t.summary.emplace_back(key + "response_after", j.response_after);
    }
    for (std::size_t k = 0; k < trace.bic_loci.size(); ++k) {
        const std::string key = k == 0 ? "turning_lower_" : "turning_upper_";
        t.summary.emplace_back(key + "response", trace.bic_loci[k].response);
        t.summary.emplace_back(key + "drive", trace.bic_loci[k].drive);
    }
    return t;
}

Table cmd_spectrum(const RunConfig& c) {
    const bool two = c.system == SystemKind::Two;
    const std::vector<std::string> cols = {"i", "response", "stability", "k", "re_lambda", "im_lambda", "abs_lambda"};
    return tabulate(c, cols, [&](const Params& p, bool) {
        std::vector<Row> rows;
        auto emit = [&](double i, const SteadyRoot& r, const Spectrum& sp) {
            for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
                const Complex l = sp.eigenvalues[k];
                rows.push_back({i, r.response, std::string(to_string(r.stability)), static_cast<double>(k), l.real(),
                                l.imag(), std::abs(l)});
            }
        };
        if (two) {
            auto s = two_setup(c, p);
            if (auto x = get_opt(p, "x")) {
                // Frozen response: spectrum at a prescribed x.
                const EffectiveDetuning dt = effective_detuning(s.params);
                const double i = two_mode_intensity(*x, dt);
                s.params.omega = std::sqrt(i / s.params.u);
                const SteadyRoot r = two_mode_root_at(s.params, *x);
                SteadyRoot labelled = r;
                labelled.stability = classify_two_mode(s.params, *x).stability;
                emit(i, labelled, eigenvalues_two(s.params, r));
            } else {
                const double i = need_drive(s.drive);
                for (const auto& r : solve_two_mode(i, s.params, c.tolerances.root_realness)) {
                    emit(i, r, eigenvalues_two(s.params, r));
                }
            }
        } else {
            const auto s = single_setup(c, p);
            if (auto alpha = get_opt(p, "alpha")) {
                SteadyRoot r;
                r.response = *alpha;
                r.stability = classify_single_mode(*alpha, s.system.delta_t).stability;
                emit(single_mode_intensity(*alpha, s.system.delta_t), r, eigenvalues_single(*alpha, s.system.delta_t));
            } else {
                const double i = need_drive(s.drive);
                for (const auto& r : solve_single_mode(i, s.system.delta_t, s.system.u_over_gamma,
                                                       c.tolerances.root_realness)) {
                    emit(i, r, eigenvalues_single(r.response, s.system.delta_t));
                }
            }
        }
        return rows;
    });
}

Table cmd_bic(const RunConfig& c) {
    const bool two = c.system == SystemKind::Two;
    const std::vector<std::string> cols = {"branch", "response", "drive", "det_residual", "min_abs_lambda", "bic"};
    const double tol = c.tolerances.bic_measure;
    Table t = tabulate(c, cols, [&](const Params& p, bool in_sweep) {
        std::vector<Row> rows;
        try {
            if (two) {
                const auto s = two_setup(c, p);
                if (!(s.params.u > 0.0)) throw ConfigError("bic needs U > 0");
                const TurningPoints tp = turning_points_two(effective_detuning(s.params));
                for (const auto& [name, x, i] : {std::tuple{"lower", tp.lower, tp.i_lower},
                                                 std::tuple{"upper", tp.upper, tp.i_upper}}) {
                    TwoModeParams q = s.params;
                    q.omega = std::sqrt(i / q.u);
                    const Spectrum sp = eigenvalues_two(q, two_mode_root_at(q, x));
                    rows.push_back({std::string(name), x, i, det_h_two(q, x) / det_h_two_scale(q, x),
                                    sp.bic_measure, flag(sp.is_bic(tol))});
                }
            } else {
                const auto s = single_setup(c, p);
                const TurningPoints tp = turning_points_single(s.system.delta_t);
                for (const auto& [name, a, i] : {std::tuple{"lower", tp.lower, tp.i_lower},
                                                 std::tuple{"upper", tp.upper, tp.i_upper}}) {
                    const Spectrum sp = eigenvalues_single(a, s.system.delta_t);
                    rows.push_back({std::string(name), a, i, det_h_single(a, s.system.delta_t), sp.bic_measure,
                                    flag(sp.is_bic(tol))});
                }
            }
        } catch (const NoBistability&) {
            if (!in_sweep) throw;
        }
        return rows;
    });
    if (c.sweep) {
        const std::size_t bistable = t.rows.size() / 2;
        t.summary.emplace_back("gaps", static_cast<double>(c.sweep->count - bistable));
    }
    return t;
}

Table cmd_sensitivity(const RunConfig& c) {
    if (c.sweep) throw ConfigError("sensitivity builds its own drive grid; --sweep is not accepted");
    Params p = c.parameters;
    double i_ref = 0.0;
    bool below = true;
    Branch branch = Branch::Lower;
    KerrSystem system;
    if (c.ref == "inflection") {
        if (c.system != SystemKind::Single) throw ConfigError("--ref inflection is defined for the single mode only");
        const CriticalPoint cp = critical_point_single();
        if (auto d = get_opt(p, "delta-t"); d && std::abs(*d - cp.delta_c) > 1e-12) {
            throw ConfigError("--ref inflection fixes delta-t to the critical detuning " + format_real(cp.delta_c));
        }
        p["delta-t"] = cp.delta_c;
        std::optional<double> unused;
        system = kerr_system(c, p, unused);
        i_ref = cp.i_c;
    } else {
        std::optional<double> unused;
        system = kerr_system(c, p, unused);
        TurningPoints tp;
        if (const auto* s = std::get_if<SingleModeSystem>(&system)) {
            tp = turning_points_single(s->delta_t);
        } else {
            tp = turning_points_two(effective_detuning(std::get<TwoModeSystem>(system).params));
        }
        if (c.ref == "lower") {
            i_ref = tp.i_lower;
        } else {
            i_ref = tp.i_upper;
            below = false;
            branch = Branch::Upper;
        }
    }
    if (c.branch) branch = parse_branch(*c.branch);

    const double count = get_or(p, "count", 200.0);
    if (count < 20.0 || count != std::floor(count)) throw ConfigError("--count must be an integer >= 20");
    const double lo = c.tolerances.fit_window_low, hi = c.tolerances.fit_window_high;
    const auto grid = approach_grid(i_ref, lo, hi, static_cast<std::size_t>(count), below);
    const auto profile = parallel::sensitivity_profile(system, grid, branch, c.jobs);

    Table t;
    t.command = c.command;
    t.columns = {"i", "distance", "response", "derivative"};
    const double nan = std::nan("");
    for (const auto& row : profile) {
        t.add_row({row.drive, std::abs(row.drive - i_ref), row.response.value_or(nan), row.derivative.value_or(nan)});
    }
    // Widen by a hair so the grid end points survive rounding.
    const ScalingFit fit = fit_scaling(profile, i_ref, lo * (1.0 - 1e-9), hi * (1.0 + 1e-9));
    t.summary = {{"ref", c.ref},
                 {"branch", std::string(to_string(branch))},
                 {"i_ref", i_ref},
                 {"exponent", fit.exponent},
                 {"exponent_stderr", fit.exponent_stderr},
                 {"prefactor", fit.prefactor()},
                 {"r_squared", fit.r_squared},
                 {"window_min", fit.window_min},
                 {"window_max", fit.window_max},
                 {"points", static_cast<double>(fit.points)}};
    return t;
}

Table cmd_ringdown(const RunConfig& c) {
    const Branch branch = parse_branch(c.branch.value_or("lower"));
    const std::vector<std::string> cols = {"i",           "response", "rate",    "predicted_rate", "relative_difference",
                                           "r_squared",   "lower_bound", "samples", "t_end",          "method"};
    return tabulate(c, cols, [&](const Params& p, bool) {
        std::optional<double> drive;
        const KerrSystem system = kerr_system(c, p, drive);
        const double i = need_drive(drive);
        const auto root = root_on_branch(system, i, branch);
        if (!root) throw DomainError(std::string("no ") + to_string(branch) + " branch at I = " + format_real(i));
        const double perturbation = get_or(p, "perturbation", 1e-4);
        const double t_final = get_or(p, "t-final", kRingdownTimeCap);
        const RingdownResult r = ringdown_rate(system, *root, perturbation, t_final);
        const double rel = (r.rate - r.predicted_rate) / r.predicted_rate;
        return std::vector<Row>{{i, root->response, r.rate, r.predicted_rate, rel, r.r_squared, flag(r.lower_bound),
                                 static_cast<double>(r.samples_used), r.t_end, std::string(to_string(r.method))}};
    });
}

Table cmd_reduce(const RunConfig& c, std::ostream& diagnostics) {
    if (c.system != SystemKind::Two) throw ConfigError("reduce needs --system two");
    const std::vector<std::string> cols = {"delta_eff",       "u_eff",           "gamma_eff",
                                           "drive_eff",       "within_validity", "k",
                                           "full_occupation", "effective_occupation", "relative_error"};
    Table t = tabulate(c, cols, [&](const Params& p, bool) {
        TwoModeParams q;
        q.delta_a = need(p, "delta-a");
        q.delta_b = need(p, "delta-b");
        q.gamma_a = get_or(p, "gamma-a", 1.0);
        q.gamma_b = get_or(p, "gamma-b", 1.0);
        q.g = need(p, "g");
        q.u = get_or(p, "u", 1.0);
        const double e = need(p, "e");
        const EffectiveSingleMode eff = effective_params(q, e);
        const ReductionComparison cmp = reduction_error(q, e);
        std::vector<Row> rows;
        for (std::size_t k = 0; k < cmp.relative_error.size(); ++k) {
            rows.push_back({eff.delta_eff, eff.u_eff, eff.gamma_eff, eff.drive_eff, flag(eff.within_validity),
                            static_cast<double>(k), cmp.full_occupation[k], cmp.effective_occupation[k],
                            cmp.relative_error[k]});
        }
        return rows;
    });
    const std::size_t col = t.column("within_validity");
    for (const auto& row : t.rows) {
        if (std::get<std::string>(row[col]) == "false") {
            diagnostics << "warning: |delta_b| is below 10x g or gamma_b; the adiabatic elimination is outside its "
                           "validity range\n";
            break;
        }
    }
    return t;
}

Table cmd_linear2(const RunConfig& c) {
    if (c.system != SystemKind::Linear2) throw ConfigError("linear2 needs --system linear2");
    const std::vector<std::string> cols = {"branch",   "re_lambda",         "im_lambda", "abs_lambda",
                                           "symmetry", "exceptional_point", "bic"};
    const double tol = c.tolerances.bic_measure;
    return tabulate(c, cols, [&](const Params& p, bool) {
        LinearTwoModeParams q;
        q.delta_a = get_or(p, "delta-a", 0.0);
        q.delta_b = get_or(p, "delta-b", 0.0);
        q.kappa = need(p, "kappa");
        q.gamma = need(p, "gamma");
        q.g = need(p, "g");
        q.dissipative_coupling = get_or(p, "Gamma", 0.0);
        const Spectrum sp = linear_two_mode_eigenvalues(q);
        const SymmetryClass cls = classify_symmetry(q, tol);
        std::vector<Row> rows;
        for (std::size_t k = 0; k < sp.eigenvalues.size(); ++k) {
            const Complex l = sp.eigenvalues[k];
            rows.push_back({std::string(k == 0 ? "plus" : "minus"), l.real(), l.imag(), std::abs(l),
                            std::string(to_string(cls.tag)), flag(cls.at_exceptional_point),
                            flag(std::abs(l) < tol)});
        }
        return rows;
    });
}

// ---------------------------------------------------------------------------
// JSON config
// ---------------------------------------------------------------------------

double json_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

std::string json_string(const nlohmann::json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where + " must be a string");
    return j.get<std::string>();
}

bool json_bool(const nlohmann::json& j, const std::string& where) {
    if (!j.is_boolean()) throw ConfigError(where + " must be true or false");
    return j.get<bool>();
}

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

SweepDirection parse_direction(const std::string& s) {
    if (s == "up") return SweepDirection::Up;
    if (s == "down") return SweepDirection::Down;
    throw ConfigError("sweep direction must be up or down, got '" + s + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Public pieces
// ---------------------------------------------------------------------------

const char* to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::Single: return "single";
        case SystemKind::Two: return "two";
        case SystemKind::Linear2: return "linear2";
    }
    return "single";
}

SystemKind parse_system(std::string_view name) {
    if (name == "single") return SystemKind::Single;
    if (name == "two") return SystemKind::Two;
    if (name == "linear2") return SystemKind::Linear2;
    throw ConfigError("unknown system '" + std::string(name) + "' (single, two, linear2)");
}

SweepDirection SweepSpec::effective_direction() const {
    if (direction) return *direction;
    return stop >= start ? SweepDirection::Up : SweepDirection::Down;
}

std::vector<double> SweepSpec::values() const {
    if (count < 2) throw ConfigError("sweep count must be at least 2");
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(count - 1);
        v[k] = k + 1 == count ? stop : start + t * (stop - start);
    }
    const bool ascending = stop >= start;
    if (ascending != (effective_direction() == SweepDirection::Up)) std::reverse(v.begin(), v.end());
    return v;
}

SweepSpec parse_sweep(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4 && parts.size() != 5) {
        throw ConfigError("--sweep expects variable:start:stop:count[:up|down], got '" + std::string(text) + "'");
    }
    SweepSpec s;
    s.variable = parts[0];
    try {
        std::size_t used = 0;
        s.start = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("start");
        s.stop = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("stop");
        const long long n = std::stoll(parts[3], &used);
        if (used != parts[3].size() || n < 2) throw std::invalid_argument("count");
        s.count = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError("--sweep has a malformed number or a count below 2: '" + std::string(text) + "'");
    }
    if (parts.size() == 5) s.direction = parse_direction(parts[4]);
    return s;
}

const std::vector<std::string>& parameter_names(SystemKind kind) {
    static const std::vector<std::string> single = {
        "delta-t", "i",     "u-over-gamma", "alpha", "chi3",         "omega-a", "n",    "v-eff",
        "power",   "gamma", "omega-d",      "delta", "perturbation", "t-final", "count"};
    static const std::vector<std::string> two = {
        "delta-a", "delta-b", "gamma-a", "gamma-b", "g",     "u",            "i",       "omega",
        "x",       "e",       "gamma-e", "rho",     "d",     "power",        "perturbation", "t-final",
        "count"};
    static const std::vector<std::string> linear2 = {"delta-a", "delta-b", "kappa", "gamma", "g", "Gamma"};
    switch (kind) {
        case SystemKind::Single: return single;
        case SystemKind::Two: return two;
        case SystemKind::Linear2: return linear2;
    }
    return single;
}

void RunConfig::validate() const {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        throw ConfigError("unknown command '" + command + "'");
    }
    const auto& names = parameter_names(system);
    auto known = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    for (const auto& [name, value] : parameters) {
        if (!known(name)) {
            throw ConfigError("parameter '" + name + "' is not defined for system " + to_string(system));
        }
        if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' must be finite");
        // "gamma" is the linear-system loss rate as well as a physical input.
        const bool physical_only = kPhysicalOnly.count(name) || (name == "gamma" && system == SystemKind::Single);
        if (physical_only && !physical) throw ConfigError("parameter '" + name + "' needs --physical");
    }
    if (physical) {
        if (system == SystemKind::Linear2) throw ConfigError("--physical is not available for linear2");
        for (const char* n : {"i", "delta-t", "omega", "u-over-gamma"}) {
            if (parameters.count(n)) throw ConfigError(std::string("--") + n + " is derived under --physical");
        }
    }
    if (sweep) {
        if (!known(sweep->variable)) {
            throw ConfigError("sweep variable '" + sweep->variable + "' is not defined for system " +
                              to_string(system));
        }
        if (sweep->count < 2) throw ConfigError("sweep count must be at least 2");
        if (!std::isfinite(sweep->start) || !std::isfinite(sweep->stop)) throw ConfigError("sweep bounds must be finite");
    }
    if (output.format != "csv" && output.format != "json") {
        throw ConfigError("format must be csv or json, got '" + output.format + "'");
    }
    if (!(tolerances.bic_measure > 0.0) || !(tolerances.root_realness > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (!(tolerances.fit_window_low > 0.0) || !(tolerances.fit_window_high > tolerances.fit_window_low)) {
        throw ConfigError("fit window must satisfy 0 < low < high");
    }
    if (ref != "lower" && ref != "upper" && ref != "inflection") {
        throw ConfigError("--ref must be lower, upper or inflection");
    }
    if (branch) {
        parse_branch(*branch);
        if (*branch == "middle" && !include_unstable) {
            throw ConfigError("the middle branch is unstable; pass --include-unstable to select it");
        }
    }
    if (jobs < 0) throw ConfigError("--jobs must be non-negative");
    if (command == "linear2" && system != SystemKind::Linear2) throw ConfigError("linear2 needs --system linear2");
    if (command != "linear2" && system == SystemKind::Linear2) {
        throw ConfigError("--system linear2 is only used by the linear2 command");
    }
}

void apply_config_json(RunConfig& c, std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, {"system", "parameters", "sweep", "output", "tolerances", "options"}, "config");
    if (j.contains("system")) c.system = parse_system(json_string(j["system"], "system"));
    if (j.contains("parameters")) {
        const auto& p = j["parameters"];
        if (!p.is_object()) throw ConfigError("parameters must be an object");
        for (const auto& [key, value] : p.items()) c.parameters[key] = json_number(value, "parameters." + key);
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        if (s.is_string()) {
            c.sweep = parse_sweep(s.get<std::string>());
        } else {
            if (!s.is_object()) throw ConfigError("sweep must be an object or a string");
            reject_unknown(s, {"variable", "start", "stop", "count", "direction"}, "sweep");
            SweepSpec spec;
            spec.variable = json_string(s.value("variable", nlohmann::json()), "sweep.variable");
            spec.start = json_number(s.value("start", nlohmann::json()), "sweep.start");
            spec.stop = json_number(s.value("stop", nlohmann::json()), "sweep.stop");
            const double n = json_number(s.value("count", nlohmann::json()), "sweep.count");
            if (n < 2.0 || n != std::floor(n)) throw ConfigError("sweep.count must be an integer >= 2");
            spec.count = static_cast<std::size_t>(n);
            if (s.contains("direction")) spec.direction = parse_direction(json_string(s["direction"], "sweep.direction"));
            c.sweep = spec;
        }
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) throw ConfigError("output must be an object");
        reject_unknown(o, {"path", "format"}, "output");
        if (o.contains("path")) c.output.path = json_string(o["path"], "output.path");
        if (o.contains("format")) c.output.format = json_string(o["format"], "output.format");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances must be an object");
        reject_unknown(t, {"bic_measure", "root_realness", "fit_window_low", "fit_window_high"}, "tolerances");
        if (t.contains("bic_measure")) c.tolerances.bic_measure = json_number(t["bic_measure"], "tolerances.bic_measure");
        if (t.contains("root_realness")) {
            c.tolerances.root_realness = json_number(t["root_realness"], "tolerances.root_realness");
        }
        if (t.contains("fit_window_low")) {
            c.tolerances.fit_window_low = json_number(t["fit_window_low"], "tolerances.fit_window_low");
        }
        if (t.contains("fit_window_high")) {
            c.tolerances.fit_window_high = json_number(t["fit_window_high"], "tolerances.fit_window_high");
        }
    }
    if (j.contains("options")) {
        const auto& o = j["options"];
        if (!o.is_object()) throw ConfigError("options must be an object");
        reject_unknown(o, {"physical", "include_unstable", "ref", "branch", "jobs"}, "options");
        if (o.contains("physical")) c.physical = json_bool(o["physical"], "options.physical");
        if (o.contains("include_unstable")) c.include_unstable = json_bool(o["include_unstable"], "options.include_unstable");
        if (o.contains("ref")) c.ref = json_string(o["ref"], "options.ref");
        if (o.contains("branch")) c.branch = json_string(o["branch"], "options.branch");
        if (o.contains("jobs")) {
            const double n = json_number(o["jobs"], "options.jobs");
            if (n < 0.0 || n != std::floor(n)) throw ConfigError("options.jobs must be a non-negative integer");
            c.jobs = static_cast<int>(n);
        }
    }
}

Table execute(const RunConfig& c, std::ostream& diagnostics) {
    c.validate();
    if (c.command == "steady") return cmd_steady(c);
    if (c.command == "sweep") return cmd_sweep(c);
    if (c.command == "spectrum") return cmd_spectrum(c);
    if (c.command == "bic") return cmd_bic(c);
    if (c.command == "sensitivity") return cmd_sensitivity(c);
    if (c.command == "ringdown") return cmd_ringdown(c);
    if (c.command == "reduce") return cmd_reduce(c, diagnostics);
    return cmd_linear2(c);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"kerr-bic: bound states in the continuum of driven Kerr systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("kerr-bic ") + kVersion);

    std::optional<std::string> config_path, system, sweep, format, out_path, ref, branch;
    std::optional<int> jobs;
    bool physical = false, include_unstable = false;
    std::optional<double> bic_tol, realness_tol, fit_low, fit_high;
    std::map<std::string, std::optional<double>> params;
    std::set<std::string> all_names;
    for (auto kind : {SystemKind::Single, SystemKind::Two, SystemKind::Linear2}) {
        for (const auto& n : parameter_names(kind)) all_names.insert(n);
    }
    for (const auto& n : all_names) params[n];

    const std::map<std::string, std::string> descriptions = {
        {"steady", "steady states at a drive"},
        {"sweep", "hysteresis sweep along the drive"},
        {"spectrum", "linearized spectrum at the roots or at a frozen response"},
        {"bic", "turning points and the BIC measure there"},
        {"sensitivity", "detuning derivative near a turning or inflection point, with a power-law fit"},
        {"ringdown", "time-domain decay rate against the linearized prediction"},
        {"reduce", "adiabatic elimination of mode b and its error"},
        {"linear2", "eigenvalues and symmetry class of the linear two-mode system"},
    };
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", config_path, "RunConfig JSON file");
        sub->add_option("--system", system, "single | two | linear2");
        for (const auto& n : all_names) sub->add_option("--" + n, params[n]);
        sub->add_option("--sweep", sweep, "variable:start:stop:count[:up|down]");
        sub->add_option("--format", format, "csv | json");
        sub->add_option("--out", out_path, "output file (default: standard output)");
        sub->add_option("--jobs", jobs, "worker threads (default: KERR_BIC_JOBS or all cores)");
        sub->add_flag("--physical", physical, "read SI platform parameters");
        sub->add_flag("--include-unstable", include_unstable, "allow the unstable middle branch");
        sub->add_option("--ref", ref, "sensitivity reference: lower | upper | inflection");
        sub->add_option("--branch", branch, "lower | middle | upper");
        sub->add_option("--bic-tol", bic_tol, "threshold on min |lambda| for the BIC flag");
        sub->add_option("--realness-tol", realness_tol, "cubic root realness tolerance");
        sub->add_option("--fit-low", fit_low, "lower end of the relative fit window");
        sub->add_option("--fit-high", fit_high, "upper end of the relative fit window");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        const int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig c;
        c.command = app.get_subcommands().front()->get_name();
        if (c.command == "linear2") c.system = SystemKind::Linear2;
        if (config_path) {
            std::ifstream in(*config_path);
            if (!in) throw ConfigError("cannot read config file " + *config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            apply_config_json(c, ss.str());
        }
        if (system) c.system = parse_system(*system);
        for (const auto& [name, value] : params) {
            if (value) c.parameters[name] = *value;
        }
        if (sweep) c.sweep = parse_sweep(*sweep);
        if (format) c.output.format = *format;
        if (out_path) c.output.path = *out_path;
        if (jobs) c.jobs = *jobs;
        if (physical) c.physical = true;
        if (include_unstable) c.include_unstable = true;
        if (ref) c.ref = *ref;
        if (branch) c.branch = *branch;
        if (bic_tol) c.tolerances.bic_measure = *bic_tol;
        if (realness_tol) c.tolerances.root_realness = *realness_tol;
        if (fit_low) c.tolerances.fit_window_low = *fit_low;
        if (fit_high) c.tolerances.fit_window_high = *fit_high;

        const Table table = execute(c, err);
        std::ostringstream buf;
        if (c.output.format == "json") {
            write_json(buf, table);
        } else {
            write_csv(buf, table);
        }
        if (c.output.path.empty()) {
            out << buf.str();
        } else {
            std::ofstream file(c.output.path, std::ios::binary);
            if (!file) throw ConfigError("cannot write " + c.output.path);
            file << buf.str();
        }
        return kExitOk;
    } catch (const NoBistability& e) {
        err << "error: " << e.what() << " (criterion value " << format_real(e.value()) << ", boundary "
            << format_real(e.boundary()) << ")\n";
        return kExitNotApplicable;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvariantViolation& e) {
        err << "invariant violated: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const FitError& e) {
        err << "fit error: " << e.what() << " (r^2 = " << format_real(e.r_squared()) << ")\n";
        return kExitNumeric;
    } catch (const StructuralDisagreement& e) {
        err << "structural disagreement: " << e.what() << " (full " << e.full_roots() << ", reduced "
            << e.reduced_roots() << ")\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << '\n';
        return kExitUnexpected;
    }
}

}  // namespace kerr_bic::cli
