#pragma once

// Command-line front end: run configuration (flags or a JSON file), the
// subcommands, and their tabular output.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerr_bic/core.hpp"
#include "kerr_bic/polynomial.hpp"
#include "kerr_bic/sensitivity.hpp"
#include "kerr_bic/steady_state.hpp"
#include "kerr_bic/table.hpp"

namespace kerr_bic::cli {

// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitUnexpected = 1,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitNotApplicable = 4,
};

enum class SystemKind { Single, Two, Linear2 };

const char* to_string(SystemKind kind);
SystemKind parse_system(std::string_view name);

struct SweepSpec {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
    std::optional<SweepDirection> direction;  // unset: follows start -> stop

    // Evenly spaced values, ascending for Up and descending for Down.
    std::vector<double> values() const;
    SweepDirection effective_direction() const;
};

// "variable:start:stop:count[:up|down]"
SweepSpec parse_sweep(std::string_view text);

struct OutputSpec {
    std::string path;  // empty: standard output
    std::string format = "csv";
};

struct Tolerances {
    double bic_measure = kDefaultBicTolerance;
    double root_realness = poly::kRealnessTolerance;
    double fit_window_low = kFitWindowLow;
    double fit_window_high = kFitWindowHigh;
};

struct RunConfig {
    std::string command;
    SystemKind system = SystemKind::Single;
    std::map<std::string, double> parameters;
    std::optional<SweepSpec> sweep;
    OutputSpec output;
    Tolerances tolerances;
    bool physical = false;
    bool include_unstable = false;
    std::string ref = "lower";          // sensitivity: lower | upper | inflection
    std::optional<std::string> branch;  // lower | middle | upper
    int jobs = 0;                       // 0: KERR_BIC_JOBS or the OpenMP default

    // Throws ConfigError on unknown parameter names, a bad sweep, format or
    // option value.
    void validate() const;
};

// Parameter names accepted for a system (normalized and --physical inputs,
// plus the per-command extras).
const std::vector<std::string>& parameter_names(SystemKind kind);

// Reads the RunConfig JSON schema; keys not present keep their defaults.
// Throws ConfigError on malformed input or unknown keys.
void apply_config_json(RunConfig& config, std::string_view json_text);

// Runs one validated command and returns its table. Library errors propagate.
Table execute(const RunConfig& config, std::ostream& diagnostics);

// Full command line: parsing, execution, output and exit-code mapping.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kerr_bic::cli
