#pragma once

// Command-line workflows: locate, stability, integrate, sweep.
//
// Exit codes: 0 success, 1 runtime/integration failure, 2 no equilibrium,
// 64 usage error.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robe/dynamics.hpp"
#include "robe/model.hpp"

namespace robe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitNoEquilibrium = 2;
inline constexpr int kExitUsage = 64;

enum class Command { Locate, Stability, Integrate, Sweep };
enum class Format { Csv, Json };

struct Range {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    /// Evenly spaced values; count == 1 yields {min}.
    std::vector<double> values() const;
};

/// Parses "MIN:MAX:N". Throws std::invalid_argument on malformed or unordered input.
Range parse_range(const std::string& text);

struct SweepGrid {
    Range mu;
    Range k;
    Range a1;
};

struct RunConfig {
    Command command = Command::Locate;
    Params params;
    double tol = 1e-9;  ///< classification tolerance
    std::optional<SweepGrid> grid;
    IntegratorConfig integrator{1e-12, 1e-12, 1.0, 1e-3, 60.0};
    bool from_equilibrium = false;
    bool lower_branch = false;
    double offset = 1e-8;
    std::optional<PhaseState> initial_state;
    std::string output;  ///< empty = stdout (report commands)
    std::string summary;  ///< integrate: summary JSON path, empty = stdout
    Format format = Format::Json;
    std::string svg_region;
};

/// Each run_* writes its report to `out` (or cfg.output when set) and returns an exit code.
int run_locate(const RunConfig& cfg, std::ostream& out);
int run_stability(const RunConfig& cfg, std::ostream& out);
int run_integrate(const RunConfig& cfg, std::ostream& out);
int run_sweep(const RunConfig& cfg, std::ostream& out);

/// Full front end: parse args (without argv[0]), dispatch, map errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_number(double v);

/// RFC-4180 field quoting (quotes only when needed).
std::string csv_field(const std::string& s);

}  // namespace robe::cli
