#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muskat/contour.hpp"
#include "muskat/diagnostics.hpp"

namespace muskat {

struct RunConfig {
    std::string scenario = "stable";
    double a = 0.1;
    double b = 2.0;
    int n_points = 256;
    int gamma_count = 9;
    double delta = 0.5;
    double delta_c = 0.005;
    double dt = 0.0;         // 0 -> derived from cfl_const
    double cfl_const = 0.0;  // 0 -> 0.5/(2*pi*max(sigma_max, c_max))
    double t_final = 0.01;
    double rho_factor = 1.0;
    int record_every = 10;
    bool evolve_w = false;
    std::optional<long> mollify_n;
    std::string output_dir = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    std::vector<double> extension_y;
};

/// Parse and validate a config document; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Scenario library. `rho_sign` is -1 for the unstable scenario (heavier
/// fluid on top), +1 otherwise.
struct Scenario {
    Contour contour;
    double rho_sign = 1.0;
};
Scenario make_scenario(const std::string& name, double a, double b, int n_points);

/// Outcome of a full run; `exit_code` follows the CLI contract
/// (0 ok, 2 config error, 3 monitor failure, 4 numerical failure).
struct RunOutcome {
    int exit_code = 0;
    std::string stop_reason;
    double chosen_delta = 0.0;
    double chosen_delta_c = 0.0;
    int direction = 0;
};

/// Orchestrate split -> family init -> evolve -> diagnostics and write
/// diagnostics.csv, summary.json, per-snapshot mode dumps and optional
/// extension reconstructions under config.output_dir.
RunOutcome run(const RunConfig& config);

/// Stationary-module driver config.
struct StationaryConfig {
    std::string operator_name = "linear_mode";  // linear_mode | zero | conjugate
    double k0 = 2.0;
    int n_points = 64;
    double t_max = 0.5;
    double dt = 1e-3;
    int sobolev_index = 1;
    int trials = 8;
    std::string output_dir = "out";
};
StationaryConfig parse_stationary_config(const std::string& json_text);
int run_stationary(const StationaryConfig& config);

/// Built-in identity checks behind the `verify-spectral` / `verify-lemmas`
/// subcommands. Print one line per check; return 0 when all pass, 4 otherwise.
int verify_spectral(int n_points = 256);
int verify_lemmas();

/// printf-style %.17g formatting used for every floating-point output.
std::string format_g17(double v);

}  // namespace muskat
