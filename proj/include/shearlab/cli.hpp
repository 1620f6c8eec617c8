// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shearlab/profiles.hpp"
#include "shearlab/report.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shear {

enum ExitCode : int { ExitPass = 0, ExitConfig = 1, ExitCriterion = 2, ExitNonConvergence = 3 };

struct ProfileConfig {
    std::string name = "couette";
    profiles::ProfileParams params;
};

ShearProfile make_profile(const ProfileConfig& c);

struct GridConfig {
    double margin_factor = 8.0;
    double n_per_layer = 10.0;
    std::size_t n_min = 201;
    std::size_t n_cap = 200000;
};

struct SolverConfig {
    double tol = 1e-12;
    int max_iter = 2000;
    int krylov_dim = 80;
    bool dense_fallback = true;
    std::size_t dense_limit = 2000;
    std::size_t coarse_points = 512;
    double refine_tol = 1e-4;
    double convergence_rtol = 0.01;
    bool check_grid = true;
    bool check_truncation = false;
};

struct SemigroupConfig {
    int ensemble_size = 8;
    int power_steps = 20;
    double power_rtol = 1e-6;
    std::size_t checkpoints = 48;
    double horizon = 12.0;          // in units of 1 / rate_target
    std::string method = "power_iteration";
    double wei_slack = 0.02;
    bool with_semigroup = false;    // semigroup rate column in sweep-scaling
};

struct TensorConfig {
    std::vector<ProfileConfig> factors;   // empty: y1 + y2^2 on [-1, 1]^2
    std::size_t n_axis = 160;
    std::size_t n_cap = 200;
    std::size_t checkpoints = 10;
    double horizon = 8.0;
    double tolerance = 0.05;
};

struct CheckConfig {
    std::size_t grid_points = 4001;
    std::vector<double> probe_radii{10.0, 20.0, 40.0};
    double window_span = 10.0;
    std::optional<double> window_lo;
    std::optional<double> window_hi;
};

/// One JSON document drives every command. Unknown keys are rejected so a
/// misspelt option cannot silently fall back to its default.
struct RunConfig {
    std::optional<ProfileConfig> profile;
    std::optional<double> nu;
    std::optional<double> k;
    GridConfig grid;
    std::vector<double> nu_list{1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> k_list{1.0};
    std::vector<double> lambda_grid;      // empty: 61 points over range(v) +- 0.5
    std::vector<double> delta_grid{0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> L_list{10.0, 20.0, 40.0, 80.0};
    SolverConfig solver;
    SemigroupConfig semigroup;
    TensorConfig tensor;
    CheckConfig checks;
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string output_dir = "shearlab-out";
    std::uint64_t seed = 20240607;
    int workers = 0;                      // 0: all logical cores
    std::string format = "csv";
};

/// Throws Error(ConfigError) on any schema violation.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);
nlohmann::json to_json(const ProfileConfig& c);
ProfileConfig profile_config_from_json(const nlohmann::json& j);

const std::vector<std::string>& command_names();

inline constexpr const char* kOutDirEnv = "SHEARLAB_OUT_DIR";

/// --out beats the environment variable, which beats the config file.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const RunConfig& c);

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Machine-readable failure record. Printed as one line on stderr and, when
/// the output directory is writable, saved as diagnostic.json.
nlohmann::json make_diagnostic(const std::string& command, int exit_code, const std::string& error,
                               const std::string& message);
void emit_diagnostic(const nlohmann::json& d, const std::filesystem::path* out_dir, std::ostream& err);

/// Runs one command. Artifacts go to `out_dir`, progress lines to `log`,
/// diagnostics to `err`. Returns the process exit code.
int run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log, std::ostream& err);

} // namespace shear
