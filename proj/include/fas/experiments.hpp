#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fas/monte_carlo.hpp"

namespace fas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;

std::string_view toolkit_version() noexcept;

/// A named sweep of simulation configs sharing grid, trials and seed.
struct ExperimentScenario {
    std::string name;  // fig2 | fig3 | fig4 | custom
    std::vector<SimulationConfig> configs;
    std::filesystem::path out_dir = "results";
};

/// Settings that apply on top of a scenario's own sweep. Unset fields take
/// the defaults: trials 1e6, seed 42, grid 0..40 dB step 5, conditional
/// estimator.
struct ScenarioOptions {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<Estimator> estimator;
    std::optional<double> snr_start_db;
    std::optional<double> snr_stop_db;
    std::optional<double> snr_step_db;
    std::optional<std::filesystem::path> out_dir;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Build one of the fixed scenarios (fig2, fig3, fig4).
ExperimentScenario make_scenario(std::string_view name, const ScenarioOptions& options = {});

/// Parse and validate YAML config text. Throws ConfigError naming the
/// offending key or rule.
ExperimentScenario parse_config(std::string_view text, unsigned workers = 0);
ExperimentScenario parse_config_file(const std::filesystem::path& path, unsigned workers = 0);

/// One-line description of a config, used when echoing failures.
std::string describe(const SimulationConfig& cfg);

std::vector<double> snr_grid(double start_db, double stop_db, double step_db);

struct ResultRow {
    std::string scenario;
    int n_ports = 0;
    double aperture_width = 0.0;
    std::string scheme;
    int order = 0;
    double snr_db = 0.0;
    double mc_ser = 0.0;
    double mc_stderr = 0.0;
    double asymptotic_ser = 0.0;
    int diversity_gain = 0;
    double coding_gain = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,N,W,scheme,M,snr_db,mc_ser,mc_stderr,asymptotic_ser,diversity_gain,coding_gain,trials,seed";

/// Simulate and predict every config; throws on numeric failure.
std::vector<ResultRow> compute_rows(const ExperimentScenario& scenario);
std::vector<ResultRow> compute_rows(const std::string& scenario_name, const SimulationConfig& cfg);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);

/// Columnar text: snr_db, then mc_<curve> and asym_<curve> per config.
std::string format_plot_data(const ExperimentScenario& scenario, const std::vector<ResultRow>& rows);

struct RunOutcome {
    int exit_code = kExitOk;
    std::filesystem::path csv_path;
    std::filesystem::path plot_path;
    std::filesystem::path manifest_path;
    std::vector<ResultRow> rows;
};

/// Run and write <name>.csv, <name>_plot.dat and <name>_manifest.yaml under
/// out_dir. Diagnostics go to `log`.
RunOutcome run_scenario(const ExperimentScenario& scenario, std::ostream& log);

} // namespace fas
