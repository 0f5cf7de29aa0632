// fas: fluid antenna SER simulation and asymptotic prediction.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fas/asymptotics.hpp"
#include "fas/errors.hpp"
#include "fas/experiments.hpp"

namespace {

int run_predict(int n, double w, const std::string& scheme, int order, double snr_db)
{
    fas::ApertureConfig aperture{n, w, {}};
    const fas::ModulationSpec spec = fas::params_of(fas::parse_scheme(scheme), order);
    const fas::CorrelationModel model = fas::build_jakes_model(aperture);
    const double ser = fas::asymptotic_ser(fas::db_to_linear(snr_db), spec, model);
    std::printf("asymptotic_ser %.17g\n", ser);
    std::printf("diversity_gain %d\n", fas::diversity_gain(model));
    std::printf("coding_gain %.17g\n", fas::coding_gain(model, spec));
    return fas::kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fluid antenna system SER toolkit"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment scenario");
    std::string config_path;
    std::string scenario_name;
    std::string out_dir;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::string estimator;
    unsigned workers = 0;
    auto* config_opt = run->add_option("--config", config_path, "YAML experiment config");
    auto* scenario_opt = run->add_option("--scenario", scenario_name, "Fixed scenario: fig2, fig3 or fig4")
                             ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    config_opt->excludes(scenario_opt);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--trials", trials, "Monte Carlo trials per config")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--estimator", estimator, "semi_analytic, conditional or symbol_level")
        ->check(CLI::IsMember({"semi_analytic", "conditional", "symbol_level"}));
    run->add_option("--workers", workers, "Worker threads (default: all cores)");

    auto* predict = app.add_subcommand("predict", "Print the asymptotic SER, G_d and G_c");
    int n = 1;
    double w = 1.0;
    std::string scheme = "bpsk";
    int order = 2;
    double snr_db = 20.0;
    predict->add_option("--n", n, "Port count")->required()->check(CLI::PositiveNumber);
    predict->add_option("--w", w, "Normalized aperture width")->required()->check(CLI::NonNegativeNumber);
    predict->add_option("--scheme", scheme, "bpsk, psk, pam or qam")->required();
    predict->add_option("--order", order, "Modulation order")->required();
    predict->add_option("--snr-db", snr_db, "Average SNR in dB")->required();

    app.add_subcommand("version", "Print the toolkit version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? fas::kExitOk : fas::kExitUsage;
    }

    if (app.got_subcommand("version")) {
        std::cout << "fas " << fas::toolkit_version() << '\n';
        return fas::kExitOk;
    }

    if (app.got_subcommand("predict")) {
        try {
            return run_predict(n, w, scheme, order, snr_db);
        } catch (const fas::DomainError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return fas::kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return fas::kExitNumeric;
        }
    }

    if (config_path.empty() && scenario_name.empty()) {
        std::cerr << "error: run needs --config or --scenario\n";
        return fas::kExitUsage;
    }

    fas::ExperimentScenario scenario;
    try {
        if (!config_path.empty()) {
            scenario = fas::parse_config_file(config_path, workers);
        } else {
            fas::ScenarioOptions options;
            options.trials = trials;
            options.seed = seed;
            options.workers = workers;
            if (!out_dir.empty())
                options.out_dir = out_dir;
            if (!estimator.empty())
                options.estimator = fas::parse_estimator(estimator);
            scenario = fas::make_scenario(scenario_name, options);
        }
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fas::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fas::kExitUsage;
    }

    // Command-line flags override a config file.
    if (!config_path.empty()) {
        for (auto& cfg : scenario.configs) {
            if (trials)
                cfg.trials = *trials;
            if (seed)
                cfg.master_seed = *seed;
            if (!estimator.empty())
                cfg.estimator = fas::parse_estimator(estimator);
        }
        if (!out_dir.empty())
            scenario.out_dir = out_dir;
    }

    return fas::run_scenario(scenario, std::cerr).exit_code;
}
