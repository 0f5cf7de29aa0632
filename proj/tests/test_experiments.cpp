#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fas/asymptotics.hpp"
#include "fas/errors.hpp"
#include "fas/experiments.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("fas_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string error_of(std::string_view text)
{
    try {
        fas::parse_config(text);
    } catch (const fas::ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal fig2 config expands to the full sweep")
{
    const auto scenario = fas::parse_config("scenario: fig2\n");
    CHECK(scenario.name == "fig2");
    REQUIRE(scenario.configs.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& cfg = scenario.configs[i];
        CHECK(cfg.aperture.num_ports == int(i) + 1);
        CHECK(cfg.aperture.aperture_width == 1.0);
        CHECK(cfg.spec.scheme == fas::Scheme::BPSK);
        CHECK(cfg.trials == 1'000'000);
        CHECK(cfg.master_seed == 42);
        CHECK(cfg.estimator == fas::Estimator::Conditional);
        CHECK(cfg.snr_grid_db == std::vector<double>{0, 5, 10, 15, 20, 25, 30, 35, 40});
    }
    CHECK(scenario.out_dir == "results");
}

TEST_CASE("fig3 and fig4 sweeps")
{
    const auto fig3 = fas::make_scenario("fig3");
    REQUIRE(fig3.configs.size() == 3);
    CHECK(fig3.configs[0].aperture.num_ports == 3);
    CHECK(fig3.configs[1].aperture.num_ports == 6);
    CHECK(fig3.configs[2].aperture.num_ports == 11);

    const auto fig4 = fas::make_scenario("fig4");
    REQUIRE(fig4.configs.size() == 9);
    std::vector<std::string> labels;
    for (const auto& cfg : fig4.configs) {
        CHECK(cfg.aperture.num_ports == 3);
        CHECK(cfg.aperture.aperture_width == 1.0);
        labels.push_back(cfg.spec.label());
    }
    CHECK(labels == std::vector<std::string>{"4psk", "8psk", "16psk", "4qam", "16qam", "64qam", "2pam", "4pam", "8pam"});

    const auto psk_only = fas::parse_config("scenario: fig4\nscheme: psk\norder: [4, 8]\n");
    REQUIRE(psk_only.configs.size() == 2);
    CHECK(psk_only.configs[1].spec.label() == "8psk");
}

TEST_CASE("custom config is echoed back")
{
    const auto scenario = fas::parse_config(
        "scenario: custom\nn_ports: 4\naperture_width: 2\nscheme: qam\norder: 16\n"
        "snr_start_db: 10\nsnr_stop_db: 20\nsnr_step_db: 2.5\ntrials: 5000\nseed: 7\n"
        "estimator: semi_analytic\nout_dir: /tmp/somewhere\n");
    CHECK(scenario.name == "custom");
    REQUIRE(scenario.configs.size() == 1);
    const auto& cfg = scenario.configs[0];
    CHECK(cfg.aperture.num_ports == 4);
    CHECK(cfg.aperture.aperture_width == 2.0);
    CHECK(cfg.spec.scheme == fas::Scheme::MQAM);
    CHECK(cfg.spec.order == 16);
    CHECK(cfg.snr_grid_db == std::vector<double>{10.0, 12.5, 15.0, 17.5, 20.0});
    CHECK(cfg.trials == 5000);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.estimator == fas::Estimator::SemiAnalytic);
    CHECK(scenario.out_dir == "/tmp/somewhere");
    CHECK(fas::describe(cfg) ==
          "N=4 W=2 scheme=qam M=16 snr_db=[10..20] trials=5000 seed=7 estimator=semi_analytic");

    const auto sweep = fas::parse_config("scenario: custom\nn_ports: [2, 3]\naperture_width: [0.5, 1]\nscheme: bpsk\n");
    CHECK(sweep.configs.size() == 4);
}

TEST_CASE("config validation errors")
{
    CHECK(error_of("scenario: fig2\nsnr_step_db: 0\n").find("snr_step_db") != std::string::npos);
    CHECK(error_of("scenario: fig2\nsnr_start_db: 30\nsnr_stop_db: 10\n").find("snr_stop_db") != std::string::npos);
    CHECK(error_of("scenario: fig2\ncolour: blue\n") == "unknown key 'colour'");
    CHECK(error_of("scenario: custom\nn_ports: 2\naperture_width: 1\nscheme: qam\norder: 8\n").find("square") !=
          std::string::npos);
    CHECK(error_of("scenario: fig2\nn_ports: 3\n").find("fixed by scenario") != std::string::npos);
    CHECK(error_of("scenario: fig9\n").find("unknown scenario") != std::string::npos);
    CHECK(error_of("n_ports: 3\n").find("scenario") != std::string::npos);
    CHECK(error_of("scenario: custom\nn_ports: 2\nscheme: bpsk\n").find("aperture_width") != std::string::npos);
    CHECK(error_of("scenario: custom\nn_ports: 2\naperture_width: 1\nscheme: psk\n").find("order") != std::string::npos);
    CHECK(error_of("scenario: custom\nn_ports: 0\naperture_width: 1\nscheme: bpsk\n").find("n_ports") != std::string::npos);
    CHECK(error_of("scenario: fig2\ntrials: 0\n").find("trials") != std::string::npos);
    CHECK(error_of("scenario: fig2\ntrials: lots\n").find("trials") != std::string::npos);
    CHECK(error_of("scenario: fig2\nestimator: guess\n").find("estimator") != std::string::npos);
    CHECK(error_of("- a\n- b\n").find("mapping") != std::string::npos);
    CHECK(error_of("scenario: [fig2\n").find("malformed") != std::string::npos);
}

TEST_CASE("fig2 run writes 45 reproducible rows")
{
    fas::ScenarioOptions options;
    options.trials = 3000;
    options.out_dir = scratch_dir("fig2");
    const auto scenario = fas::make_scenario("fig2", options);
    std::ostringstream log;
    const auto first = fas::run_scenario(scenario, log);
    REQUIRE(first.exit_code == fas::kExitOk);
    CHECK(first.rows.size() == 45);
    const std::string csv = slurp(first.csv_path);
    CHECK(csv.substr(0, csv.find('\n')) == fas::kCsvHeader);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 46);

    const auto second = fas::run_scenario(scenario, log);
    CHECK(slurp(second.csv_path) == csv);

    const YAML::Node manifest = YAML::LoadFile(first.manifest_path.string());
    CHECK(manifest["seed"].as<std::uint64_t>() == 42);
    CHECK(manifest["trials"].as<std::uint64_t>() == 3000);
    CHECK(manifest["toolkit_version"].as<std::string>() == std::string(fas::toolkit_version()));
    CHECK(manifest["wall_time_seconds"].as<double>() >= 0.0);

    const std::string plot = slurp(first.plot_path);
    std::istringstream lines(plot);
    std::string header;
    std::getline(lines, header);
    std::istringstream header_fields(header);
    std::vector<std::string> columns;
    for (std::string col; header_fields >> col;)
        columns.push_back(col);
    CHECK(columns.size() == 1 + 1 + 2 * 5);  // '#', snr_db, mc/asym per curve
    CHECK(columns[2] == "mc_N1_W1_2bpsk");
    CHECK(columns[3] == "asym_N1_W1_2bpsk");
    int data_lines = 0;
    for (std::string line; std::getline(lines, line);) {
        std::istringstream fields(line);
        int count = 0;
        for (double v; fields >> v;)
            ++count;
        CHECK(count == 11);
        ++data_lines;
    }
    CHECK(data_lines == 9);
}

TEST_CASE("CSV round trip")
{
    fas::ScenarioOptions options;
    options.trials = 2000;
    options.seed = 123456789012345ull;
    const auto rows = fas::compute_rows(fas::make_scenario("fig4", options));
    CHECK(rows.size() == 81);
    CHECK(fas::parse_csv(fas::format_csv(rows)) == rows);
    CHECK_THROWS_AS(fas::parse_csv("bad,header\n"), fas::ConfigError);
}

TEST_CASE("asymptotic columns are exact power laws")
{
    fas::ScenarioOptions options;
    options.trials = 1000;
    for (const auto* name : {"fig2", "fig3", "fig4"}) {
        const auto scenario = fas::make_scenario(name, options);
        const auto rows = fas::compute_rows(scenario);
        const std::size_t points = scenario.configs.front().snr_grid_db.size();
        std::vector<double> slopes;
        for (std::size_t c = 0; c < scenario.configs.size(); ++c) {
            for (std::size_t start = 0; start + 2 < points; start += 3) {
                std::vector<std::pair<double, double>> pts;
                for (std::size_t s = start; s < start + 3; ++s)
                    pts.emplace_back(rows[c * points + s].snr_db, rows[c * points + s].asymptotic_ser);
                const double slope = fas::fit_slope(pts);
                CHECK(std::abs(slope - rows[c * points].diversity_gain) <= 1e-9);
                slopes.push_back(slope);
            }
        }
        if (std::string(name) == "fig4")
            for (double s : slopes)
                CHECK(std::abs(s - slopes.front()) <= 1e-9);
    }
}

TEST_CASE("fig3 shows diminishing returns at 25 dB")
{
    fas::ScenarioOptions options;
    options.trials = 200'000;
    options.snr_start_db = 25.0;
    options.snr_stop_db = 25.0;
    const auto rows = fas::compute_rows(fas::make_scenario("fig3", options));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].mc_ser < rows[0].mc_ser);
    CHECK(rows[2].mc_ser < rows[1].mc_ser);
    CHECK(rows[1].mc_ser - rows[2].mc_ser < rows[0].mc_ser - rows[1].mc_ser);
}

TEST_CASE("run_scenario error codes")
{
    std::ostringstream log;
    SUBCASE("unwritable output directory")
    {
        const fs::path dir = scratch_dir("blocked");
        fs::create_directories(dir);
        std::ofstream(dir / "file") << "x";
        fas::ScenarioOptions options;
        options.trials = 10;
        options.out_dir = dir / "file" / "sub";
        CHECK(fas::run_scenario(fas::make_scenario("fig2", options), log).exit_code == fas::kExitIo);
    }
    SUBCASE("numeric failure echoes the config")
    {
        // Q underflows for a plain average far beyond the usable SNR range.
        auto scenario = fas::parse_config(
            "scenario: custom\nn_ports: 5\naperture_width: 1\nscheme: bpsk\n"
            "snr_start_db: 400\nsnr_stop_db: 400\ntrials: 100\nestimator: semi_analytic\n");
        scenario.out_dir = scratch_dir("numeric");
        CHECK(fas::run_scenario(scenario, log).exit_code == fas::kExitNumeric);
        CHECK(log.str().find("N=5 W=1 scheme=bpsk") != std::string::npos);
    }
}

TEST_CASE("snr grid")
{
    CHECK(fas::snr_grid(0, 40, 5).size() == 9);
    CHECK(fas::snr_grid(0, 1, 0.1).size() == 11);
    CHECK(fas::snr_grid(3, 3, 1) == std::vector<double>{3.0});
    CHECK_THROWS_AS(fas::snr_grid(0, 10, 0), fas::ConfigError);
    CHECK_THROWS_AS(fas::snr_grid(0, 10, -1), fas::ConfigError);
}
