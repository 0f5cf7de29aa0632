#include "fas/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fas/asymptotics.hpp"
#include "fas/errors.hpp"

#ifndef FAS_VERSION
#define FAS_VERSION "0.0.0"
#endif

namespace fas {

namespace {

constexpr std::uint64_t kDefaultTrials = 1'000'000;
constexpr std::uint64_t kDefaultSeed = 42;
constexpr double kDefaultSnrStart = 0.0;
constexpr double kDefaultSnrStop = 40.0;
constexpr double kDefaultSnrStep = 5.0;

const std::set<std::string> kConfigKeys = {
    "scenario", "n_ports", "aperture_width", "scheme", "order", "snr_start_db",
    "snr_stop_db", "snr_step_db", "trials", "seed", "estimator", "out_dir"};

struct CurveSpec {
    int n_ports;
    double width;
    ModulationSpec modulation;
};

SimulationConfig make_config(const CurveSpec& curve, const ScenarioOptions& options)
{
    SimulationConfig cfg;
    cfg.aperture.num_ports = curve.n_ports;
    cfg.aperture.aperture_width = curve.width;
    cfg.spec = curve.modulation;
    cfg.snr_grid_db = snr_grid(options.snr_start_db.value_or(kDefaultSnrStart),
                               options.snr_stop_db.value_or(kDefaultSnrStop),
                               options.snr_step_db.value_or(kDefaultSnrStep));
    cfg.trials = options.trials.value_or(kDefaultTrials);
    cfg.master_seed = options.seed.value_or(kDefaultSeed);
    cfg.estimator = options.estimator.value_or(Estimator::Conditional);
    cfg.workers = options.workers == 0 ? default_workers() : options.workers;
    cfg.validate();
    return cfg;
}

ExperimentScenario assemble(std::string name, const std::vector<CurveSpec>& curves,
                            const ScenarioOptions& options)
{
    ExperimentScenario scenario;
    scenario.name = std::move(name);
    scenario.out_dir = options.out_dir.value_or("results");
    for (const auto& curve : curves)
        scenario.configs.push_back(make_config(curve, options));
    return scenario;
}

std::vector<CurveSpec> bpsk_ladder(std::initializer_list<int> ports, double width)
{
    std::vector<CurveSpec> curves;
    for (int n : ports)
        curves.push_back({n, width, params_of(Scheme::BPSK, 2)});
    return curves;
}

std::vector<int> default_orders(Scheme scheme)
{
    switch (scheme) {
    case Scheme::MPSK: return {4, 8, 16};
    case Scheme::MQAM: return {4, 16, 64};
    case Scheme::MPAM: return {2, 4, 8};
    case Scheme::BPSK: return {2};
    }
    return {};
}

std::string format_number(double value)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

template <typename T>
std::vector<T> scalar_or_list(const YAML::Node& node, const std::string& key)
{
    try {
        if (node.IsSequence()) {
            if (node.size() == 0)
                throw ConfigError("key '" + key + "' has an empty list");
            return node.as<std::vector<T>>();
        }
        return {node.as<T>()};
    } catch (const YAML::Exception&) {
        throw ConfigError("key '" + key + "' has an invalid value");
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key)
{
    if (!node.IsScalar())
        throw ConfigError("key '" + key + "' must be a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("key '" + key + "' has an invalid value '" + node.Scalar() + "'");
    }
}

ModulationSpec checked_params(Scheme scheme, int order)
{
    try {
        return params_of(scheme, order);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid modulation: ") + e.what());
    }
}

Scheme checked_scheme(const std::string& name)
{
    try {
        return parse_scheme(name);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::string curve_label(const SimulationConfig& cfg)
{
    return "N" + std::to_string(cfg.aperture.num_ports) + "_W" + format_number(cfg.aperture.aperture_width) +
           "_" + cfg.spec.label();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

bool write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        return false;
    out << content;
    out.close();
    return bool(out);
}

} // namespace

std::string_view toolkit_version() noexcept { return FAS_VERSION; }

std::vector<double> snr_grid(double start_db, double stop_db, double step_db)
{
    if (!std::isfinite(start_db) || !std::isfinite(stop_db) || !std::isfinite(step_db))
        throw ConfigError("SNR grid bounds must be finite");
    if (!(step_db > 0.0))
        throw ConfigError("snr_step_db must be > 0");
    if (stop_db < start_db)
        throw ConfigError("snr_stop_db must be >= snr_start_db");
    const auto steps = std::int64_t(std::floor((stop_db - start_db) / step_db + 1e-9));
    if (steps > 10'000)
        throw ConfigError("SNR grid has more than 10000 points");
    std::vector<double> grid;
    for (std::int64_t i = 0; i <= steps; ++i)
        grid.push_back(start_db + double(i) * step_db);
    return grid;
}

ExperimentScenario make_scenario(std::string_view name, const ScenarioOptions& options)
{
    if (name == "fig2")
        return assemble("fig2", bpsk_ladder({1, 2, 3, 4, 5}, 1.0), options);
    if (name == "fig3")
        return assemble("fig3", bpsk_ladder({3, 6, 11}, 1.0), options);
    if (name == "fig4") {
        std::vector<CurveSpec> curves;
        for (Scheme scheme : {Scheme::MPSK, Scheme::MQAM, Scheme::MPAM})
            for (int order : default_orders(scheme))
                curves.push_back({3, 1.0, params_of(scheme, order)});
        return assemble("fig4", curves, options);
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "' (expected fig2, fig3, fig4 or custom)");
}

ExperimentScenario parse_config(std::string_view text, unsigned workers)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.IsMap())
        throw ConfigError("config must be a mapping of keys to values");

    for (const auto& entry : root) {
        const auto key = entry.first.as<std::string>();
        if (!kConfigKeys.contains(key))
            throw ConfigError("unknown key '" + key + "'");
    }
    if (!root["scenario"])
        throw ConfigError("missing required key 'scenario'");
    const auto name = scalar<std::string>(root["scenario"], "scenario");

    ScenarioOptions options;
    options.workers = workers;
    if (root["trials"]) {
        const auto trials = scalar<std::int64_t>(root["trials"], "trials");
        if (trials < 1)
            throw ConfigError("trials must be >= 1");
        options.trials = std::uint64_t(trials);
    }
    if (root["seed"])
        options.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (root["estimator"])
        options.estimator = parse_estimator(scalar<std::string>(root["estimator"], "estimator"));
    if (root["snr_start_db"])
        options.snr_start_db = scalar<double>(root["snr_start_db"], "snr_start_db");
    if (root["snr_stop_db"])
        options.snr_stop_db = scalar<double>(root["snr_stop_db"], "snr_stop_db");
    if (root["snr_step_db"])
        options.snr_step_db = scalar<double>(root["snr_step_db"], "snr_step_db");
    if (root["out_dir"])
        options.out_dir = scalar<std::string>(root["out_dir"], "out_dir");

    if (name == "fig2" || name == "fig3") {
        for (const char* key : {"n_ports", "aperture_width", "scheme", "order"})
            if (root[key])
                throw ConfigError("key '" + std::string(key) + "' is fixed by scenario " + name);
        return make_scenario(name, options);
    }

    if (name == "fig4") {
        for (const char* key : {"n_ports", "aperture_width"})
            if (root[key])
                throw ConfigError("key '" + std::string(key) + "' is fixed by scenario fig4");
        std::vector<Scheme> schemes = {Scheme::MPSK, Scheme::MQAM, Scheme::MPAM};
        if (root["scheme"]) {
            schemes.clear();
            for (const auto& s : scalar_or_list<std::string>(root["scheme"], "scheme"))
                schemes.push_back(checked_scheme(s));
        }
        if (root["order"] && schemes.size() != 1)
            throw ConfigError("key 'order' in fig4 requires exactly one 'scheme'");
        std::vector<CurveSpec> curves;
        for (Scheme scheme : schemes) {
            const auto orders = root["order"] ? scalar_or_list<int>(root["order"], "order") : default_orders(scheme);
            for (int order : orders)
                curves.push_back({3, 1.0, checked_params(scheme, order)});
        }
        return assemble("fig4", curves, options);
    }

    if (name != "custom")
        throw ConfigError("unknown scenario '" + name + "' (expected fig2, fig3, fig4 or custom)");

    for (const char* key : {"n_ports", "aperture_width", "scheme"})
        if (!root[key])
            throw ConfigError("scenario custom requires key '" + std::string(key) + "'");
    const auto ports = scalar_or_list<int>(root["n_ports"], "n_ports");
    const auto widths = scalar_or_list<double>(root["aperture_width"], "aperture_width");
    const auto scheme_names = scalar_or_list<std::string>(root["scheme"], "scheme");
    std::vector<CurveSpec> curves;
    for (const auto& scheme_name : scheme_names) {
        const Scheme scheme = checked_scheme(scheme_name);
        std::vector<int> orders;
        if (root["order"])
            orders = scalar_or_list<int>(root["order"], "order");
        else if (scheme == Scheme::BPSK)
            orders = {2};
        else
            throw ConfigError("scheme '" + scheme_name + "' requires key 'order'");
        for (int n : ports) {
            if (n < 1)
                throw ConfigError("n_ports must be >= 1");
            for (double w : widths) {
                if (!(w >= 0.0) || !std::isfinite(w))
                    throw ConfigError("aperture_width must be finite and >= 0");
                for (int order : orders)
                    curves.push_back({n, w, checked_params(scheme, order)});
            }
        }
    }
    return assemble("custom", curves, options);
}

ExperimentScenario parse_config_file(const std::filesystem::path& path, unsigned workers)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::filesystem::filesystem_error("cannot read config", path,
                                                std::make_error_code(std::errc::no_such_file_or_directory));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), workers);
}

std::string describe(const SimulationConfig& cfg)
{
    std::ostringstream out;
    out << "N=" << cfg.aperture.num_ports << " W=" << format_number(cfg.aperture.aperture_width)
        << " scheme=" << scheme_name(cfg.spec.scheme) << " M=" << cfg.spec.order << " snr_db=["
        << format_number(cfg.snr_grid_db.front()) << ".." << format_number(cfg.snr_grid_db.back())
        << "] trials=" << cfg.trials << " seed=" << cfg.master_seed
        << " estimator=" << estimator_name(cfg.estimator);
    return out.str();
}

std::vector<ResultRow> compute_rows(const std::string& scenario_name, const SimulationConfig& cfg)
{
    const CorrelationModel model = build_jakes_model(cfg.aperture, cfg.rank_threshold);
    const std::vector<SerEstimate> estimates = estimate_ser(cfg);
    const int gd = diversity_gain(model);
    const double gc = coding_gain(model, cfg.spec);
    std::vector<ResultRow> rows;
    for (const auto& estimate : estimates) {
        ResultRow row;
        row.scenario = scenario_name;
        row.n_ports = cfg.aperture.num_ports;
        row.aperture_width = cfg.aperture.aperture_width;
        row.scheme = std::string(scheme_name(cfg.spec.scheme));
        row.order = cfg.spec.order;
        row.snr_db = estimate.snr_db;
        row.mc_ser = estimate.ser_mean;
        row.mc_stderr = estimate.ser_stderr;
        row.asymptotic_ser = asymptotic_ser(db_to_linear(estimate.snr_db), cfg.spec, model,
                                            cfg.aperture.mean_powers);
        row.diversity_gain = gd;
        row.coding_gain = gc;
        row.trials = estimate.trials;
        row.seed = cfg.master_seed;

        // Symbol counting can legitimately see zero errors.
        const bool mc_ok = std::isfinite(row.mc_ser) && std::isfinite(row.mc_stderr) &&
                           (cfg.estimator == Estimator::SymbolLevel ? row.mc_ser >= 0.0 : row.mc_ser > 0.0);
        if (!mc_ok || !std::isfinite(row.asymptotic_ser) || !(row.asymptotic_ser > 0.0) ||
            !std::isfinite(row.coding_gain))
            throw ModelError("non-finite or nonpositive SER at " + format_number(row.snr_db) + " dB");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> compute_rows(const ExperimentScenario& scenario)
{
    std::vector<ResultRow> rows;
    for (const auto& cfg : scenario.configs) {
        auto part = compute_rows(scenario.name, cfg);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::string format_csv(const std::vector<ResultRow>& rows)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += r.scenario + ',' + std::to_string(r.n_ports) + ',' + format_number(r.aperture_width) + ',' +
               r.scheme + ',' + std::to_string(r.order) + ',' + format_number(r.snr_db) + ',' +
               format_number(r.mc_ser) + ',' + format_number(r.mc_stderr) + ',' +
               format_number(r.asymptotic_ser) + ',' + std::to_string(r.diversity_gain) + ',' +
               format_number(r.coding_gain) + ',' + std::to_string(r.trials) + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

std::vector<ResultRow> parse_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ConfigError("CSV header mismatch");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() != 13)
            throw ConfigError("CSV row has " + std::to_string(fields.size()) + " fields: " + line);
        ResultRow r;
        r.scenario = fields[0];
        r.n_ports = std::stoi(fields[1]);
        r.aperture_width = std::stod(fields[2]);
        r.scheme = fields[3];
        r.order = std::stoi(fields[4]);
        r.snr_db = std::stod(fields[5]);
        r.mc_ser = std::stod(fields[6]);
        r.mc_stderr = std::stod(fields[7]);
        r.asymptotic_ser = std::stod(fields[8]);
        r.diversity_gain = std::stoi(fields[9]);
        r.coding_gain = std::stod(fields[10]);
        r.trials = std::stoull(fields[11]);
        r.seed = std::stoull(fields[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_plot_data(const ExperimentScenario& scenario, const std::vector<ResultRow>& rows)
{
    std::string out = "# snr_db";
    for (const auto& cfg : scenario.configs) {
        const std::string label = curve_label(cfg);
        out += " mc_" + label + " asym_" + label;
    }
    out += '\n';
    if (scenario.configs.empty())
        return out;
    const std::size_t points = scenario.configs.front().snr_grid_db.size();
    for (std::size_t s = 0; s < points; ++s) {
        out += format_number(scenario.configs.front().snr_grid_db[s]);
        for (std::size_t c = 0; c < scenario.configs.size(); ++c) {
            const ResultRow& row = rows.at(c * points + s);
            out += ' ' + format_number(row.mc_ser) + ' ' + format_number(row.asymptotic_ser);
        }
        out += '\n';
    }
    return out;
}

RunOutcome run_scenario(const ExperimentScenario& scenario, std::ostream& log)
{
    RunOutcome outcome;
    const auto started = std::chrono::steady_clock::now();

    std::error_code ec;
    std::filesystem::create_directories(scenario.out_dir, ec);
    if (ec || !std::filesystem::is_directory(scenario.out_dir)) {
        log << "error: cannot create output directory " << scenario.out_dir << ": " << ec.message() << '\n';
        outcome.exit_code = kExitIo;
        return outcome;
    }
    outcome.csv_path = scenario.out_dir / (scenario.name + ".csv");
    outcome.plot_path = scenario.out_dir / (scenario.name + "_plot.dat");
    outcome.manifest_path = scenario.out_dir / (scenario.name + "_manifest.yaml");

    for (const auto& cfg : scenario.configs) {
        try {
            auto part = compute_rows(scenario.name, cfg);
            outcome.rows.insert(outcome.rows.end(), part.begin(), part.end());
        } catch (const std::exception& e) {
            log << "error: numeric failure in config [" << describe(cfg) << "]: " << e.what() << '\n';
            outcome.exit_code = kExitNumeric;
            return outcome;
        }
    }

    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    YAML::Emitter manifest;
    manifest << YAML::BeginMap;
    manifest << YAML::Key << "scenario" << YAML::Value << scenario.name;
    manifest << YAML::Key << "toolkit_version" << YAML::Value << std::string(toolkit_version());
    if (!scenario.configs.empty()) {
        const auto& first = scenario.configs.front();
        manifest << YAML::Key << "seed" << YAML::Value << first.master_seed;
        manifest << YAML::Key << "trials" << YAML::Value << first.trials;
        manifest << YAML::Key << "estimator" << YAML::Value << std::string(estimator_name(first.estimator));
        manifest << YAML::Key << "workers" << YAML::Value << first.workers;
        manifest << YAML::Key << "snr_db" << YAML::Value << YAML::Flow << first.snr_grid_db;
    }
    manifest << YAML::Key << "configs" << YAML::Value << YAML::BeginSeq;
    for (const auto& cfg : scenario.configs)
        manifest << describe(cfg);
    manifest << YAML::EndSeq;
    manifest << YAML::Key << "wall_time_seconds" << YAML::Value << wall_seconds;
    manifest << YAML::Key << "finished_utc" << YAML::Value << utc_timestamp();
    manifest << YAML::EndMap;

    if (!write_file(outcome.csv_path, format_csv(outcome.rows)) ||
        !write_file(outcome.plot_path, format_plot_data(scenario, outcome.rows)) ||
        !write_file(outcome.manifest_path, std::string(manifest.c_str()) + "\n")) {
        log << "error: cannot write results under " << scenario.out_dir << '\n';
        outcome.exit_code = kExitIo;
        return outcome;
    }
    log << "wrote " << outcome.rows.size() << " rows to " << outcome.csv_path.string() << '\n';
    return outcome;
}

} // namespace fas
