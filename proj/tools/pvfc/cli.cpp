#include "pvfc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pvfc/config.hpp"
#include "pvfc/errors.hpp"
#include "pvfc/model_io.hpp"
#include "pvfc/pipeline.hpp"
#include "pvfc/plot.hpp"
#include "pvfc/report.hpp"

namespace pvfc::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config = "default";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string leads;
    std::optional<std::size_t> plants;
    std::string format = "text";
    std::string weather;
    std::string fleet;
    std::string production;
    std::string models;
    std::string report;
    std::string figure = "all";
};

std::uint64_t require_seed(const Options& o) {
    if (!o.seed) {
        throw ValidationError("--seed is required: every run must name its seed explicitly");
    }
    return *o.seed;
}

ExperimentConfig resolve(const Options& o, bool needs_seed) {
    ExperimentConfig cfg = load_config(o.config);
    if (needs_seed) {
        cfg.apply_seed(require_seed(o));
    } else if (o.seed) {
        cfg.apply_seed(*o.seed);
    }
    if (!o.leads.empty()) {
        cfg.leads = parse_leads(o.leads);
    }
    if (o.plants) {
        cfg.max_plants = *o.plants;
    }
    cfg.validate();
    return cfg;
}

fs::path require_dir(const std::string& value, const char* flag) {
    if (value.empty()) {
        throw ValidationError(fmt::format("{} is required", flag));
    }
    return fs::path(value);
}

void write_config_echo(const fs::path& dir, const ExperimentConfig& cfg, const std::string& command) {
    write_text(dir / "config_echo",
               fmt::format("# pvfc {}; derived seeds: weather={} forecast={} fleet={} cv={}\n{}", command,
                           cfg.weather.seed, cfg.forecast.seed, cfg.fleet_seed, cfg.cv.seed, render_config(cfg)));
}

Fleet load_fleet_subset(const Options& o, const ExperimentConfig& cfg) {
    Fleet fleet = load_fleet(require_dir(o.fleet, "--fleet"));
    if (cfg.max_plants > 0 && cfg.max_plants < fleet.plants.size()) {
        fleet = fleet.subset(cfg.max_plants);
    }
    std::sort(fleet.plants.begin(), fleet.plants.end(), [](const Plant& a, const Plant& b) { return a.id < b.id; });
    return fleet;
}

int cmd_generate_weather(const Options& o) {
    const ExperimentConfig cfg = resolve(o, true);
    const fs::path out = require_dir(o.out, "--out");
    const WeatherBundle w = generate_weather(cfg, cfg.leads);
    store_weather(w, out, cfg);
    return kSuccess;
}

int cmd_generate_fleet(const Options& o) {
    ExperimentConfig cfg = resolve(o, true);
    const fs::path out = require_dir(o.out, "--out");
    Fleet fleet = build_default_fleet(cfg.fleet_seed);
    if (cfg.max_plants > 0 && cfg.max_plants < fleet.plants.size()) {
        fleet = fleet.subset(cfg.max_plants);
    }
    fs::create_directories(out);
    store_fleet(fleet, out / "fleet.txt");
    if (!o.weather.empty()) {
        const WeatherBundle w = load_weather(o.weather, {});
        for (const Plant& p : fleet.plants) {
            const SiteWeather obs = site_weather(w, p, 0);
            const ProductionSeries series =
                simulate_plant_record(p, obs, cfg.production_seed(p.id), cfg.production);
            store_production(series, out / "production" / (p.id + ".txt"));
        }
    }
    write_config_echo(out, cfg, "generate-fleet");
    return kSuccess;
}

ProductionSeries load_plant_production(const Options& o, const Plant& p) {
    return load_production(require_dir(o.production, "--production") / (p.id + ".txt"));
}

int cmd_calibrate(const Options& o) {
    const ExperimentConfig cfg = resolve(o, true);
    const fs::path out = require_dir(o.out, "--out");
    const Fleet fleet = load_fleet_subset(o, cfg);
    const WeatherBundle w = load_weather(require_dir(o.weather, "--weather"), {});
    std::vector<ProductionSeries> production;
    for (const Plant& p : fleet.plants) {
        production.push_back(load_plant_production(o, p));
    }
    CalibrationSettings settings;
    settings.grid = cfg.grid;
    settings.cv = cfg.cv;
    settings.solver = cfg.solver();
    settings.floor_fraction = cfg.floor_fraction;
    std::vector<PlantResult> results(fleet.plants.size());
    for (std::size_t k = 0; k < fleet.plants.size(); ++k) {
        results[k].plant = fleet.plants[k];
        results[k].production = production[k];
        results[k].calibration =
            calibrate_plant(fleet.plants[k], site_weather(w, fleet.plants[k], 0), production[k], settings);
    }
    for (const PlantResult& r : results) {
        store_svr_model(r.calibration.svr, out / "models" / (r.plant.id + ".svr"));
        store_linear_model(r.calibration.linear, out / "models" / (r.plant.id + ".linear"));
        write_text(out / "tables" / "grid_search" / (r.plant.id + ".csv"),
                   render_grid_search(r.calibration.grid_table));
    }
    write_text(out / "tables" / "plant_calibration.csv", render_calibration_table(results));
    write_config_echo(out, cfg, "calibrate");
    return kSuccess;
}

int cmd_forecast(const Options& o) {
    const ExperimentConfig cfg = resolve(o, false);
    const fs::path out = require_dir(o.out, "--out");
    const fs::path models = require_dir(o.models, "--models");
    const Fleet fleet = load_fleet_subset(o, cfg);
    const WeatherBundle w = load_weather(require_dir(o.weather, "--weather"), cfg.leads);
    std::vector<PlantResult> results(fleet.plants.size());
    for (std::size_t k = 0; k < fleet.plants.size(); ++k) {
        const Plant& p = fleet.plants[k];
        PlantResult& r = results[k];
        r.plant = p;
        r.production = load_plant_production(o, p);
        const SvrModel svr = load_svr_model(models / (p.id + ".svr"));
        const LinearModel linear = load_linear_model(models / (p.id + ".linear"));
        const SiteWeather obs = site_weather(w, p, 0);
        std::map<int, SiteWeather> inputs;
        for (int lead : cfg.leads) {
            inputs.emplace(lead, site_weather(w, p, lead));
        }
        const double floor = production_floor(r.production, cfg.floor_fraction);
        r.forecasts = forecast_plant(svr, linear, inputs, r.production, cfg.leads, floor);
        for (int lead : cfg.leads) {
            r.input_errors.push_back(input_error(obs, inputs.at(lead), r.production));
        }
    }
    write_text(out / "tables" / "plant_forecast.csv", render_forecast_table(results));
    write_config_echo(out, cfg, "forecast");
    return kSuccess;
}

int cmd_run_experiment(const Options& o) {
    const ExperimentConfig cfg = resolve(o, true);
    const fs::path out = require_dir(o.out, "--out");
    ReportFormat format = ReportFormat::text;
    if (o.format == "structured") {
        format = ReportFormat::structured;
    } else if (o.format != "text") {
        throw ValidationError(fmt::format("--format must be text or structured, got '{}'", o.format));
    }
    const ExperimentReport report = run_experiment(cfg);
    write_report(report, out, format);
    return kSuccess;
}

int cmd_verify_weather(const Options& o, std::ostream& out) {
    const bool from_files = !o.weather.empty();
    const ExperimentConfig cfg = resolve(o, !from_files);
    const WeatherBundle w = from_files ? load_weather(o.weather, cfg.leads) : generate_weather(cfg, cfg.leads);
    const auto skill = forecast_skill(w, cfg.leads);
    std::string table = "variable,lead,corr_mean,corr_q1,corr_median,corr_q3,target\n";
    for (const SkillRow& r : skill) {
        table += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(r.variable), r.lead, r.mean, r.q1,
                             r.median, r.q3, cfg.forecast.target_correlation(r.lead));
    }
    out << table;
    bool monotone = true;
    for (std::size_t k = 1; k < skill.size(); ++k) {
        if (skill[k].variable == Variable::ssr && skill[k - 1].variable == Variable::ssr &&
            !(skill[k].mean < skill[k - 1].mean)) {
            monotone = false;
        }
    }
    out << "ssr correlation decreasing with lead: " << (monotone ? "yes" : "no") << '\n';
    if (!o.out.empty()) {
        write_text(fs::path(o.out) / "verify_weather.csv", table);
    }
    return kSuccess;
}

int cmd_plot(const Options& o) {
    const fs::path report = require_dir(o.report, "--report");
    const fs::path out = o.out.empty() ? report / "plots" : fs::path(o.out);
    plot(report, o.figure, out);
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pvfc: photovoltaic production forecasting with SVR and linear models on gridded weather",
                 args.empty() ? "pvfc" : args.front()};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub, bool leads, bool plants) {
        sub->add_option("--config", o.config, "'default' or a key = value configuration file")
            ->capture_default_str();
        sub->add_option("--seed", o.seed, "global seed (u64); required wherever randomness is used");
        sub->add_option("--out", o.out, "output directory");
        if (leads) {
            sub->add_option("--leads", o.leads, "lead times, e.g. 1..10 or 1,5,10");
        }
        if (plants) {
            sub->add_option("--plants", o.plants, "use a deterministic subset of n plants alternating regions");
        }
    };

    auto* gen_weather = app.add_subcommand("generate-weather", "generate observed and forecast weather fields");
    add_common(gen_weather, true, false);

    auto* gen_fleet = app.add_subcommand("generate-fleet", "generate the plant fleet and, with --weather, production");
    add_common(gen_fleet, false, true);
    gen_fleet->add_option("--weather", o.weather, "weather directory written by generate-weather");

    auto* calibrate = app.add_subcommand("calibrate", "grid-search, cross-validate and fit models per plant");
    add_common(calibrate, false, true);
    calibrate->add_option("--weather", o.weather, "weather directory")->required();
    calibrate->add_option("--fleet", o.fleet, "fleet file")->required();
    calibrate->add_option("--production", o.production, "directory of <plant_id>.txt production files")->required();

    auto* forecast = app.add_subcommand("forecast", "apply calibrated models to forecast weather");
    add_common(forecast, true, true);
    forecast->add_option("--weather", o.weather, "weather directory")->required();
    forecast->add_option("--fleet", o.fleet, "fleet file")->required();
    forecast->add_option("--production", o.production, "directory of production files")->required();
    forecast->add_option("--models", o.models, "directory of <plant_id>.svr and .linear files")->required();

    auto* experiment = app.add_subcommand("run-experiment", "run the full experiment and write the report tree");
    add_common(experiment, true, true);
    experiment->add_option("--format", o.format, "text or structured (adds report.json)")->capture_default_str();

    auto* verify = app.add_subcommand("verify-weather", "print forecast spatial correlation per lead");
    add_common(verify, true, false);
    verify->add_option("--weather", o.weather, "weather directory; generated from --seed when omitted");

    auto* plot_cmd = app.add_subcommand("plot", "render SVG figures from a report's tables");
    plot_cmd->add_option("--report", o.report, "report directory")->required();
    plot_cmd->add_option("--figure", o.figure, "fig4, fig6, fig9, fig10, fig11, fig12 or all")->capture_default_str();
    plot_cmd->add_option("--out", o.out, "output directory (default <report>/plots)");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (gen_weather->parsed()) {
            return cmd_generate_weather(o);
        }
        if (gen_fleet->parsed()) {
            return cmd_generate_fleet(o);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(o);
        }
        if (forecast->parsed()) {
            return cmd_forecast(o);
        }
        if (experiment->parsed()) {
            return cmd_run_experiment(o);
        }
        if (verify->parsed()) {
            return cmd_verify_weather(o, out);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(o);
        }
    } catch (const MissingInput& e) {
        err << "error: missing input: " << e.path() << '\n';
        return kValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const MissingLead& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const LeadOutOfRange& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const DateMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kValidation;
}

} // namespace pvfc::cli
