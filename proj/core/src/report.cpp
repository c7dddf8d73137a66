#include "pvfc/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pvfc/errors.hpp"
#include "pvfc/grouping.hpp"
#include "pvfc/kde.hpp"
#include "pvfc/metrics.hpp"
#include "pvfc/model_io.hpp"
#include "text_table.hpp"

namespace pvfc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kDensityLeads[] = {1, 5, 10};
constexpr std::size_t kDensityPoints = 512;

struct Quartiles {
    double q1 = kNaN;
    double median = kNaN;
    double q3 = kNaN;
    std::size_t n = 0;
};

Quartiles quartiles(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    Quartiles q;
    q.n = v.size();
    if (!v.empty()) {
        q.q1 = quantile(v, 0.25);
        q.median = quantile(v, 0.5);
        q.q3 = quantile(v, 0.75);
    }
    return q;
}

void add_quartiles(Table& t, const std::string& group, const std::string& metric, const Quartiles& q) {
    t.push_back({group, metric + "_q1", q.q1, q.n});
    t.push_back({group, metric + "_median", q.median, q.n});
    t.push_back({group, metric + "_q3", q.q3, q.n});
}

std::string lead_group(std::optional<Region> region, int lead) {
    return fmt::format("region={};lead={}", region ? to_string(*region) : "all", lead);
}

const LeadForecast* find_lead(const PlantResult& p, int lead, const InputError** input = nullptr) {
    for (std::size_t k = 0; k < p.forecasts.size(); ++k) {
        if (p.forecasts[k].lead == lead) {
            if (input != nullptr) {
                *input = &p.input_errors[k];
            }
            return &p.forecasts[k];
        }
    }
    return nullptr;
}

std::string num(double v) {
    return fmt::format("{}", v);
}

std::string region_file_tag(Region r) {
    std::string s(to_string(r));
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

DensityTable densities(const std::vector<std::string>& names, const std::vector<std::vector<double>>& series) {
    DensityTable out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double h_max = 0.0;
    std::vector<double> bandwidths;
    for (const auto& s : series) {
        const double h = silverman_bandwidth(s);
        bandwidths.push_back(h);
        h_max = std::max(h_max, h);
        const auto [a, b] = std::minmax_element(s.begin(), s.end());
        lo = std::min(lo, *a);
        hi = std::max(hi, *b);
    }
    lo -= 4.0 * h_max;
    hi += 4.0 * h_max;
    out.x.resize(kDensityPoints);
    for (std::size_t i = 0; i < kDensityPoints; ++i) {
        out.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kDensityPoints - 1);
    }
    out.columns = names;
    for (std::size_t k = 0; k < series.size(); ++k) {
        out.density.push_back(kde_density_on(series[k], out.x, bandwidths[k]).density);
    }
    return out;
}

nlohmann::ordered_json table_json(const Table& t) {
    auto arr = nlohmann::ordered_json::array();
    for (const TableRow& r : t) {
        arr.push_back({{"group", r.group}, {"metric", r.metric}, {"value", r.value}, {"n", r.n}});
    }
    return arr;
}

nlohmann::ordered_json metrics_json(const MetricSet& m) {
    return {{"mdape", m.mdape}, {"pearson_r", m.pearson_r}, {"iqr", m.iqr}, {"n", m.n_samples}};
}

} // namespace

Table lead_region_table(const ExperimentReport& report) {
    Table t;
    const std::vector<std::optional<Region>> regions = {std::nullopt, Region::north, Region::south};
    for (const auto& region : regions) {
        std::vector<const PlantResult*> sel;
        for (const PlantResult& p : report.plants) {
            if (!region || p.plant.region() == *region) {
                sel.push_back(&p);
            }
        }
        if (sel.empty()) {
            continue;
        }
        auto over = [&sel](auto get) {
            std::vector<double> v;
            for (const PlantResult* p : sel) {
                v.push_back(get(*p));
            }
            return quartiles(std::move(v));
        };
        const std::string g0 = lead_group(region, 0);
        add_quartiles(t, g0, "svr_mdape", over([](const PlantResult& p) { return p.calibration.svr_cv.mdape; }));
        add_quartiles(t, g0, "svr_r", over([](const PlantResult& p) { return p.calibration.svr_cv.pearson_r; }));
        add_quartiles(t, g0, "linear_mdape",
                      over([](const PlantResult& p) { return p.calibration.linear_cv.mdape; }));
        add_quartiles(t, g0, "linear_r",
                      over([](const PlantResult& p) { return p.calibration.linear_cv.pearson_r; }));
        for (int lead : report.config.leads) {
            const std::string g = lead_group(region, lead);
            auto at = [lead](const PlantResult& p) { return find_lead(p, lead); };
            add_quartiles(t, g, "svr_mdape", over([&](const PlantResult& p) { return at(p)->svr.mdape; }));
            add_quartiles(t, g, "svr_r", over([&](const PlantResult& p) { return at(p)->svr.pearson_r; }));
            add_quartiles(t, g, "linear_mdape", over([&](const PlantResult& p) { return at(p)->linear.mdape; }));
            add_quartiles(t, g, "linear_r", over([&](const PlantResult& p) { return at(p)->linear.pearson_r; }));
        }
    }
    return t;
}

Table lead_season_table(const ExperimentReport& report) {
    std::vector<EvalRecord> records;
    for (const PlantResult& p : report.plants) {
        const Region region = p.plant.region();
        const double floor = p.calibration.y_floor;
        for (std::size_t d = 0; d < p.production.size(); ++d) {
            records.push_back({p.production.date(d), region, 0, p.calibration.svr_out_of_fold[d],
                               p.production.mwh[d], floor});
        }
        for (const LeadForecast& f : p.forecasts) {
            for (std::size_t d = 0; d < p.production.size(); ++d) {
                records.push_back({p.production.date(d), region, f.lead, f.svr_prediction[d], p.production.mwh[d],
                                   floor});
            }
        }
    }
    Table t;
    for (const Grouping by : {Grouping{true, false, true}, Grouping{true, true, true}}) {
        for (const auto& [key, g] : grouped_metrics(records, by)) {
            const std::string label = key.label();
            t.push_back({label, "mdape", g.metrics.mdape, g.metrics.n_samples});
            t.push_back({label, "pearson_r", g.metrics.pearson_r, g.metrics.n_samples});
            t.push_back({label, "iqr", g.metrics.iqr, g.metrics.n_samples});
            t.push_back({label, "low_confidence", g.low_confidence ? 1.0 : 0.0, g.metrics.n_samples});
        }
    }
    return t;
}

Table uncertainty_table(const ExperimentReport& report) {
    Table t;
    auto over = [&report](auto get) {
        std::vector<double> v;
        for (const PlantResult& p : report.plants) {
            v.push_back(get(p));
        }
        return quartiles(std::move(v));
    };
    const std::string g0 = lead_group(std::nullopt, 0);
    add_quartiles(t, g0, "production_mdape",
                  over([](const PlantResult& p) { return p.calibration.svr_cv.mdape; }));
    for (int lead : report.config.leads) {
        const std::string g = lead_group(std::nullopt, lead);
        auto input = [lead](const PlantResult& p) {
            const InputError* e = nullptr;
            find_lead(p, lead, &e);
            return *e;
        };
        add_quartiles(t, g, "production_mdape",
                      over([lead](const PlantResult& p) { return find_lead(p, lead)->svr.mdape; }));
        add_quartiles(t, g, "ssr_input_mdape", over([&](const PlantResult& p) { return input(p).ssr_mdape; }));
        add_quartiles(t, g, "t2m_input_mae", over([&](const PlantResult& p) { return input(p).t2m_mae; }));
    }
    return t;
}

Table correlation_table(const ExperimentReport& report) {
    Table t;
    for (const SkillRow& r : report.skill) {
        const std::string g = fmt::format("variable={};lead={}", to_string(r.variable), r.lead);
        t.push_back({g, "corr_mean", r.mean, r.days});
        t.push_back({g, "corr_q1", r.q1, r.days});
        t.push_back({g, "corr_median", r.median, r.days});
        t.push_back({g, "corr_q3", r.q3, r.days});
        t.push_back({g, "corr_iqr", r.q3 - r.q1, r.days});
        t.push_back({g, "corr_target", report.config.forecast.target_correlation(r.lead), r.days});
    }
    return t;
}

Table latitude_table(const ExperimentReport& report) {
    Table t;
    for (const BandRow& r : report.bands) {
        t.push_back({fmt::format("band={}-{};lead={}", r.lat_lo, r.lat_hi, r.lead), "ssr_mdape", r.mdape, r.n});
    }
    return t;
}

std::string render_table(const Table& table) {
    std::string out = "group,metric,value,n\n";
    for (const TableRow& r : table) {
        out += fmt::format("{},{},{},{}\n", r.group, r.metric, r.value, r.n);
    }
    return out;
}

Table parse_table(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    if (!detail::read_line(in, line)) {
        throw ParseError(source_name, 1, "empty table");
    }
    const auto pos = detail::column_positions(line, {"group", "metric", "value", "n"}, source_name);
    Table out;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() < 4) {
            throw ParseError(source_name, line_no, "expected 4 fields");
        }
        out.push_back({std::string(f[pos[0]]), std::string(f[pos[1]]),
                       detail::parse_value<double>(f[pos[2]], source_name, line_no, "value"),
                       detail::parse_value<std::size_t>(f[pos[3]], source_name, line_no, "n")});
    }
    return out;
}

DensityTable production_densities(const ExperimentReport& report, Region region) {
    std::vector<std::string> names{"observed"};
    std::vector<std::vector<double>> series(1);
    std::vector<int> leads;
    for (int lead : kDensityLeads) {
        if (std::find(report.config.leads.begin(), report.config.leads.end(), lead) != report.config.leads.end()) {
            leads.push_back(lead);
            names.push_back(fmt::format("lead{}", lead));
            series.emplace_back();
        }
    }
    for (const PlantResult& p : report.plants) {
        if (p.plant.region() != region) {
            continue;
        }
        for (std::size_t d = 0; d < p.production.size(); ++d) {
            const Date day = p.production.date(d);
            series[0].push_back(normalized_production(p.plant, p.production.mwh[d], day, report.config.production));
            for (std::size_t k = 0; k < leads.size(); ++k) {
                const double pred = find_lead(p, leads[k])->svr_prediction[d];
                series[k + 1].push_back(normalized_production(p.plant, pred, day, report.config.production));
            }
        }
    }
    if (series[0].size() < 2) {
        return DensityTable{names, {}, {}};
    }
    return densities(names, series);
}

DensityTable ssr_densities(const ExperimentReport& report, Region region) {
    std::vector<std::string> names{"observed"};
    std::vector<std::vector<double>> series(1);
    std::vector<int> leads;
    for (int lead : kDensityLeads) {
        if (std::find(report.config.leads.begin(), report.config.leads.end(), lead) != report.config.leads.end()) {
            leads.push_back(lead);
            names.push_back(fmt::format("lead{}", lead));
            series.emplace_back();
        }
    }
    for (const PlantResult& p : report.plants) {
        if (p.plant.region() != region) {
            continue;
        }
        series[0].insert(series[0].end(), p.obs_ssr.begin(), p.obs_ssr.end());
        for (std::size_t k = 0; k < leads.size(); ++k) {
            const auto& fc = p.forecast_ssr.at(leads[k]);
            series[k + 1].insert(series[k + 1].end(), fc.begin(), fc.end());
        }
    }
    if (series[0].size() < 2) {
        return DensityTable{names, {}, {}};
    }
    return densities(names, series);
}

std::string render_density(const DensityTable& table) {
    std::string out = "x";
    for (const auto& c : table.columns) {
        out += "," + c;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.x.size(); ++i) {
        out += num(table.x[i]);
        for (const auto& col : table.density) {
            out += "," + num(col[i]);
        }
        out += '\n';
    }
    return out;
}

DensityTable parse_density(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    if (!detail::read_line(in, line)) {
        throw ParseError(source_name, 1, "empty density table");
    }
    const auto header = detail::split_csv(line);
    if (header.empty() || header[0] != "x") {
        throw SchemaError(fmt::format("{}: missing columns: x", source_name));
    }
    DensityTable out;
    for (std::size_t k = 1; k < header.size(); ++k) {
        out.columns.emplace_back(header[k]);
    }
    out.density.resize(out.columns.size());
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() != header.size()) {
            throw ParseError(source_name, line_no, fmt::format("expected {} fields", header.size()));
        }
        out.x.push_back(detail::parse_value<double>(f[0], source_name, line_no, "x"));
        for (std::size_t k = 1; k < f.size(); ++k) {
            out.density[k - 1].push_back(detail::parse_value<double>(f[k], source_name, line_no, out.columns[k - 1]));
        }
    }
    return out;
}

std::string summary_text(const ExperimentReport& report) {
    const FleetSummary all = summarize(report);
    std::string out;
    out += "PV production forecast experiment\n";
    out += fmt::format("seed: {}\n", report.config.seed);
    out += "modelling error: 10-fold cross-validation on observation-driven inputs\n";
    out += "forecast error: final models applied in-sample to forecast inputs over the full production record\n";
    out += fmt::format("mdape floor: days below {} of each plant's maximum production are excluded\n",
                       report.config.floor_fraction);
    out += fmt::format("plants: {} (North {}, South {})\n\n", all.plants, all.north, all.south);
    out += fmt::format("fleet median CV MdAPE: SVR {:.3f}%  linear {:.3f}%", all.svr_cv_mdape, all.linear_cv_mdape);
    if (all.linear_cv_mdape > 0.0) {
        out += fmt::format("  (SVR {:.1f}% lower)", 100.0 * (1.0 - all.svr_cv_mdape / all.linear_cv_mdape));
    }
    out += "\n\n";
    out += fmt::format("{:>4} {:>12} {:>10} {:>12} {:>12} {:>12}\n", "lead", "svr_mdape", "svr_r", "linear_mdape",
                       "ssr_in_mdape", "t2m_in_mae");
    for (const FleetLead& f : all.leads) {
        out += fmt::format("{:>4} {:>12.3f} {:>10.4f} {:>12.3f} {:>12.3f} {:>12.3f}\n", f.lead, f.svr_mdape, f.svr_r,
                           f.linear_mdape, f.ssr_input_mdape, f.t2m_input_mae);
    }
    for (Region r : {Region::north, Region::south}) {
        const FleetSummary s = summarize(report, r);
        if (s.plants == 0) {
            continue;
        }
        out += fmt::format("\n{}: {} plants, CV MdAPE SVR {:.3f}% linear {:.3f}%\n", to_string(r), s.plants,
                           s.svr_cv_mdape, s.linear_cv_mdape);
        for (const FleetLead& f : s.leads) {
            out += fmt::format("  lead {:>2}: svr MdAPE {:.3f}%  r {:.4f}\n", f.lead, f.svr_mdape, f.svr_r);
        }
    }
    return out;
}

std::string render_calibration_table(std::span<const PlantResult> plants) {
    std::string out =
        "plant_id,region,lat,lon,capacity_mw,n_samples,y_floor,c,epsilon,gamma,support_vectors,iterations,"
        "svr_cv_mdape,svr_cv_r,svr_cv_iqr,linear_cv_mdape,linear_cv_r,linear_cv_iqr,svr_fit_mdape,linear_fit_mdape,"
        "a1,a2,a3\n";
    for (const PlantResult& p : plants) {
        const Calibration& c = p.calibration;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", p.plant.id,
                           to_string(p.plant.region()), p.plant.lat, p.plant.lon, p.plant.capacity_mw, c.n_samples,
                           c.y_floor, c.hp.c, c.hp.epsilon, c.hp.gamma, c.svr.support_vectors().size(),
                           c.svr.stats().iterations, c.svr_cv.mdape, c.svr_cv.pearson_r, c.svr_cv.iqr,
                           c.linear_cv.mdape, c.linear_cv.pearson_r, c.linear_cv.iqr, c.svr_fit.mdape,
                           c.linear_fit.mdape, c.linear.a1, c.linear.a2, c.linear.a3);
    }
    return out;
}

std::string render_forecast_table(std::span<const PlantResult> plants) {
    std::string out = "plant_id,region,lead,svr_mdape,svr_r,svr_iqr,linear_mdape,linear_r,linear_iqr,ssr_input_mdape,"
                      "t2m_input_mae,n\n";
    for (const PlantResult& p : plants) {
        for (std::size_t k = 0; k < p.forecasts.size(); ++k) {
            const LeadForecast& f = p.forecasts[k];
            const InputError e = k < p.input_errors.size() ? p.input_errors[k] : InputError{kNaN, kNaN};
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", p.plant.id, to_string(p.plant.region()),
                               f.lead, f.svr.mdape, f.svr.pearson_r, f.svr.iqr, f.linear.mdape, f.linear.pearson_r,
                               f.linear.iqr, e.ssr_mdape, e.t2m_mae, f.svr.n_samples);
        }
    }
    return out;
}

std::string render_grid_search(const std::vector<GridSearchRow>& table) {
    std::string out = "index,c,epsilon,gamma,mdape,pearson_r,iqr,ok,error\n";
    for (const GridSearchRow& r : table) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.index, r.hp.c, r.hp.epsilon, r.hp.gamma, r.metrics.mdape,
                           r.metrics.pearson_r, r.metrics.iqr, r.ok ? 1 : 0, err);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    out << text;
    if (!out) {
        throw Error(fmt::format("failed writing {}", path.string()));
    }
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir, ReportFormat format) {
    const auto tables = dir / "tables";
    const auto dens = dir / "densities";
    const auto models = dir / "models";

    write_text(dir / "summary.txt", summary_text(report));
    write_text(dir / "config_echo",
               fmt::format("# resolved configuration; derived seeds: weather={} forecast={} fleet={} cv={}\n{}",
                           report.config.weather.seed, report.config.forecast.seed, report.config.fleet_seed,
                           report.config.cv.seed, render_config(report.config)));

    const Table fig9 = lead_region_table(report);
    const Table fig10 = lead_season_table(report);
    const Table fig12 = uncertainty_table(report);
    const Table fig4 = correlation_table(report);
    const Table fig6 = latitude_table(report);
    write_text(tables / "fig9_lead_region.csv", render_table(fig9));
    write_text(tables / "fig10_lead_season.csv", render_table(fig10));
    write_text(tables / "fig12_uncertainty.csv", render_table(fig12));
    write_text(tables / "fig4_ssr_correlation.csv", render_table(fig4));
    write_text(tables / "fig6_ssr_mdape_latitude.csv", render_table(fig6));
    write_text(tables / "plant_calibration.csv", render_calibration_table(report.plants));
    write_text(tables / "plant_forecast.csv", render_forecast_table(report.plants));
    for (const PlantResult& p : report.plants) {
        write_text(tables / "grid_search" / (p.plant.id + ".csv"), render_grid_search(p.calibration.grid_table));
        store_svr_model(p.calibration.svr, models / (p.plant.id + ".svr"));
        store_linear_model(p.calibration.linear, models / (p.plant.id + ".linear"));
    }
    for (Region r : {Region::north, Region::south}) {
        write_text(dens / fmt::format("fig11_{}.csv", region_file_tag(r)),
                   render_density(production_densities(report, r)));
        write_text(dens / fmt::format("fig5_ssr_{}.csv", region_file_tag(r)), render_density(ssr_densities(report, r)));
    }

    if (format == ReportFormat::structured) {
        nlohmann::ordered_json j;
        j["seed"] = report.config.seed;
        j["config"] = render_config(report.config);
        auto plants = nlohmann::ordered_json::array();
        for (const PlantResult& p : report.plants) {
            const Calibration& c = p.calibration;
            nlohmann::ordered_json pj;
            pj["plant_id"] = p.plant.id;
            pj["region"] = std::string(to_string(p.plant.region()));
            pj["hyper_params"] = {{"c", c.hp.c}, {"epsilon", c.hp.epsilon}, {"gamma", c.hp.gamma}};
            pj["svr_cv"] = metrics_json(c.svr_cv);
            pj["linear_cv"] = metrics_json(c.linear_cv);
            auto leads = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < p.forecasts.size(); ++k) {
                leads.push_back({{"lead", p.forecasts[k].lead},
                                 {"svr", metrics_json(p.forecasts[k].svr)},
                                 {"linear", metrics_json(p.forecasts[k].linear)},
                                 {"ssr_input_mdape", p.input_errors[k].ssr_mdape},
                                 {"t2m_input_mae", p.input_errors[k].t2m_mae}});
            }
            pj["forecasts"] = std::move(leads);
            plants.push_back(std::move(pj));
        }
        j["plants"] = std::move(plants);
        j["tables"] = {{"fig9_lead_region", table_json(fig9)},   {"fig10_lead_season", table_json(fig10)},
                       {"fig12_uncertainty", table_json(fig12)}, {"fig4_ssr_correlation", table_json(fig4)},
                       {"fig6_ssr_mdape_latitude", table_json(fig6)}};
        write_text(dir / "report.json", j.dump(2) + "\n");
    }
}

} // namespace pvfc
