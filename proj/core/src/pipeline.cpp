#include "pvfc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "pvfc/grid_io.hpp"
#include "pvfc/metrics.hpp"

namespace pvfc {

namespace {

double median_of(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) {
        return std::nan("");
    }
    return median(v);
}

std::vector<double> predictions_for(const std::vector<Sample>& samples, const auto& model) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        out.push_back(model.predict(s.ssr, s.t));
    }
    return out;
}

// Runs fn(i) for i in [0, n) on `threads` workers; the first exception by
// index is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, n);
    std::vector<std::exception_ptr> errors(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::vector<double> on_production_days(const SiteSeries& series, const ProductionSeries& production) {
    const long offset = days_between(series.first_day, production.first_day);
    if (offset < 0 || static_cast<std::size_t>(offset) + production.size() > series.size()) {
        throw DateMismatch(fmt::format("plant {}: weather {}..{} does not cover production {}..{}", production.plant_id,
                                       format_date(series.first_day),
                                       format_date(series.date(series.size() == 0 ? 0 : series.size() - 1)),
                                       format_date(production.first_day), format_date(production.last_day())));
    }
    const auto b = series.values.begin() + offset;
    return {b, b + static_cast<std::ptrdiff_t>(production.size())};
}

} // namespace

const GridField& WeatherBundle::field(Variable v, int lead) const {
    if (lead == 0) {
        return v == Variable::ssr ? obs.ssr : obs.t2m;
    }
    const auto& fields = v == Variable::ssr ? ssr_forecast : t2m_forecast;
    const auto it = fields.find(lead);
    if (it == fields.end()) {
        throw MissingLead(fmt::format("no {} forecast for lead {}", to_string(v), lead));
    }
    return it->second;
}

std::vector<int> WeatherBundle::leads() const {
    std::vector<int> out;
    for (const auto& [lead, field] : ssr_forecast) {
        if (t2m_forecast.contains(lead)) {
            out.push_back(lead);
        }
    }
    return out;
}

WeatherBundle generate_weather(const ExperimentConfig& cfg, std::span<const int> leads) {
    WeatherBundle out{generate_observations(cfg.weather), {}, {}};
    for (int lead : leads) {
        out.ssr_forecast.emplace(lead, degrade_forecast(out.obs.ssr, lead, cfg.forecast));
        out.t2m_forecast.emplace(lead, degrade_forecast(out.obs.t2m, lead, cfg.forecast));
    }
    return out;
}

void store_weather(const WeatherBundle& bundle, const std::filesystem::path& dir, const ExperimentConfig& cfg) {
    std::filesystem::create_directories(dir);
    store_field(bundle.obs.ssr, dir / field_file_name(Variable::ssr, 0));
    store_field(bundle.obs.t2m, dir / field_file_name(Variable::t2m, 0));
    for (int lead : bundle.leads()) {
        store_field(bundle.ssr_forecast.at(lead), dir / field_file_name(Variable::ssr, lead));
        store_field(bundle.t2m_forecast.at(lead), dir / field_file_name(Variable::t2m, lead));
    }
    std::ofstream out(dir / "manifest.txt");
    out << "# weather fields generated from the configuration below\n";
    out << "# leads = " << format_leads(bundle.leads()) << '\n';
    out << fmt::format("# weather_seed = {}\n# forecast_seed = {}\n", cfg.weather.seed, cfg.forecast.seed);
    out << render_config(cfg);
}

WeatherBundle load_weather(const std::filesystem::path& dir, std::span<const int> leads) {
    WeatherBundle out{{load_field(dir / field_file_name(Variable::ssr, 0)),
                       load_field(dir / field_file_name(Variable::t2m, 0))},
                      {},
                      {}};
    for (int lead : leads) {
        out.ssr_forecast.emplace(lead, load_field(dir / field_file_name(Variable::ssr, lead)));
        out.t2m_forecast.emplace(lead, load_field(dir / field_file_name(Variable::t2m, lead)));
    }
    return out;
}

SiteWeather site_weather(const WeatherBundle& weather, const Plant& plant, int lead) {
    return SiteWeather{bilinear_interpolate(weather.field(Variable::ssr, lead), plant.lat, plant.lon),
                       bilinear_interpolate(weather.field(Variable::t2m, lead), plant.lat, plant.lon)};
}

ProductionSeries simulate_plant_record(const Plant& plant, const SiteWeather& obs, std::uint64_t seed,
                                       const ProductionModel& model) {
    ProductionSeries full = simulate_production(plant, obs.ssr, obs.t2m, seed, model);
    const auto keep = std::min(full.size(), static_cast<std::size_t>(plant.record_days));
    const auto drop = full.size() - keep;
    ProductionSeries out{plant.id, full.date(drop), {}};
    out.mwh.assign(full.mwh.begin() + static_cast<std::ptrdiff_t>(drop), full.mwh.end());
    return out;
}

std::vector<Sample> align_samples(const SiteWeather& weather, const ProductionSeries& production) {
    if (weather.ssr.first_day != weather.t2m.first_day || weather.ssr.size() != weather.t2m.size()) {
        throw DateMismatch(fmt::format("plant {}: SSR and T2M series cover different dates", production.plant_id));
    }
    const auto ssr = on_production_days(weather.ssr, production);
    const auto t2m = on_production_days(weather.t2m, production);
    std::vector<Sample> out(production.size());
    for (std::size_t d = 0; d < production.size(); ++d) {
        out[d] = Sample{ssr[d], t2m[d], production.mwh[d]};
    }
    return out;
}

double production_floor(const ProductionSeries& production, double fraction) {
    if (production.mwh.empty()) {
        throw TooFewSamples(fmt::format("plant {}: empty production record", production.plant_id));
    }
    return fraction * *std::max_element(production.mwh.begin(), production.mwh.end());
}

Calibration calibrate_plant(const Plant& plant, const SiteWeather& obs, const ProductionSeries& production,
                            const CalibrationSettings& settings) {
    if (obs.ssr.lead_days != 0 || obs.t2m.lead_days != 0) {
        throw ValidationError(fmt::format("plant {}: calibration uses observations (lead 0) only", plant.id));
    }
    const std::vector<Sample> samples = align_samples(obs, production);
    Calibration out;
    out.plant_id = plant.id;
    out.n_samples = samples.size();
    out.y_floor = production_floor(production, settings.floor_fraction);

    GridSearchResult search = grid_search(samples, settings.grid, settings.cv, out.y_floor, settings.solver);
    if (!search.table[search.best_index].ok) {
        throw Error(fmt::format("plant {}: no hyperparameter combination could be fitted ({})", plant.id,
                                search.table[search.best_index].error));
    }
    out.hp = search.best;
    out.grid_table = std::move(search.table);

    const CvResult svr_cv = kfold_cv(samples, svr_model_spec(out.hp, settings.solver), settings.cv, out.y_floor);
    const CvResult linear_cv = kfold_cv(samples, linear_model_spec(), settings.cv, out.y_floor);
    out.svr_cv = svr_cv.metrics;
    out.linear_cv = linear_cv.metrics;
    out.svr_out_of_fold = svr_cv.out_of_fold;
    out.linear_out_of_fold = linear_cv.out_of_fold;

    out.svr = fit_svr(samples, out.hp, settings.solver);
    out.linear = fit_ols(samples);
    const auto truth = targets(samples);
    out.svr_fit = compute_metrics(predictions_for(samples, out.svr), truth, out.y_floor);
    out.linear_fit = compute_metrics(predictions_for(samples, out.linear), truth, out.y_floor);
    return out;
}

std::vector<LeadForecast> forecast_plant(const SvrModel& svr, const LinearModel& linear,
                                         const std::map<int, SiteWeather>& inputs,
                                         const ProductionSeries& production, std::span<const int> leads,
                                         double y_floor) {
    std::vector<LeadForecast> out;
    for (int lead : leads) {
        const auto it = inputs.find(lead);
        if (it == inputs.end()) {
            throw MissingLead(fmt::format("plant {}: no forecast inputs for lead {}", production.plant_id, lead));
        }
        if (it->second.ssr.lead_days != lead || it->second.t2m.lead_days != lead) {
            throw ValidationError(fmt::format("plant {}: inputs registered under lead {} carry lead {}",
                                              production.plant_id, lead, it->second.ssr.lead_days));
        }
        const std::vector<Sample> samples = align_samples(it->second, production);
        const auto truth = targets(samples);
        LeadForecast f;
        f.lead = lead;
        f.svr_prediction = predictions_for(samples, svr);
        f.linear_prediction = predictions_for(samples, linear);
        f.svr = compute_metrics(f.svr_prediction, truth, y_floor);
        f.linear = compute_metrics(f.linear_prediction, truth, y_floor);
        out.push_back(std::move(f));
    }
    return out;
}

InputError input_error(const SiteWeather& obs, const SiteWeather& forecast, const ProductionSeries& production) {
    const auto ssr_obs = on_production_days(obs.ssr, production);
    const auto ssr_fc = on_production_days(forecast.ssr, production);
    const auto t_obs = on_production_days(obs.t2m, production);
    const auto t_fc = on_production_days(forecast.t2m, production);
    std::vector<double> abs_err(t_obs.size());
    for (std::size_t d = 0; d < t_obs.size(); ++d) {
        abs_err[d] = std::abs(t_fc[d] - t_obs[d]);
    }
    return InputError{mdape(ssr_fc, ssr_obs), median(abs_err)};
}

std::vector<SkillRow> forecast_skill(const WeatherBundle& weather, std::span<const int> leads) {
    std::vector<SkillRow> out;
    for (Variable v : {Variable::ssr, Variable::t2m}) {
        const GridField& obs = weather.field(v, 0);
        for (int lead : leads) {
            const GridField& fc = weather.field(v, lead);
            std::vector<double> daily;
            daily.reserve(obs.n_days());
            for (std::size_t d = 0; d < obs.n_days(); ++d) {
                daily.push_back(spatial_correlation(fc, obs, obs.date(d)));
            }
            SkillRow row;
            row.variable = v;
            row.lead = lead;
            double s = 0.0;
            for (double r : daily) {
                s += r;
            }
            row.mean = s / static_cast<double>(daily.size());
            row.q1 = quantile(daily, 0.25);
            row.median = quantile(daily, 0.5);
            row.q3 = quantile(daily, 0.75);
            row.days = daily.size();
            out.push_back(row);
        }
    }
    return out;
}

std::vector<BandRow> latitude_band_mdape(const WeatherBundle& weather, std::span<const int> leads) {
    constexpr double kBand = 2.5;
    constexpr double kLo = 30.0;
    constexpr int kBands = 8;
    const GridField& obs = weather.field(Variable::ssr, 0);
    const GridSpec& spec = obs.spec();
    auto band_of = [&](double lat) {
        const int b = static_cast<int>(std::floor((lat - kLo) / kBand + 1e-9));
        return std::min(b, kBands - 1);
    };
    std::vector<BandRow> out;
    for (int lead : leads) {
        const GridField& fc = weather.field(Variable::ssr, lead);
        std::vector<std::vector<double>> pred(kBands);
        std::vector<std::vector<double>> truth(kBands);
        for (std::size_t d = 0; d < obs.n_days(); ++d) {
            for (std::size_t i = 0; i < spec.n_lat; ++i) {
                const double lat = spec.lat_at(i);
                if (lat < kLo || lat > kLo + kBand * kBands) {
                    continue;
                }
                const int b = band_of(lat);
                for (std::size_t j = 0; j < spec.n_lon; ++j) {
                    pred[b].push_back(fc.at(d, i, j));
                    truth[b].push_back(obs.at(d, i, j));
                }
            }
        }
        for (int b = 0; b < kBands; ++b) {
            if (truth[b].empty()) {
                continue;
            }
            BandRow row;
            row.lat_lo = kLo + kBand * b;
            row.lat_hi = row.lat_lo + kBand;
            row.lead = lead;
            const auto ape = absolute_percentage_errors(pred[b], truth[b]);
            row.n = ape.size();
            row.mdape = median(ape);
            out.push_back(row);
        }
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const WeatherBundle* weather, const Fleet* fleet) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;

    std::optional<WeatherBundle> generated;
    if (weather == nullptr) {
        generated = generate_weather(cfg, cfg.leads);
        weather = &*generated;
    }
    Fleet plants = fleet != nullptr ? *fleet : build_default_fleet(cfg.fleet_seed);
    if (cfg.max_plants > 0 && cfg.max_plants < plants.plants.size()) {
        plants = plants.subset(cfg.max_plants);
    }
    std::sort(plants.plants.begin(), plants.plants.end(),
              [](const Plant& a, const Plant& b) { return a.id < b.id; });

    CalibrationSettings settings;
    settings.grid = cfg.grid;
    settings.cv = cfg.cv;
    settings.solver = cfg.solver();
    settings.floor_fraction = cfg.floor_fraction;

    report.plants.resize(plants.plants.size());
    parallel_for(plants.plants.size(), cfg.threads, [&](std::size_t p) {
        const Plant& plant = plants.plants[p];
        PlantResult& r = report.plants[p];
        r.plant = plant;
        const SiteWeather obs = site_weather(*weather, plant, 0);
        r.production = simulate_plant_record(plant, obs, cfg.production_seed(plant.id), cfg.production);
        r.calibration = calibrate_plant(plant, obs, r.production, settings);

        std::map<int, SiteWeather> inputs;
        for (int lead : cfg.leads) {
            inputs.emplace(lead, site_weather(*weather, plant, lead));
        }
        r.forecasts = forecast_plant(r.calibration.svr, r.calibration.linear, inputs, r.production, cfg.leads,
                                     r.calibration.y_floor);
        r.obs_ssr = on_production_days(obs.ssr, r.production);
        for (int lead : cfg.leads) {
            r.input_errors.push_back(input_error(obs, inputs.at(lead), r.production));
            r.forecast_ssr.emplace(lead, on_production_days(inputs.at(lead).ssr, r.production));
        }
    });

    report.skill = forecast_skill(*weather, cfg.leads);
    report.bands = latitude_band_mdape(*weather, cfg.leads);
    return report;
}

FleetSummary summarize(const ExperimentReport& report, std::optional<Region> region) {
    FleetSummary out;
    std::vector<const PlantResult*> sel;
    for (const PlantResult& p : report.plants) {
        if (p.plant.region() == Region::north) {
            ++out.north;
        } else {
            ++out.south;
        }
        if (!region || p.plant.region() == *region) {
            sel.push_back(&p);
        }
    }
    out.plants = sel.size();
    if (sel.empty()) {
        return out;
    }
    auto collect = [&sel](auto get) {
        std::vector<double> v;
        for (const PlantResult* p : sel) {
            v.push_back(get(*p));
        }
        return median_of(std::move(v));
    };
    out.svr_cv_mdape = collect([](const PlantResult& p) { return p.calibration.svr_cv.mdape; });
    out.linear_cv_mdape = collect([](const PlantResult& p) { return p.calibration.linear_cv.mdape; });
    out.svr_fit_mdape = collect([](const PlantResult& p) { return p.calibration.svr_fit.mdape; });
    const auto& leads = report.plants.front().forecasts;
    for (std::size_t k = 0; k < leads.size(); ++k) {
        FleetLead f;
        f.lead = leads[k].lead;
        f.svr_mdape = collect([k](const PlantResult& p) { return p.forecasts[k].svr.mdape; });
        f.svr_r = collect([k](const PlantResult& p) { return p.forecasts[k].svr.pearson_r; });
        f.linear_mdape = collect([k](const PlantResult& p) { return p.forecasts[k].linear.mdape; });
        f.ssr_input_mdape = collect([k](const PlantResult& p) { return p.input_errors[k].ssr_mdape; });
        f.t2m_input_mae = collect([k](const PlantResult& p) { return p.input_errors[k].t2m_mae; });
        out.leads.push_back(f);
    }
    return out;
}

} // namespace pvfc
