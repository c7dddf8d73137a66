#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pvfc/config.hpp"
#include "pvfc/cross_validation.hpp"
#include "pvfc/grid.hpp"
#include "pvfc/linear_model.hpp"
#include "pvfc/plant.hpp"
#include "pvfc/svr.hpp"
#include "pvfc/weather.hpp"

namespace pvfc {

/// Observation fields plus forecast fields for each generated lead.
struct WeatherBundle {
    ObservedWeather obs;
    std::map<int, GridField> ssr_forecast;
    std::map<int, GridField> t2m_forecast;

    /// Lead 0 returns the observation. Throws MissingLead.
    const GridField& field(Variable v, int lead) const;
    std::vector<int> leads() const;
};

/// Generates observations and the forecast fields at `leads` from the
/// configuration's weather and forecast seeds.
WeatherBundle generate_weather(const ExperimentConfig& cfg, std::span<const int> leads);

/// One file per (variable, lead) plus a manifest recording the seeds.
void store_weather(const WeatherBundle& bundle, const std::filesystem::path& dir, const ExperimentConfig& cfg);
/// Loads the observations and the requested leads. Throws MissingInput naming the missing file.
WeatherBundle load_weather(const std::filesystem::path& dir, std::span<const int> leads);

/// SSR and T2M interpolated to a plant site.
struct SiteWeather {
    SiteSeries ssr;
    SiteSeries t2m;
};

SiteWeather site_weather(const WeatherBundle& weather, const Plant& plant, int lead);

/// Last `plant.record_days` days of the simulated production over the whole weather period.
ProductionSeries simulate_plant_record(const Plant& plant, const SiteWeather& obs, std::uint64_t seed,
                                       const ProductionModel& model = {});

/// Pairs each production day with the weather of that day. Throws DateMismatch
/// if the weather does not cover the production record.
std::vector<Sample> align_samples(const SiteWeather& weather, const ProductionSeries& production);

/// MdAPE exclusion floor: `fraction` of the largest observed production.
double production_floor(const ProductionSeries& production, double fraction);

struct CalibrationSettings {
    SearchGrid grid = SearchGrid::standard();
    CvConfig cv;
    SolverOptions solver;
    double floor_fraction = 0.01;
};

struct Calibration {
    std::string plant_id;
    std::size_t n_samples = 0;
    double y_floor = 0.0;
    SvrModel svr;
    LinearModel linear;
    SvrHyperParams hp;
    MetricSet svr_cv;  ///< k-fold CV of the selected hyperparameters
    MetricSet linear_cv;
    MetricSet svr_fit;  ///< final model on its own training record
    MetricSet linear_fit;
    std::vector<double> svr_out_of_fold;
    std::vector<double> linear_out_of_fold;
    std::vector<GridSearchRow> grid_table;
};

/// Grid search plus CV on observation-driven samples, then both models
/// refitted on the full record. Only lead-0 inputs are accepted.
Calibration calibrate_plant(const Plant& plant, const SiteWeather& obs, const ProductionSeries& production,
                            const CalibrationSettings& settings);

struct LeadForecast {
    int lead = 0;
    std::vector<double> svr_prediction;  ///< one per production day
    std::vector<double> linear_prediction;
    MetricSet svr;
    MetricSet linear;
};

/// Runs the calibrated models on forecast inputs for each requested lead over
/// the full production record. Throws MissingLead if `inputs` lacks a lead.
std::vector<LeadForecast> forecast_plant(const SvrModel& svr, const LinearModel& linear,
                                         const std::map<int, SiteWeather>& inputs,
                                         const ProductionSeries& production, std::span<const int> leads,
                                         double y_floor);

/// Forecast error of the model inputs at a site, over the production record.
struct InputError {
    double ssr_mdape = 0.0;  ///< %
    double t2m_mae = 0.0;  ///< median absolute error, degrees C
};

InputError input_error(const SiteWeather& obs, const SiteWeather& forecast, const ProductionSeries& production);

struct PlantResult {
    Plant plant;
    ProductionSeries production;
    Calibration calibration;
    std::vector<LeadForecast> forecasts;
    std::vector<InputError> input_errors;  ///< parallel to forecasts
    std::vector<double> obs_ssr;  ///< site SSR on production days
    std::map<int, std::vector<double>> forecast_ssr;  ///< site forecast SSR on production days, by lead
};

/// Per-day spatial correlation between the forecast and observed field.
struct SkillRow {
    Variable variable = Variable::ssr;
    int lead = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::size_t days = 0;
};

/// Grid-cell SSR forecast MdAPE in a latitude band.
struct BandRow {
    double lat_lo = 0.0;
    double lat_hi = 0.0;
    int lead = 0;
    double mdape = 0.0;
    std::size_t n = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<PlantResult> plants;  ///< ordered by plant id
    std::vector<SkillRow> skill;
    std::vector<BandRow> bands;
};

std::vector<SkillRow> forecast_skill(const WeatherBundle& weather, std::span<const int> leads);
/// 2.5 degree bands over 30..50 N, restricted to bands that contain grid nodes.
std::vector<BandRow> latitude_band_mdape(const WeatherBundle& weather, std::span<const int> leads);

/// Full experiment. `weather` and `fleet` replace the generated inputs when
/// given (the fleet is still trimmed to max_plants).
ExperimentReport run_experiment(const ExperimentConfig& cfg, const WeatherBundle* weather = nullptr,
                                const Fleet* fleet = nullptr);

/// Fleet-level aggregates used by the summary and the acceptance checks.
struct FleetLead {
    int lead = 0;
    double svr_mdape = 0.0;  ///< fleet median of per-plant MdAPE
    double svr_r = 0.0;  ///< fleet median of per-plant correlation
    double linear_mdape = 0.0;
    double ssr_input_mdape = 0.0;
    double t2m_input_mae = 0.0;
};

struct FleetSummary {
    std::size_t plants = 0;
    std::size_t north = 0;
    std::size_t south = 0;
    double svr_cv_mdape = 0.0;  ///< fleet median
    double linear_cv_mdape = 0.0;
    double svr_fit_mdape = 0.0;
    std::vector<FleetLead> leads;
};

FleetSummary summarize(const ExperimentReport& report, std::optional<Region> region = std::nullopt);

} // namespace pvfc
