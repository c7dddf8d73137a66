#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pvfc/pipeline.hpp"

namespace pvfc {

/// One line of a `group,metric,value,n` table.
struct TableRow {
    std::string group;
    std::string metric;
    double value = 0.0;
    std::size_t n = 0;
};

using Table = std::vector<TableRow>;

enum class ReportFormat { text, structured };

/// Fleet quartiles of per-plant MdAPE and correlation by region and lead.
/// Lead 0 holds the cross-validated modelling error.
Table lead_region_table(const ExperimentReport& report);
/// Pooled plant-day SVR errors by season and lead, overall and per region.
/// Lead 0 holds the out-of-fold modelling predictions.
Table lead_season_table(const ExperimentReport& report);
/// Input forecast errors next to the production error they propagate into.
Table uncertainty_table(const ExperimentReport& report);
/// Daily spatial correlation of forecast vs observed fields per lead.
Table correlation_table(const ExperimentReport& report);
/// SSR forecast MdAPE per 2.5 degree latitude band and lead.
Table latitude_table(const ExperimentReport& report);

std::string render_table(const Table& table);
Table parse_table(const std::string& text, const std::string& source_name = "<table>");

/// Density curves sharing one x axis, one column per series.
struct DensityTable {
    std::vector<std::string> columns;  ///< series names, x excluded
    std::vector<double> x;
    std::vector<std::vector<double>> density;  ///< [column][point]
};

/// Normalized observed production and normalized SVR forecasts at leads 1, 5
/// and 10 (those present) for the plants of one region.
DensityTable production_densities(const ExperimentReport& report, Region region);
/// Observed and forecast SSR at the plant sites of one region.
DensityTable ssr_densities(const ExperimentReport& report, Region region);

std::string render_density(const DensityTable& table);
DensityTable parse_density(const std::string& text, const std::string& source_name = "<density>");

std::string summary_text(const ExperimentReport& report);

/// Writes the report tree under `dir`:
///   summary.txt, config_echo, tables/*.csv, tables/grid_search/<plant>.csv,
///   densities/*.csv, models/<plant>.svr|.linear and, for the structured
///   format, report.json. Output depends only on the report contents.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir,
                  ReportFormat format = ReportFormat::text);

/// Per-plant calibration and forecast tables, also emitted by the CLI's
/// calibrate and forecast commands from partially filled results.
std::string render_calibration_table(std::span<const PlantResult> plants);
std::string render_forecast_table(std::span<const PlantResult> plants);
std::string render_grid_search(const std::vector<GridSearchRow>& table);

/// Writes `text` to `path` creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace pvfc
