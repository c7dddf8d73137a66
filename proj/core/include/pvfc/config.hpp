#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pvfc/cross_validation.hpp"
#include "pvfc/plant.hpp"
#include "pvfc/svr_solver.hpp"
#include "pvfc/weather.hpp"

namespace pvfc {

/// Everything needed to reproduce one experiment. Sub-seeds are never set
/// directly: `seed` is expanded by apply_seed().
struct ExperimentConfig {
    ExperimentConfig() { apply_seed(0); }

    std::uint64_t seed = 0;
    WeatherGenConfig weather;
    ForecastDegradationConfig forecast;
    ProductionModel production;
    std::uint64_t fleet_seed = 0;
    std::size_t max_plants = 0;  ///< 0 = whole fleet
    SearchGrid grid = SearchGrid::standard();
    CvConfig cv;
    double tol = 1e-6;
    std::size_t max_iter = 1'000'000;
    std::vector<int> leads{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double floor_fraction = 0.01;  ///< MdAPE exclusion floor as a fraction of each plant's maximum
    std::size_t threads = 1;  ///< plant workers; 0 = one per hardware thread

    /// Sets the global seed and derives the weather, forecast, fleet and CV seeds from it.
    void apply_seed(std::uint64_t global_seed);
    SolverOptions solver() const;
    /// Per-plant production noise seed.
    std::uint64_t production_seed(std::string_view plant_id) const;
    void validate() const;
};

/// Parses "3", "1,5,10", "1..10" or "1..4,8". Throws ValidationError.
std::vector<int> parse_leads(std::string_view text);
std::string format_leads(const std::vector<int>& leads);

/// Applies `key = value` lines (blank lines and '#' comments ignored) on top
/// of `base`. Throws ParseError for malformed lines and unknown keys.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {},
                              const std::string& source_name = "<config>");

/// Resolves a --config argument: the literal "default" or a key=value file.
/// Throws MissingInput when the file does not exist.
ExperimentConfig load_config(const std::string& spec);

/// Every configurable key in a fixed order, with shortest round-trip number
/// formatting; parse_config(render_config(c)) reproduces c.
std::string render_config(const ExperimentConfig& cfg);

} // namespace pvfc
