#pragma once

#include <cstdint>

#include "pvfc/grid.hpp"
#include "pvfc/random.hpp"

namespace pvfc {

/// Solar constant used for top-of-atmosphere insolation (W/m^2).
inline constexpr double kSolarConstant = 1367.0;

/// Daily top-of-atmosphere insolation on a horizontal surface (Wh/m^2/day)
/// from declination, sunset hour angle and orbital eccentricity.
/// Throws OutOfRange for |lat| > 66.5 or day_of_year outside 1..366.
double clear_sky_insolation(double lat_deg, int day_of_year);

struct WeatherGenConfig {
    GridSpec grid{35.0, 50.0, 5.0, 20.0, 31, 31};
    Date start{std::chrono::year{2011} / 1 / 1};
    Date end{std::chrono::year{2012} / 12 / 31};
    std::uint64_t seed = 0;

    // Clearness index process.
    double correlation_length_deg = 1.5;
    double persistence = 0.6;
    double k_min = 0.08;
    double k_max = 0.78;
    double k_mean_south = 0.62;  ///< mean clearness at lat_min
    double k_mean_north = 0.50;  ///< mean clearness at lat_max
    double k_seasonal_amplitude = 0.08;  ///< clearer in summer
    double k_std = 0.10;  ///< clearness std at lat_min, before the northern gain
    double north_variability_gain = 2.0;  ///< std multiplier reached at lat_max

    // Temperature (degrees C).
    double t_mean_south = 18.5;  ///< annual mean at lat_min
    double t_lapse_per_deg = -0.55;  ///< change of annual mean per degree of latitude
    double t_amplitude = 9.0;
    double t_warmest_day = 200.0;
    double t_noise_std = 2.0;
    double t_persistence = 0.7;
    double t_cloud_coupling = 1.0;  ///< degrees C per unit clearness anomaly (std units)

    void validate() const;
    std::size_t n_days() const { return static_cast<std::size_t>(days_between(start, end)) + 1; }
};

struct ForecastDegradationConfig {
    double correlation_decay = 0.025;  ///< relative loss of spatial correlation per lead day
    double iqr_growth = 0.20;  ///< relative growth of the daily-correlation spread per lead day
    double base_spread = 0.01;  ///< std of daily correlation at lead 1
    int max_lead = 10;
    double noise_length_deg = 1.5;
    double t2m_noise_scale = 0.5;  ///< temperature error amplitude relative to SSR
    std::uint64_t seed = 0;

    void validate() const;
    /// Expected spatial correlation with observations, (1 - r)^lead.
    double target_correlation(int lead) const;
    double correlation_spread(int lead) const;
};

struct ObservedWeather {
    GridField ssr;
    GridField t2m;
};

/// Seeded observation fields. SSR is clear-sky insolation times an AR(1),
/// spatially smoothed clearness index clipped to [k_min, k_max]; T2M is a
/// latitude-dependent seasonal cycle plus correlated noise.
ObservedWeather generate_observations(const WeatherGenConfig& cfg);

/// Forecast field at `lead` obtained by mixing each day's standardized spatial
/// anomaly with orthogonal, spatially correlated noise so that the day's
/// spatial correlation with the observation equals a per-day draw around
/// (1 - r)^lead. The daily spatial mean is preserved; SSR is clipped at 0.
/// Throws LeadOutOfRange unless 1 <= lead <= max_lead, ValidationError if
/// `obs` is not an observation field.
GridField degrade_forecast(const GridField& obs, int lead, const ForecastDegradationConfig& cfg);

/// Unit-variance Gaussian random field smoothed with a separable Gaussian
/// kernel of the given length (in grid cells). Exposed for testing.
std::vector<double> correlated_noise(std::size_t n_lat, std::size_t n_lon, double length_lat_cells,
                                     double length_lon_cells, Rng& rng);

} // namespace pvfc
