#include "pvfc/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMaxLatitude = 66.5;
constexpr double kYearDays = 365.25;

double axis_fraction(double lat, const GridSpec& g) {
    return (lat - g.lat_min) / (g.lat_max - g.lat_min);
}

std::vector<double> gaussian_weights(double length_cells, std::size_t& pad) {
    if (length_cells <= 1e-6) {
        pad = 0;
        return {1.0};
    }
    pad = static_cast<std::size_t>(std::ceil(3.0 * length_cells));
    std::vector<double> w(2 * pad + 1);
    double ss = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double x = static_cast<double>(k) - static_cast<double>(pad);
        w[k] = std::exp(-0.5 * x * x / (length_cells * length_cells));
        ss += w[k] * w[k];
    }
    const double norm = 1.0 / std::sqrt(ss);
    for (double& v : w) {
        v *= norm;
    }
    return w;
}

} // namespace

double clear_sky_insolation(double lat_deg, int doy) {
    if (!(std::abs(lat_deg) <= kMaxLatitude)) {
        throw OutOfRange(fmt::format("latitude {} outside supported range [-66.5, 66.5]", lat_deg));
    }
    if (doy < 1 || doy > 366) {
        throw OutOfRange(fmt::format("day of year {} outside 1..366", doy));
    }
    const double g = 2.0 * std::numbers::pi * static_cast<double>(doy - 1) / 365.0;
    const double eccentricity = 1.000110 + 0.034221 * std::cos(g) + 0.001280 * std::sin(g) +
                                0.000719 * std::cos(2.0 * g) + 0.000077 * std::sin(2.0 * g);
    const double declination = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                               0.006758 * std::cos(2.0 * g) + 0.000907 * std::sin(2.0 * g) -
                               0.002697 * std::cos(3.0 * g) + 0.00148 * std::sin(3.0 * g);
    const double phi = lat_deg * kDeg;
    const double sunset = std::acos(std::clamp(-std::tan(phi) * std::tan(declination), -1.0, 1.0));
    const double h = 24.0 / std::numbers::pi * kSolarConstant * eccentricity *
                     (std::cos(phi) * std::cos(declination) * std::sin(sunset) +
                      sunset * std::sin(phi) * std::sin(declination));
    return std::max(0.0, h);
}

void WeatherGenConfig::validate() const {
    grid.validate();
    if (std::abs(grid.lat_min) > kMaxLatitude || std::abs(grid.lat_max) > kMaxLatitude) {
        throw ValidationError("weather grid must stay within |lat| <= 66.5");
    }
    if (end < start) {
        throw ValidationError("weather period end precedes start");
    }
    if (!(k_min > 0.0 && k_min <= k_max && k_max <= 1.0)) {
        throw ValidationError(fmt::format("clearness range must satisfy 0 < k_min <= k_max <= 1 (got {}, {})",
                                          k_min, k_max));
    }
    if (!(persistence >= 0.0 && persistence < 1.0) || !(t_persistence >= 0.0 && t_persistence < 1.0)) {
        throw ValidationError("persistence must lie in [0, 1)");
    }
    if (north_variability_gain < 1.0) {
        throw ValidationError("north_variability_gain must be >= 1");
    }
    if (correlation_length_deg < 0.0 || k_std < 0.0 || t_noise_std < 0.0) {
        throw ValidationError("length scales and noise levels must be non-negative");
    }
}

void ForecastDegradationConfig::validate() const {
    if (!(correlation_decay >= 0.0 && correlation_decay < 1.0)) {
        throw ValidationError("correlation_decay must lie in [0, 1)");
    }
    if (iqr_growth < 0.0 || base_spread < 0.0 || noise_length_deg < 0.0 || t2m_noise_scale < 0.0) {
        throw ValidationError("degradation rates and scales must be non-negative");
    }
    if (max_lead < 1) {
        throw ValidationError("max_lead must be >= 1");
    }
}

double ForecastDegradationConfig::target_correlation(int lead) const {
    return std::pow(1.0 - correlation_decay, lead);
}

double ForecastDegradationConfig::correlation_spread(int lead) const {
    return base_spread * std::pow(1.0 + iqr_growth, lead - 1);
}

std::vector<double> correlated_noise(std::size_t n_lat, std::size_t n_lon, double length_lat_cells,
                                     double length_lon_cells, Rng& rng) {
    std::size_t pad_i = 0;
    std::size_t pad_j = 0;
    const auto wi = gaussian_weights(length_lat_cells, pad_i);
    const auto wj = gaussian_weights(length_lon_cells, pad_j);
    const std::size_t rows = n_lat + 2 * pad_i;
    const std::size_t cols = n_lon + 2 * pad_j;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> white(rows * cols);
    for (double& v : white) {
        v = normal(rng);
    }
    // Smooth along longitude, then latitude.
    std::vector<double> tmp(rows * n_lon, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < n_lon; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < wj.size(); ++k) {
                acc += wj[k] * white[r * cols + j + k];
            }
            tmp[r * n_lon + j] = acc;
        }
    }
    std::vector<double> out(n_lat * n_lon, 0.0);
    for (std::size_t i = 0; i < n_lat; ++i) {
        for (std::size_t j = 0; j < n_lon; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < wi.size(); ++k) {
                acc += wi[k] * tmp[(i + k) * n_lon + j];
            }
            out[i * n_lon + j] = acc;
        }
    }
    return out;
}

ObservedWeather generate_observations(const WeatherGenConfig& cfg) {
    cfg.validate();
    const GridSpec& g = cfg.grid;
    const std::size_t n_days = cfg.n_days();
    const std::size_t cells = g.cells();
    const double len_i = cfg.correlation_length_deg / g.lat_step();
    const double len_j = cfg.correlation_length_deg / g.lon_step();

    Rng cloud_rng(derive_seed(cfg.seed, "cloud"));
    Rng temp_rng(derive_seed(cfg.seed, "t2m"));

    std::vector<double> k_mean_lat(g.n_lat);
    std::vector<double> k_std_lat(g.n_lat);
    std::vector<double> t_mean_lat(g.n_lat);
    for (std::size_t i = 0; i < g.n_lat; ++i) {
        const double lat = g.lat_at(i);
        const double f = axis_fraction(lat, g);
        k_mean_lat[i] = cfg.k_mean_south + (cfg.k_mean_north - cfg.k_mean_south) * f;
        k_std_lat[i] = cfg.k_std * std::pow(cfg.north_variability_gain, f);
        t_mean_lat[i] = cfg.t_mean_south + cfg.t_lapse_per_deg * (lat - g.lat_min);
    }

    std::vector<double> ssr(n_days * cells);
    std::vector<double> t2m(n_days * cells);
    std::vector<double> cloud_state(cells, 0.0);
    std::vector<double> temp_state(cells, 0.0);
    const double cloud_innov = std::sqrt(1.0 - cfg.persistence * cfg.persistence);
    const double temp_innov = std::sqrt(1.0 - cfg.t_persistence * cfg.t_persistence);

    for (std::size_t d = 0; d < n_days; ++d) {
        const Date date = add_days(cfg.start, static_cast<long>(d));
        const int doy = day_of_year(date);
        const auto e_cloud = correlated_noise(g.n_lat, g.n_lon, len_i, len_j, cloud_rng);
        const auto e_temp = correlated_noise(g.n_lat, g.n_lon, len_i, len_j, temp_rng);
        for (std::size_t c = 0; c < cells; ++c) {
            if (d == 0) {
                cloud_state[c] = e_cloud[c];
                temp_state[c] = e_temp[c];
            } else {
                cloud_state[c] = cfg.persistence * cloud_state[c] + cloud_innov * e_cloud[c];
                temp_state[c] = cfg.t_persistence * temp_state[c] + temp_innov * e_temp[c];
            }
        }
        const double season_k =
            cfg.k_seasonal_amplitude * std::cos(2.0 * std::numbers::pi * (doy - 172.0) / kYearDays);
        const double season_t =
            cfg.t_amplitude * std::cos(2.0 * std::numbers::pi * (doy - cfg.t_warmest_day) / kYearDays);
        for (std::size_t i = 0; i < g.n_lat; ++i) {
            const double h0 = clear_sky_insolation(g.lat_at(i), doy);
            for (std::size_t j = 0; j < g.n_lon; ++j) {
                const std::size_t c = i * g.n_lon + j;
                const double k = std::clamp(k_mean_lat[i] + season_k + k_std_lat[i] * cloud_state[c],
                                            cfg.k_min, cfg.k_max);
                ssr[d * cells + c] = h0 * k;
                t2m[d * cells + c] = t_mean_lat[i] + season_t + cfg.t_noise_std * temp_state[c] +
                                     cfg.t_cloud_coupling * cloud_state[c];
            }
        }
    }
    return ObservedWeather{GridField(g, Variable::ssr, cfg.start, n_days, std::move(ssr), 0),
                           GridField(g, Variable::t2m, cfg.start, n_days, std::move(t2m), 0)};
}

GridField degrade_forecast(const GridField& obs, int lead, const ForecastDegradationConfig& cfg) {
    cfg.validate();
    if (lead < 1 || lead > cfg.max_lead) {
        throw LeadOutOfRange(fmt::format("lead {} outside 1..{}", lead, cfg.max_lead));
    }
    if (obs.lead_days() != 0) {
        throw ValidationError("degrade_forecast expects an observation field (lead 0)");
    }
    const GridSpec& g = obs.spec();
    const std::size_t cells = g.cells();
    const auto n = static_cast<double>(cells);
    const bool is_ssr = obs.variable() == Variable::ssr;
    const double scale = is_ssr ? 1.0 : cfg.t2m_noise_scale;
    const double len_i = cfg.noise_length_deg / g.lat_step();
    const double len_j = cfg.noise_length_deg / g.lon_step();
    const double target = cfg.target_correlation(lead);
    const double spread = cfg.correlation_spread(lead);

    Rng rng(derive_seed(cfg.seed, to_string(obs.variable()), static_cast<std::uint64_t>(lead)));
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> out(obs.values().begin(), obs.values().end());
    std::vector<double> z(cells);
    for (std::size_t d = 0; d < obs.n_days(); ++d) {
        const double rho = std::clamp(target + spread * normal(rng), -1.0, 1.0);
        auto eta = correlated_noise(g.n_lat, g.n_lon, len_i, len_j, rng);
        const auto x = obs.day_values(d);

        double mean = 0.0;
        for (double v : x) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : x) {
            var += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(var / n);
        if (sd <= 0.0) {
            continue;
        }
        for (std::size_t c = 0; c < cells; ++c) {
            z[c] = (x[c] - mean) / sd;
        }
        // Make the noise orthogonal to the anomaly with zero mean and unit variance.
        double eta_mean = 0.0;
        for (double v : eta) {
            eta_mean += v;
        }
        eta_mean /= n;
        double proj = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            eta[c] -= eta_mean;
            proj += eta[c] * z[c];
        }
        proj /= n;
        double eta_var = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            eta[c] -= proj * z[c];
            eta_var += eta[c] * eta[c];
        }
        const double eta_sd = std::sqrt(eta_var / n);
        const double mix = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        for (std::size_t c = 0; c < cells; ++c) {
            const double noise = eta_sd > 0.0 ? eta[c] / eta_sd : 0.0;
            double v = x[c] + scale * sd * ((rho - 1.0) * z[c] + mix * noise);
            if (is_ssr) {
                v = std::max(0.0, v);
            }
            out[d * cells + c] = v;
        }
    }
    return GridField(g, obs.variable(), obs.first_day(), obs.n_days(), std::move(out), lead);
}

} // namespace pvfc
