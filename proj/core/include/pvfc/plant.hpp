#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pvfc/grid.hpp"

namespace pvfc {

enum class Region { north, south };

/// Plants strictly above 44 deg 50' N are North.
inline constexpr double kNorthSouthBoundaryLat = 44.0 + 50.0 / 60.0;

std::string_view to_string(Region r);
Region parse_region(std::string_view text);
inline Region region_of(double lat) { return lat > kNorthSouthBoundaryLat ? Region::north : Region::south; }

struct Plant {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    double capacity_mw = 1.0;
    double efficiency = 0.15;
    double derate_threshold_c = 25.0;
    double derate_slope = 0.0;  ///< fractional loss per degree C above the threshold
    double noise_std = 0.0;  ///< multiplicative daily noise, fraction of output
    int record_days = 731;  ///< length of the production record, counted back from the period end

    Region region() const { return region_of(lat); }
    void validate() const;
};

struct Fleet {
    std::vector<Plant> plants;

    std::size_t count(Region r) const;
    double capacity(Region r) const;
    /// Deterministic subset of `n` plants alternating between regions in id order.
    Fleet subset(std::size_t n) const;
};

struct ProductionSeries {
    std::string plant_id;
    Date first_day{};
    std::vector<double> mwh;

    std::size_t size() const noexcept { return mwh.size(); }
    Date date(std::size_t k) const { return add_days(first_day, static_cast<long>(k)); }
    Date last_day() const { return add_days(first_day, static_cast<long>(mwh.size()) - 1); }
};

struct ProductionModel {
    double ssr_ref = 6000.0;  ///< Wh/m^2/day mapping to nameplate * efficiency
};

/// Temperature derating factor 1 - slope * max(0, T - threshold), floored at 0.
double derate_factor(const Plant& plant, double t2m_c);

/// Noiseless daily output for one day (MWh/day).
double expected_production(const Plant& plant, double ssr, double t2m_c, const ProductionModel& model = {});

/// Daily production y = capacity * efficiency * (ssr / ssr_ref) * derate(T) * (1 + noise),
/// clipped at 0. Both inputs must be lead-0 series on identical dates
/// (DateMismatch otherwise).
ProductionSeries simulate_production(const Plant& plant, const SiteSeries& ssr, const SiteSeries& t2m,
                                     std::uint64_t seed, const ProductionModel& model = {});

/// 65-plant fleet: 34 North plants totalling 127 MW and 31 South plants totalling 288 MW.
Fleet build_default_fleet(std::uint64_t seed);

/// Production divided by the site's top-of-atmosphere potential,
/// capacity * efficiency * H0(lat, doy) / ssr_ref.
double normalized_production(const Plant& plant, double mwh, Date day, const ProductionModel& model = {});

void store_fleet(const Fleet& fleet, const std::filesystem::path& path);
Fleet load_fleet(const std::filesystem::path& path);
void store_production(const ProductionSeries& series, const std::filesystem::path& path);
ProductionSeries load_production(const std::filesystem::path& path);

} // namespace pvfc
