#include "pvfc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "pvfc/random.hpp"
#include "pvfc/weather.hpp"
#include "text_table.hpp"

namespace pvfc {

namespace {

struct RegionSpec {
    Region region;
    std::size_t count;
    double total_mw;
    double lat_lo, lat_hi, lon_lo, lon_hi;
};

// Rough bounding boxes of northern and peninsular/insular Italy.
constexpr RegionSpec kNorth{Region::north, 34, 127.0, 44.90, 46.50, 7.0, 13.5};
constexpr RegionSpec kSouth{Region::south, 31, 288.0, 37.00, 44.75, 8.5, 17.5};

constexpr int kMinRecordDays = 550;
constexpr int kMaxRecordDays = 731;

// Daily-mean air temperature above which the fleet's modules start to lose
// efficiency; module temperatures run well above the air on sunny days.
constexpr double kFleetDerateThresholdC = 20.0;

void add_region(Fleet& fleet, const RegionSpec& spec, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::lognormal_distribution<double> size(0.0, 0.6);
    std::uniform_int_distribution<int> record(kMinRecordDays, kMaxRecordDays);

    std::vector<Plant> plants(spec.count);
    double total = 0.0;
    const char prefix = spec.region == Region::north ? 'N' : 'S';
    for (std::size_t k = 0; k < spec.count; ++k) {
        Plant& p = plants[k];
        p.id = fmt::format("{}{:02d}", prefix, k + 1);
        p.lat = spec.lat_lo + (spec.lat_hi - spec.lat_lo) * unit(rng);
        p.lon = spec.lon_lo + (spec.lon_hi - spec.lon_lo) * unit(rng);
        p.capacity_mw = size(rng);
        p.efficiency = 0.13 + 0.06 * unit(rng);
        p.derate_threshold_c = kFleetDerateThresholdC;
        p.derate_slope = 0.015 + 0.020 * unit(rng);
        p.noise_std = 0.03 + 0.04 * unit(rng);
        p.record_days = record(rng);
        total += p.capacity_mw;
    }
    const double scale = spec.total_mw / total;
    for (Plant& p : plants) {
        p.capacity_mw *= scale;
        fleet.plants.push_back(std::move(p));
    }
}

} // namespace

std::string_view to_string(Region r) {
    return r == Region::north ? "North" : "South";
}

Region parse_region(std::string_view text) {
    if (text == "North") {
        return Region::north;
    }
    if (text == "South") {
        return Region::south;
    }
    throw ValidationError(fmt::format("unknown region '{}'", text));
}

void Plant::validate() const {
    if (id.empty() || id.find(',') != std::string::npos) {
        throw ValidationError("plant id must be non-empty and contain no commas");
    }
    if (!(capacity_mw > 0.0)) {
        throw ValidationError(fmt::format("plant {}: capacity must be positive", id));
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw ValidationError(fmt::format("plant {}: efficiency must lie in (0, 1]", id));
    }
    if (!(derate_slope >= 0.0 && derate_slope < 0.05)) {
        throw ValidationError(fmt::format("plant {}: derate slope must lie in [0, 0.05)", id));
    }
    if (noise_std < 0.0) {
        throw ValidationError(fmt::format("plant {}: noise_std must be non-negative", id));
    }
    if (record_days < 1) {
        throw ValidationError(fmt::format("plant {}: record_days must be positive", id));
    }
}

std::size_t Fleet::count(Region r) const {
    return static_cast<std::size_t>(
        std::count_if(plants.begin(), plants.end(), [r](const Plant& p) { return p.region() == r; }));
}

double Fleet::capacity(Region r) const {
    double total = 0.0;
    for (const Plant& p : plants) {
        if (p.region() == r) {
            total += p.capacity_mw;
        }
    }
    return total;
}

Fleet Fleet::subset(std::size_t n) const {
    if (n == 0 || n >= plants.size()) {
        return *this;
    }
    std::vector<const Plant*> north;
    std::vector<const Plant*> south;
    for (const Plant& p : plants) {
        (p.region() == Region::north ? north : south).push_back(&p);
    }
    Fleet out;
    std::size_t in = 0;
    std::size_t is = 0;
    while (out.plants.size() < n) {
        if (in < north.size() && (out.plants.size() % 2 == 0 || is >= south.size())) {
            out.plants.push_back(*north[in++]);
        } else {
            out.plants.push_back(*south[is++]);
        }
    }
    std::sort(out.plants.begin(), out.plants.end(), [](const Plant& a, const Plant& b) { return a.id < b.id; });
    return out;
}

double derate_factor(const Plant& plant, double t2m_c) {
    return std::max(0.0, 1.0 - plant.derate_slope * std::max(0.0, t2m_c - plant.derate_threshold_c));
}

double expected_production(const Plant& plant, double ssr, double t2m_c, const ProductionModel& model) {
    return plant.capacity_mw * plant.efficiency * (ssr / model.ssr_ref) * derate_factor(plant, t2m_c);
}

ProductionSeries simulate_production(const Plant& plant, const SiteSeries& ssr, const SiteSeries& t2m,
                                     std::uint64_t seed, const ProductionModel& model) {
    plant.validate();
    if (ssr.variable != Variable::ssr || t2m.variable != Variable::t2m) {
        throw ValidationError("simulate_production expects an SSR series and a T2M series");
    }
    if (ssr.first_day != t2m.first_day || ssr.size() != t2m.size()) {
        throw DateMismatch(fmt::format("plant {}: SSR and T2M series cover different dates", plant.id));
    }
    if (ssr.lead_days != 0 || t2m.lead_days != 0) {
        throw ValidationError("production is simulated from observations (lead 0) only");
    }
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    ProductionSeries out{plant.id, ssr.first_day, std::vector<double>(ssr.size())};
    for (std::size_t d = 0; d < ssr.size(); ++d) {
        const double eps = plant.noise_std * noise(rng);
        out.mwh[d] = std::max(0.0, expected_production(plant, ssr.values[d], t2m.values[d], model) * (1.0 + eps));
    }
    return out;
}

Fleet build_default_fleet(std::uint64_t seed) {
    Fleet fleet;
    Rng north_rng(derive_seed(seed, "fleet-north"));
    Rng south_rng(derive_seed(seed, "fleet-south"));
    add_region(fleet, kNorth, north_rng);
    add_region(fleet, kSouth, south_rng);
    return fleet;
}

double normalized_production(const Plant& plant, double mwh, Date day, const ProductionModel& model) {
    const double potential =
        plant.capacity_mw * plant.efficiency * clear_sky_insolation(plant.lat, day_of_year(day)) / model.ssr_ref;
    return potential > 0.0 ? mwh / potential : 0.0;
}

void store_fleet(const Fleet& fleet, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    out << "id,lat,lon,capacity_mw,efficiency,derate_threshold_c,derate_slope,noise_std,record_days,region\n";
    for (const Plant& p : fleet.plants) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", p.id, p.lat, p.lon, p.capacity_mw, p.efficiency,
                           p.derate_threshold_c, p.derate_slope, p.noise_std, p.record_days, to_string(p.region()));
    }
}

Fleet load_fleet(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput(path.string());
    }
    const std::string src = path.string();
    std::string line;
    if (!detail::read_line(in, line)) {
        throw ParseError(src, 1, "empty fleet file");
    }
    const auto pos = detail::column_positions(
        line,
        {"id", "lat", "lon", "capacity_mw", "efficiency", "derate_threshold_c", "derate_slope", "noise_std",
         "record_days"},
        src);
    Fleet fleet;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split_csv(line);
        const std::size_t needed = *std::max_element(pos.begin(), pos.end()) + 1;
        if (f.size() < needed) {
            throw ParseError(src, line_no, "too few fields");
        }
        Plant p;
        p.id = std::string(f[pos[0]]);
        p.lat = detail::parse_value<double>(f[pos[1]], src, line_no, "lat");
        p.lon = detail::parse_value<double>(f[pos[2]], src, line_no, "lon");
        p.capacity_mw = detail::parse_value<double>(f[pos[3]], src, line_no, "capacity_mw");
        p.efficiency = detail::parse_value<double>(f[pos[4]], src, line_no, "efficiency");
        p.derate_threshold_c = detail::parse_value<double>(f[pos[5]], src, line_no, "derate_threshold_c");
        p.derate_slope = detail::parse_value<double>(f[pos[6]], src, line_no, "derate_slope");
        p.noise_std = detail::parse_value<double>(f[pos[7]], src, line_no, "noise_std");
        p.record_days = detail::parse_value<int>(f[pos[8]], src, line_no, "record_days");
        try {
            p.validate();
        } catch (const ValidationError& e) {
            throw ParseError(src, line_no, e.what());
        }
        fleet.plants.push_back(std::move(p));
    }
    return fleet;
}

void store_production(const ProductionSeries& series, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    out << "plant_id,date,mwh\n";
    for (std::size_t d = 0; d < series.size(); ++d) {
        out << fmt::format("{},{},{}\n", series.plant_id, format_date(series.date(d)), series.mwh[d]);
    }
}

ProductionSeries load_production(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput(path.string());
    }
    const std::string src = path.string();
    std::string line;
    if (!detail::read_line(in, line)) {
        throw ParseError(src, 1, "empty production file");
    }
    const auto pos = detail::column_positions(line, {"plant_id", "date", "mwh"}, src);
    ProductionSeries out;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split_csv(line);
        if (f.size() < 3) {
            throw ParseError(src, line_no, "expected plant_id,date,mwh");
        }
        Date d{};
        try {
            d = parse_date(f[pos[1]]);
        } catch (const ValidationError& e) {
            throw ParseError(src, line_no, e.what());
        }
        const double v = detail::parse_value<double>(f[pos[2]], src, line_no, "mwh");
        if (v < 0.0) {
            throw ParseError(src, line_no, "production must be non-negative");
        }
        if (out.mwh.empty()) {
            out.plant_id = std::string(f[pos[0]]);
            out.first_day = d;
        } else if (d != out.date(out.mwh.size())) {
            throw ParseError(src, line_no, fmt::format("expected date {}, found {}",
                                                       format_date(out.date(out.mwh.size())), f[pos[1]]));
        }
        out.mwh.push_back(v);
    }
    if (out.mwh.empty()) {
        throw ParseError(src, line_no, "no production rows");
    }
    return out;
}

} // namespace pvfc
