#include "pvfc/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

constexpr double kKelvinOffset = 273.15;
constexpr double kNodeSnap = 1e-9;

struct CellIndex {
    std::size_t lower;
    double frac;
};

// Fractional index of `x` along an axis; snaps to a node when within
// round-off so that node queries reproduce stored values exactly.
CellIndex locate(double x, double x0, double step, std::size_t n) {
    double fi = (x - x0) / step;
    const double nearest = std::round(fi);
    if (std::abs(fi - nearest) < kNodeSnap) {
        fi = nearest;
    }
    const auto last = static_cast<double>(n - 1);
    auto lower = static_cast<std::size_t>(std::min(std::floor(fi), last - 1.0));
    return {lower, fi - static_cast<double>(lower)};
}

} // namespace

std::string_view to_string(Variable v) {
    switch (v) {
    case Variable::ssr:
        return "ssr";
    case Variable::t2m:
        return "t2m";
    }
    return "?";
}

Variable parse_variable(std::string_view text) {
    if (text == "ssr") {
        return Variable::ssr;
    }
    if (text == "t2m") {
        return Variable::t2m;
    }
    throw ValidationError(fmt::format("unknown variable '{}'", text));
}

void GridSpec::validate() const {
    if (!(lat_min < lat_max) || !(lon_min < lon_max)) {
        throw ValidationError(fmt::format("grid bounds must satisfy min < max (lat {}..{}, lon {}..{})",
                                          lat_min, lat_max, lon_min, lon_max));
    }
    if (n_lat < 2 || n_lon < 2) {
        throw ValidationError(fmt::format("grid needs at least 2x2 nodes, got {}x{}", n_lat, n_lon));
    }
}

bool GridSpec::contains(double lat, double lon) const {
    const double lat_tol = kNodeSnap * lat_step();
    const double lon_tol = kNodeSnap * lon_step();
    return lat >= lat_min - lat_tol && lat <= lat_max + lat_tol && lon >= lon_min - lon_tol &&
           lon <= lon_max + lon_tol;
}

GridField::GridField(GridSpec spec, Variable variable, Date first_day, std::size_t n_days,
                     std::vector<double> values, int lead_days)
    : spec_(spec),
      variable_(variable),
      first_day_(first_day),
      n_days_(n_days),
      values_(std::move(values)),
      lead_days_(lead_days) {
    spec_.validate();
    if (n_days_ == 0) {
        throw ValidationError("grid field must cover at least one day");
    }
    if (values_.size() != n_days_ * spec_.cells()) {
        throw ShapeMismatch(fmt::format("grid field expects {} values ({} days x {} cells), got {}",
                                        n_days_ * spec_.cells(), n_days_, spec_.cells(), values_.size()));
    }
    if (lead_days_ < 0) {
        throw ValidationError("lead_days must be >= 0");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ValidationError("grid field contains non-finite values");
        }
        if (variable_ == Variable::ssr && v < 0.0) {
            throw ValidationError("SSR values must be non-negative");
        }
    }
}

std::optional<std::size_t> GridField::day_index(Date d) const {
    const long k = days_between(first_day_, d);
    if (k < 0 || static_cast<std::size_t>(k) >= n_days_) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(k);
}

SiteSeries bilinear_interpolate(const GridField& field, double lat, double lon) {
    const GridSpec& g = field.spec();
    if (!g.contains(lat, lon)) {
        throw OutOfDomain(fmt::format("point ({}, {}) lies outside grid [{}, {}] x [{}, {}]", lat, lon,
                                      g.lat_min, g.lat_max, g.lon_min, g.lon_max));
    }
    const CellIndex li = locate(lat, g.lat_min, g.lat_step(), g.n_lat);
    const CellIndex lj = locate(lon, g.lon_min, g.lon_step(), g.n_lon);
    const double t = std::clamp(li.frac, 0.0, 1.0);
    const double u = std::clamp(lj.frac, 0.0, 1.0);
    const double w00 = (1.0 - t) * (1.0 - u);
    const double w01 = (1.0 - t) * u;
    const double w10 = t * (1.0 - u);
    const double w11 = t * u;

    SiteSeries out;
    out.lat = lat;
    out.lon = lon;
    out.variable = field.variable();
    out.first_day = field.first_day();
    out.lead_days = field.lead_days();
    out.values.resize(field.n_days());
    const std::size_t i = li.lower;
    const std::size_t j = lj.lower;
    for (std::size_t d = 0; d < field.n_days(); ++d) {
        out.values[d] = w00 * field.at(d, i, j) + w01 * field.at(d, i, j + 1) +
                        w10 * field.at(d, i + 1, j) + w11 * field.at(d, i + 1, j + 1);
    }
    return out;
}

CellMap coefficient_of_variation(const GridField& field, double mean_floor) {
    const GridSpec& g = field.spec();
    const double offset = field.variable() == Variable::t2m ? kKelvinOffset : 0.0;
    const auto n = static_cast<double>(field.n_days());
    CellMap out{g, std::vector<double>(g.cells(), 0.0)};
    for (std::size_t c = 0; c < g.cells(); ++c) {
        double sum = 0.0;
        for (std::size_t d = 0; d < field.n_days(); ++d) {
            sum += field.day_values(d)[c] + offset;
        }
        const double mean = sum / n;
        if (std::abs(mean) < mean_floor) {
            throw DegenerateCell(fmt::format("cell ({}, {}) has mean {} below floor {}", c / g.n_lon,
                                             c % g.n_lon, mean, mean_floor));
        }
        double ss = 0.0;
        for (std::size_t d = 0; d < field.n_days(); ++d) {
            const double dv = field.day_values(d)[c] + offset - mean;
            ss += dv * dv;
        }
        out.values[c] = std::sqrt(ss / n) / std::abs(mean);
    }
    return out;
}

double spatial_correlation(const GridField& a, const GridField& b, Date day) {
    if (a.spec() != b.spec() || a.variable() != b.variable()) {
        throw ShapeMismatch("spatial correlation needs fields on the same grid and variable");
    }
    const auto ka = a.day_index(day);
    const auto kb = b.day_index(day);
    if (!ka || !kb) {
        throw ShapeMismatch(fmt::format("day {} not present in both fields", format_date(day)));
    }
    const auto xa = a.day_values(*ka);
    const auto xb = b.day_values(*kb);
    const auto n = static_cast<double>(xa.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t c = 0; c < xa.size(); ++c) {
        ma += xa[c];
        mb += xb[c];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t c = 0; c < xa.size(); ++c) {
        const double da = xa[c] - ma;
        const double db = xb[c] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        throw ZeroVariance(fmt::format("spatially constant field on {}", format_date(day)));
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

} // namespace pvfc
