#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pvfc/date.hpp"

namespace pvfc {

enum class Variable { ssr, t2m };

std::string_view to_string(Variable v);
Variable parse_variable(std::string_view text);

/// Node-registered regular lat/lon grid. Node (i, j) sits at
/// (lat_min + i * lat_step, lon_min + j * lon_step).
struct GridSpec {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;
    std::size_t n_lat = 0;
    std::size_t n_lon = 0;

    void validate() const;

    double lat_step() const { return (lat_max - lat_min) / static_cast<double>(n_lat - 1); }
    double lon_step() const { return (lon_max - lon_min) / static_cast<double>(n_lon - 1); }
    double lat_at(std::size_t i) const { return lat_min + static_cast<double>(i) * lat_step(); }
    double lon_at(std::size_t j) const { return lon_min + static_cast<double>(j) * lon_step(); }
    std::size_t cells() const { return n_lat * n_lon; }
    bool contains(double lat, double lon) const;

    bool operator==(const GridSpec&) const = default;
};

/// Daily values of one variable on a grid, stored day-major then lat-major.
/// Immutable once constructed.
class GridField {
public:
    GridField(GridSpec spec, Variable variable, Date first_day, std::size_t n_days,
              std::vector<double> values, int lead_days = 0);

    const GridSpec& spec() const noexcept { return spec_; }
    Variable variable() const noexcept { return variable_; }
    int lead_days() const noexcept { return lead_days_; }
    Date first_day() const noexcept { return first_day_; }
    Date last_day() const noexcept { return add_days(first_day_, static_cast<long>(n_days_) - 1); }
    std::size_t n_days() const noexcept { return n_days_; }
    Date date(std::size_t k) const { return add_days(first_day_, static_cast<long>(k)); }
    std::optional<std::size_t> day_index(Date d) const;

    double at(std::size_t day, std::size_t i, std::size_t j) const {
        return values_[(day * spec_.n_lat + i) * spec_.n_lon + j];
    }
    std::span<const double> day_values(std::size_t day) const {
        return std::span<const double>(values_).subspan(day * spec_.cells(), spec_.cells());
    }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const GridField&) const = default;

private:
    GridSpec spec_;
    Variable variable_;
    Date first_day_;
    std::size_t n_days_;
    std::vector<double> values_;
    int lead_days_;
};

/// A daily series at a point, obtained by interpolating a GridField.
struct SiteSeries {
    double lat = 0.0;
    double lon = 0.0;
    Variable variable = Variable::ssr;
    Date first_day{};
    std::vector<double> values;
    int lead_days = 0;

    std::size_t size() const noexcept { return values.size(); }
    Date date(std::size_t k) const { return add_days(first_day, static_cast<long>(k)); }
};

/// Per-cell statistic laid out lat-major like one day of a GridField.
struct CellMap {
    GridSpec spec;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * spec.n_lon + j]; }
};

/// Bilinear interpolation from the four enclosing nodes, with weights in index
/// space. Throws OutOfDomain outside the node hull.
SiteSeries bilinear_interpolate(const GridField& field, double lat, double lon);

/// Population std / mean of each cell's time series. Temperature is converted
/// to Kelvin first. Throws DegenerateCell if a cell mean falls below `mean_floor`.
CellMap coefficient_of_variation(const GridField& field, double mean_floor = 1e-9);

/// Pearson correlation across all cells of one day. Throws ShapeMismatch if
/// the fields are not comparable, ZeroVariance if either day is spatially flat.
double spatial_correlation(const GridField& a, const GridField& b, Date day);

} // namespace pvfc
