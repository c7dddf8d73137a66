#include "pvfc/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "pvfc/metrics.hpp"

namespace pvfc {

double silverman_bandwidth(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw TooFewSamples(fmt::format("kernel density needs at least 2 values, got {}", n));
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        throw ZeroVariance("kernel density of constant data");
    }
    const double iqr = interquartile_range(values) / 1.34;
    const double spread = iqr > 0.0 ? std::min(sd, iqr) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double DensityCurve::integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        s += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
    }
    return s;
}

DensityCurve kde_density_on(std::span<const double> values, std::span<const double> grid, double bandwidth) {
    const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(values);
    DensityCurve c;
    c.bandwidth = h;
    c.x.assign(grid.begin(), grid.end());
    c.density.assign(grid.size(), 0.0);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = 0.0;
        for (double v : values) {
            const double u = (grid[g] - v) / h;
            s += std::exp(-0.5 * u * u);
        }
        c.density[g] = s * norm;
    }
    return c;
}

DensityCurve kde_density(std::span<const double> values, double bandwidth, std::size_t points) {
    if (points < 2) {
        throw ValidationError("density grid needs at least 2 points");
    }
    const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(values);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - 4.0 * h;
    const double hi = *hi_it + 4.0 * h;
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return kde_density_on(values, grid, h);
}

std::size_t count_modes(const DensityCurve& curve, double min_relative_height) {
    const auto& d = curve.density;
    if (d.size() < 3) {
        return 0;
    }
    const double peak = *std::max_element(d.begin(), d.end());
    std::size_t modes = 0;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] > min_relative_height * peak) {
            ++modes;
        }
    }
    return modes;
}

} // namespace pvfc
