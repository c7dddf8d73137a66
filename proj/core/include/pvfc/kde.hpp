#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvfc {

/// Silverman's rule of thumb, 0.9 * min(sd, IQR / 1.34) * n^(-1/5), with the
/// sample standard deviation. Falls back to sd when the IQR is zero.
/// Throws TooFewSamples for n < 2 and ZeroVariance for constant data.
double silverman_bandwidth(std::span<const double> values);

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;

    /// Trapezoid integral over the evaluation grid.
    double integral() const;
};

/// Gaussian kernel density evaluated on `points` equally spaced nodes over
/// [min - 4h, max + 4h]. A non-positive `bandwidth` selects Silverman's rule.
DensityCurve kde_density(std::span<const double> values, double bandwidth = 0.0, std::size_t points = 512);

/// Same estimator on a caller-supplied grid, so several curves can share one axis.
DensityCurve kde_density_on(std::span<const double> values, std::span<const double> grid, double bandwidth = 0.0);

/// Strict interior local maxima of the curve whose height exceeds
/// `min_relative_height` times the global maximum.
std::size_t count_modes(const DensityCurve& curve, double min_relative_height = 0.01);

} // namespace pvfc
