#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvfc {

/// Error summary used throughout the evaluation. `mdape` and `iqr` are in
/// percent and computed over the retained (non-excluded) samples only;
/// `pearson_r` is NaN when either series is constant.
struct MetricSet {
    double mdape = 0.0;
    double pearson_r = 0.0;
    double iqr = 0.0;
    std::size_t n_samples = 0;
};

/// |100 (p - y) / y| for every sample with y != 0 and |y| >= y_floor.
std::vector<double> absolute_percentage_errors(std::span<const double> predictions, std::span<const double> targets,
                                               double y_floor = 0.0);

/// Median absolute percentage error (%). Throws LengthMismatch, or
/// ExcludedAll when no sample survives the floor.
double mdape(std::span<const double> predictions, std::span<const double> targets, double y_floor = 0.0);

/// Linear-interpolation quantile (the "type 7" definition), q in [0, 1].
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);
double interquartile_range(std::span<const double> values);

/// Pearson correlation. Throws LengthMismatch or ZeroVariance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

MetricSet compute_metrics(std::span<const double> predictions, std::span<const double> targets, double y_floor = 0.0);

/// Same as above with one exclusion floor per sample.
MetricSet compute_metrics(std::span<const double> predictions, std::span<const double> targets,
                          std::span<const double> floors);

} // namespace pvfc
