#include "pvfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) {
        throw LengthMismatch(fmt::format("series lengths differ: {} vs {}", a, b));
    }
}

bool retained(double y, double floor) {
    return y != 0.0 && std::abs(y) >= floor;
}

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            r[order[k]] = avg;
        }
        i = j + 1;
    }
    return r;
}

MetricSet summarize(std::vector<double> ape, std::span<const double> predictions, std::span<const double> targets) {
    if (ape.empty()) {
        throw ExcludedAll("every sample was excluded by the MdAPE floor");
    }
    std::sort(ape.begin(), ape.end());
    MetricSet m;
    m.n_samples = ape.size();
    m.mdape = quantile(ape, 0.5);
    m.iqr = quantile(ape, 0.75) - quantile(ape, 0.25);
    try {
        m.pearson_r = pearson(predictions, targets);
    } catch (const ZeroVariance&) {
        m.pearson_r = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

} // namespace

std::vector<double> absolute_percentage_errors(std::span<const double> predictions, std::span<const double> targets,
                                               double y_floor) {
    check_lengths(predictions.size(), targets.size());
    std::vector<double> ape;
    ape.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (retained(targets[i], y_floor)) {
            ape.push_back(std::abs(100.0 * (predictions[i] - targets[i]) / targets[i]));
        }
    }
    return ape;
}

double mdape(std::span<const double> predictions, std::span<const double> targets, double y_floor) {
    const auto ape = absolute_percentage_errors(predictions, targets, y_floor);
    if (ape.empty()) {
        throw ExcludedAll(fmt::format("all {} samples fall below the MdAPE floor {}", targets.size(), y_floor));
    }
    return median(ape);
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) {
        throw TooFewSamples("quantile of an empty series");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return frac == 0.0 ? v[lo] : v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::span<const double> values) {
    return quantile(values, 0.5);
}

double interquartile_range(std::span<const double> values) {
    return quantile(values, 0.75) - quantile(values, 0.25);
}

double pearson(std::span<const double> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    if (a.size() < 2) {
        throw ZeroVariance("pearson needs at least two samples");
    }
    const auto n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        throw ZeroVariance("pearson correlation of a constant series");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(std::span<const double> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    return pearson(ra, rb);
}

MetricSet compute_metrics(std::span<const double> predictions, std::span<const double> targets, double y_floor) {
    return summarize(absolute_percentage_errors(predictions, targets, y_floor), predictions, targets);
}

MetricSet compute_metrics(std::span<const double> predictions, std::span<const double> targets,
                          std::span<const double> floors) {
    check_lengths(predictions.size(), targets.size());
    check_lengths(floors.size(), targets.size());
    std::vector<double> ape;
    ape.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (retained(targets[i], floors[i])) {
            ape.push_back(std::abs(100.0 * (predictions[i] - targets[i]) / targets[i]));
        }
    }
    return summarize(std::move(ape), predictions, targets);
}

} // namespace pvfc
