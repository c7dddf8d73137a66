#pragma once

#include <array>
#include <span>
#include <vector>

namespace pvfc {

/// One plant-day: daily SSR (Wh/m^2/day), mean 2 m temperature (C) and
/// production (MWh/day).
struct Sample {
    double ssr = 0.0;
    double t = 0.0;
    double y = 0.0;
};

using Feature = std::array<double, 2>;

/// Per-feature z-score fitted on training data only.
class Scaler {
public:
    Scaler() = default;
    Scaler(Feature mean, Feature std);

    /// Throws DegenerateFeature when a feature has zero spread.
    static Scaler fit(std::span<const Sample> samples);

    Feature transform(double ssr, double t) const {
        return {(ssr - mean_[0]) / std_[0], (t - mean_[1]) / std_[1]};
    }
    std::vector<Feature> transform(std::span<const Sample> samples) const;

    const Feature& mean() const noexcept { return mean_; }
    const Feature& std() const noexcept { return std_; }

private:
    Feature mean_{0.0, 0.0};
    Feature std_{1.0, 1.0};
};

std::vector<double> targets(std::span<const Sample> samples);

} // namespace pvfc
