#pragma once

#include <span>

#include "pvfc/sample.hpp"

namespace pvfc {

/// y = a1 * ssr + a2 * t + a3 in original units.
struct LinearModel {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;

    double raw(double ssr, double t) const { return a1 * ssr + a2 * t + a3; }
    /// Prediction clipped at zero.
    double predict(double ssr, double t) const;
};

/// Ordinary least squares via column-pivoted QR on the column-scaled design
/// matrix. Throws TooFewSamples (< 3) and RankDeficient.
LinearModel fit_ols(std::span<const Sample> samples);

} // namespace pvfc
