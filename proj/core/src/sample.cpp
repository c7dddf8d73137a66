#include "pvfc/sample.hpp"

#include <cmath>

#include "pvfc/errors.hpp"

namespace pvfc {

Scaler::Scaler(Feature mean, Feature std) : mean_(mean), std_(std) {
    if (!(std_[0] > 0.0) || !(std_[1] > 0.0)) {
        throw DegenerateFeature("scaler standard deviations must be positive");
    }
}

Scaler Scaler::fit(std::span<const Sample> samples) {
    if (samples.empty()) {
        throw TooFewSamples("cannot fit a scaler on zero samples");
    }
    const auto n = static_cast<double>(samples.size());
    Feature mean{0.0, 0.0};
    for (const Sample& s : samples) {
        mean[0] += s.ssr;
        mean[1] += s.t;
    }
    mean[0] /= n;
    mean[1] /= n;
    Feature var{0.0, 0.0};
    for (const Sample& s : samples) {
        var[0] += (s.ssr - mean[0]) * (s.ssr - mean[0]);
        var[1] += (s.t - mean[1]) * (s.t - mean[1]);
    }
    const Feature sd{std::sqrt(var[0] / n), std::sqrt(var[1] / n)};
    if (!(sd[0] > 0.0)) {
        throw DegenerateFeature("SSR has zero variance in the training data");
    }
    if (!(sd[1] > 0.0)) {
        throw DegenerateFeature("temperature has zero variance in the training data");
    }
    return Scaler(mean, sd);
}

std::vector<Feature> Scaler::transform(std::span<const Sample> samples) const {
    std::vector<Feature> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        out.push_back(transform(s.ssr, s.t));
    }
    return out;
}

std::vector<double> targets(std::span<const Sample> samples) {
    std::vector<double> y;
    y.reserve(samples.size());
    for (const Sample& s : samples) {
        y.push_back(s.y);
    }
    return y;
}

} // namespace pvfc
