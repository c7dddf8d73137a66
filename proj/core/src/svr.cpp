#include "pvfc/svr.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

void SvrHyperParams::validate() const {
    if (!(c > 0.0) || !(epsilon >= 0.0) || !(gamma > 0.0)) {
        throw ValidationError(fmt::format("invalid SVR hyperparameters C={} eps={} gamma={}", c, epsilon, gamma));
    }
}

TargetScale TargetScale::fit(std::span<const Sample> samples) {
    if (samples.empty()) {
        throw TooFewSamples("cannot scale an empty target");
    }
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (const Sample& s : samples) {
        mean += s.y;
    }
    mean /= n;
    double var = 0.0;
    for (const Sample& s : samples) {
        var += (s.y - mean) * (s.y - mean);
    }
    const double sd = std::sqrt(var / n);
    return TargetScale{mean, sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0};
}

SvrModel::SvrModel(Scaler scaler, TargetScale target, SvrHyperParams hp, std::vector<Feature> support,
                   std::vector<double> coefficients, std::vector<std::size_t> support_indices, double bias,
                   SolverStats stats)
    : scaler_(scaler),
      target_(target),
      hp_(hp),
      support_(std::move(support)),
      coef_(std::move(coefficients)),
      support_index_(std::move(support_indices)),
      bias_(bias),
      stats_(stats) {
    if (support_.size() != coef_.size() || support_.size() != support_index_.size()) {
        throw ShapeMismatch("support vectors, coefficients and indices must have equal length");
    }
}

double SvrModel::decision(const Feature& scaled) const {
    double f = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
        f += coef_[k] * rbf_kernel(support_[k], scaled, hp_.gamma);
    }
    return f + bias_;
}

double SvrModel::predict(double ssr, double t) const {
    return std::max(0.0, target_.to_raw(decision(scaler_.transform(ssr, t))));
}

SvrModel make_svr_model(std::span<const Feature> scaled_inputs, const DualSolution& dual, const Scaler& scaler,
                        const TargetScale& target, const SvrHyperParams& hp) {
    std::vector<Feature> support;
    std::vector<double> coef;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < dual.beta.size(); ++i) {
        if (dual.beta[i] != 0.0) {
            support.push_back(scaled_inputs[i]);
            coef.push_back(dual.beta[i]);
            index.push_back(i);
        }
    }
    return SvrModel(scaler, target, hp, std::move(support), std::move(coef), std::move(index), dual.bias,
                    SolverStats{dual.iterations, dual.kkt_gap, dual.objective});
}

SvrModel fit_svr(std::span<const Sample> samples, const SvrHyperParams& hp, const SolverOptions& options) {
    hp.validate();
    if (samples.size() < 2) {
        throw TooFewSamples(fmt::format("SVR needs at least 2 samples, got {}", samples.size()));
    }
    const Scaler scaler = Scaler::fit(samples);
    const TargetScale target = TargetScale::fit(samples);
    const auto x = scaler.transform(samples);
    std::vector<double> z;
    z.reserve(samples.size());
    for (const Sample& s : samples) {
        z.push_back(target.to_scaled(s.y));
    }
    const KernelMatrix k = rbf_kernel_matrix(x, hp.gamma);
    const DualSolution dual = solve_svr_dual(k, z, hp.c, hp.epsilon, options);
    return make_svr_model(x, dual, scaler, target, hp);
}

} // namespace pvfc
