#pragma once

#include <span>
#include <vector>

#include "pvfc/sample.hpp"
#include "pvfc/svr_solver.hpp"

namespace pvfc {

struct SvrHyperParams {
    double c = 1.0;
    double epsilon = 0.1;
    double gamma = 1.0;

    void validate() const;
    bool operator==(const SvrHyperParams&) const = default;
};

/// Affine map of the production target to the space the dual is solved in:
/// z = (y - mean) / scale.
struct TargetScale {
    double mean = 0.0;
    double scale = 1.0;

    static TargetScale fit(std::span<const Sample> samples);
    double to_scaled(double y) const { return (y - mean) / scale; }
    double to_raw(double z) const { return mean + scale * z; }
};

struct SolverStats {
    std::size_t iterations = 0;
    double kkt_gap = 0.0;
    double dual_objective = 0.0;
};

/// Trained epsilon-SVR: f(x) = sum_i beta_i K(x_i, x) + b in scaled
/// feature/target space. Only points with non-zero beta are kept.
class SvrModel {
public:
    SvrModel() = default;
    SvrModel(Scaler scaler, TargetScale target, SvrHyperParams hp, std::vector<Feature> support,
             std::vector<double> coefficients, std::vector<std::size_t> support_indices, double bias,
             SolverStats stats = {});

    /// Kernel expansion at an already-scaled input, in scaled target units.
    double decision(const Feature& scaled) const;
    /// Production forecast in MWh/day, clipped at 0.
    double predict(double ssr, double t) const;

    const Scaler& scaler() const noexcept { return scaler_; }
    const TargetScale& target_scale() const noexcept { return target_; }
    const SvrHyperParams& hyper_params() const noexcept { return hp_; }
    const std::vector<Feature>& support_vectors() const noexcept { return support_; }
    const std::vector<double>& coefficients() const noexcept { return coef_; }
    /// Position of each support vector in the training set.
    const std::vector<std::size_t>& support_indices() const noexcept { return support_index_; }
    double bias() const noexcept { return bias_; }
    const SolverStats& stats() const noexcept { return stats_; }

private:
    Scaler scaler_;
    TargetScale target_;
    SvrHyperParams hp_;
    std::vector<Feature> support_;
    std::vector<double> coef_;
    std::vector<std::size_t> support_index_;
    double bias_ = 0.0;
    SolverStats stats_;
};

/// Standardizes features and target on `samples`, solves the dual and keeps
/// the non-zero coefficients. Throws NotConverged, TooFewSamples,
/// DegenerateFeature.
SvrModel fit_svr(std::span<const Sample> samples, const SvrHyperParams& hp, const SolverOptions& options = {});

/// Assembles a model from a dual solution computed on `samples` with the
/// given scalers; shared by fit_svr and the grid search.
SvrModel make_svr_model(std::span<const Feature> scaled_inputs, const DualSolution& dual, const Scaler& scaler,
                        const TargetScale& target, const SvrHyperParams& hp);

} // namespace pvfc
