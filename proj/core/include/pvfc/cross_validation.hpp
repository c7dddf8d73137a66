#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pvfc/metrics.hpp"
#include "pvfc/sample.hpp"
#include "pvfc/svr.hpp"

namespace pvfc {

struct CvConfig {
    std::size_t k = 10;
    std::uint64_t seed = 0;
};

/// Seeded permutation of 0..n-1 cut into k contiguous chunks whose sizes
/// differ by at most one. Depends only on (n, k, seed). Each fold is sorted.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, const CvConfig& cv);

using Predictor = std::function<double(const Sample&)>;
/// Trains on the given samples and returns a predictor.
using ModelSpec = std::function<Predictor(std::span<const Sample>)>;

ModelSpec svr_model_spec(const SvrHyperParams& hp, const SolverOptions& options = {});
ModelSpec linear_model_spec();

struct CvResult {
    MetricSet metrics;  ///< mean of the per-fold metrics; n_samples is the total
    std::vector<MetricSet> folds;
    std::vector<double> out_of_fold;  ///< prediction for each sample from the fold that held it out
};

/// k-fold cross-validation. Folds are assigned by make_folds over the samples
/// sorted by (ssr, t, y), so the result does not depend on input order.
/// Throws TooFewSamples when n < k.
CvResult kfold_cv(std::span<const Sample> samples, const ModelSpec& spec, const CvConfig& cv, double y_floor = 0.0);

struct SearchGrid {
    std::vector<double> c;
    std::vector<double> epsilon;
    std::vector<double> gamma;

    /// 5 log-spaced C in [1e-2, 1e2] x 3 log-spaced eps in [1e-2, 1] x 5
    /// log-spaced gamma in [2^-2, 2^2] = 75 combinations.
    static SearchGrid standard();

    std::size_t size() const { return c.size() * epsilon.size() * gamma.size(); }
    /// Combination `index` in C-major, then epsilon, then gamma order.
    SvrHyperParams at(std::size_t index) const;
    void validate() const;
};

struct GridSearchRow {
    std::size_t index = 0;
    SvrHyperParams hp;
    MetricSet metrics;  ///< mdape = +inf when any fold failed
    bool ok = true;
    std::string error;
};

struct GridSearchResult {
    SvrHyperParams best;
    MetricSet best_metrics;
    std::size_t best_index = 0;
    std::vector<GridSearchRow> table;
};

/// Row minimizing CV MdAPE; ties go to smaller C, then smaller gamma, then
/// larger epsilon.
std::size_t select_best(std::span<const GridSearchRow> table);

/// Scores every grid combination with k-fold CV (same folds and metrics as
/// kfold_cv with svr_model_spec). A failing combination scores +inf.
GridSearchResult grid_search(std::span<const Sample> samples, const SearchGrid& grid, const CvConfig& cv,
                             double y_floor = 0.0, const SolverOptions& options = {});

} // namespace pvfc
