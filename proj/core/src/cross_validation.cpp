#include "pvfc/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "pvfc/linear_model.hpp"
#include "pvfc/random.hpp"

namespace pvfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = std::pow(10.0, a + (b - a) * t);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

// Mean of fold metrics; Pearson averages over the folds where it is defined.
MetricSet average(std::span<const MetricSet> folds) {
    MetricSet m;
    double r_sum = 0.0;
    std::size_t r_n = 0;
    for (const MetricSet& f : folds) {
        m.mdape += f.mdape;
        m.iqr += f.iqr;
        m.n_samples += f.n_samples;
        if (std::isfinite(f.pearson_r)) {
            r_sum += f.pearson_r;
            ++r_n;
        }
    }
    const auto k = static_cast<double>(folds.size());
    m.mdape /= k;
    m.iqr /= k;
    m.pearson_r = r_n > 0 ? r_sum / static_cast<double>(r_n) : std::numeric_limits<double>::quiet_NaN();
    return m;
}

struct FoldSplit {
    std::vector<Sample> train;
    std::vector<Sample> test;
    std::vector<std::size_t> test_index;
};

// Folds are drawn over the samples in canonical (ssr, t, y) order, so the
// partition and every training set depend on the sample values and the seed
// but not on the order in which the samples were supplied.
std::vector<FoldSplit> split(std::span<const Sample> samples, const CvConfig& cv) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&samples](std::size_t a, std::size_t b) {
        const Sample& x = samples[a];
        const Sample& y = samples[b];
        return std::tie(x.ssr, x.t, x.y) < std::tie(y.ssr, y.t, y.y);
    });
    const auto folds = make_folds(samples.size(), cv);
    std::vector<std::size_t> owner(samples.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (std::size_t pos : folds[f]) {
            owner[pos] = f;
        }
    }
    std::vector<FoldSplit> out(folds.size());
    for (std::size_t pos = 0; pos < samples.size(); ++pos) {
        const std::size_t i = order[pos];
        for (std::size_t f = 0; f < folds.size(); ++f) {
            if (owner[pos] == f) {
                out[f].test.push_back(samples[i]);
                out[f].test_index.push_back(i);
            } else {
                out[f].train.push_back(samples[i]);
            }
        }
    }
    return out;
}

} // namespace

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, const CvConfig& cv) {
    if (cv.k < 2) {
        throw ValidationError(fmt::format("cross-validation needs k >= 2, got {}", cv.k));
    }
    if (n < cv.k) {
        throw TooFewSamples(fmt::format("{} samples cannot fill {} folds", n, cv.k));
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(cv.seed, "folds"));
    // Fisher-Yates with an explicit modulo draw so the permutation does not
    // depend on the standard library's distribution implementation.
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    std::vector<std::vector<std::size_t>> folds(cv.k);
    const std::size_t base = n / cv.k;
    const std::size_t extra = n % cv.k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < cv.k; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                        perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(folds[f].begin(), folds[f].end());
        pos += len;
    }
    return folds;
}

ModelSpec svr_model_spec(const SvrHyperParams& hp, const SolverOptions& options) {
    return [hp, options](std::span<const Sample> train) -> Predictor {
        auto model = std::make_shared<const SvrModel>(fit_svr(train, hp, options));
        return [model](const Sample& s) { return model->predict(s.ssr, s.t); };
    };
}

ModelSpec linear_model_spec() {
    return [](std::span<const Sample> train) -> Predictor {
        const LinearModel model = fit_ols(train);
        return [model](const Sample& s) { return model.predict(s.ssr, s.t); };
    };
}

CvResult kfold_cv(std::span<const Sample> samples, const ModelSpec& spec, const CvConfig& cv, double y_floor) {
    const auto splits = split(samples, cv);
    CvResult out;
    out.out_of_fold.assign(samples.size(), 0.0);
    for (const FoldSplit& fold : splits) {
        const Predictor predict = spec(fold.train);
        std::vector<double> pred;
        std::vector<double> truth;
        for (std::size_t k = 0; k < fold.test.size(); ++k) {
            const double p = predict(fold.test[k]);
            pred.push_back(p);
            truth.push_back(fold.test[k].y);
            out.out_of_fold[fold.test_index[k]] = p;
        }
        out.folds.push_back(compute_metrics(pred, truth, y_floor));
    }
    out.metrics = average(out.folds);
    return out;
}

SearchGrid SearchGrid::standard() {
    return SearchGrid{log_space(1e-2, 1e2, 5), log_space(1e-2, 1.0, 3), log_space(0.25, 4.0, 5)};
}

SvrHyperParams SearchGrid::at(std::size_t index) const {
    if (index >= size()) {
        throw OutOfRange(fmt::format("grid index {} outside 0..{}", index, size()));
    }
    const std::size_t gi = index % gamma.size();
    const std::size_t ei = (index / gamma.size()) % epsilon.size();
    const std::size_t ci = index / (gamma.size() * epsilon.size());
    return SvrHyperParams{c[ci], epsilon[ei], gamma[gi]};
}

void SearchGrid::validate() const {
    if (c.empty() || epsilon.empty() || gamma.empty()) {
        throw ValidationError("search grid must have at least one value per hyperparameter");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        at(i).validate();
    }
}

std::size_t select_best(std::span<const GridSearchRow> table) {
    if (table.empty()) {
        throw ValidationError("cannot select from an empty grid-search table");
    }
    auto better = [](const GridSearchRow& a, const GridSearchRow& b) {
        if (a.metrics.mdape != b.metrics.mdape) {
            return a.metrics.mdape < b.metrics.mdape;
        }
        if (a.hp.c != b.hp.c) {
            return a.hp.c < b.hp.c;
        }
        if (a.hp.gamma != b.hp.gamma) {
            return a.hp.gamma < b.hp.gamma;
        }
        return a.hp.epsilon > b.hp.epsilon;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.size(); ++i) {
        if (better(table[i], table[best])) {
            best = i;
        }
    }
    return best;
}

GridSearchResult grid_search(std::span<const Sample> samples, const SearchGrid& grid, const CvConfig& cv,
                             double y_floor, const SolverOptions& options) {
    grid.validate();
    const auto splits = split(samples, cv);
    const std::size_t n_combo = grid.size();
    std::vector<std::vector<MetricSet>> fold_metrics(n_combo);
    std::vector<std::string> errors(n_combo);
    // Each C starts from the solution at the next smaller C, scaled up.
    std::vector<std::size_t> c_order(grid.c.size());
    std::iota(c_order.begin(), c_order.end(), std::size_t{0});
    std::sort(c_order.begin(), c_order.end(), [&grid](std::size_t a, std::size_t b) { return grid.c[a] < grid.c[b]; });

    for (const FoldSplit& fold : splits) {
        const Scaler scaler = Scaler::fit(fold.train);
        const TargetScale target = TargetScale::fit(fold.train);
        const auto x = scaler.transform(fold.train);
        std::vector<double> z;
        z.reserve(fold.train.size());
        for (const Sample& s : fold.train) {
            z.push_back(target.to_scaled(s.y));
        }
        std::vector<double> truth;
        for (const Sample& s : fold.test) {
            truth.push_back(s.y);
        }
        for (std::size_t gi = 0; gi < grid.gamma.size(); ++gi) {
            const KernelMatrix k = rbf_kernel_matrix(x, grid.gamma[gi]);
            for (std::size_t ei = 0; ei < grid.epsilon.size(); ++ei) {
                std::vector<double> start;
                double start_c = 0.0;
                for (std::size_t ci : c_order) {
                    const std::size_t index = (ci * grid.epsilon.size() + ei) * grid.gamma.size() + gi;
                    if (!errors[index].empty()) {
                        start.clear();
                        continue;
                    }
                    const SvrHyperParams hp = grid.at(index);
                    for (double& b : start) {
                        b = std::clamp(b * (hp.c / start_c), -hp.c, hp.c);
                    }
                    try {
                        const DualSolution dual = solve_svr_dual(k, z, hp.c, hp.epsilon, options, start);
                        start = dual.beta;
                        start_c = hp.c;
                        const SvrModel model = make_svr_model(x, dual, scaler, target, hp);
                        std::vector<double> pred;
                        pred.reserve(fold.test.size());
                        for (const Sample& s : fold.test) {
                            pred.push_back(model.predict(s.ssr, s.t));
                        }
                        fold_metrics[index].push_back(compute_metrics(pred, truth, y_floor));
                    } catch (const Error& e) {
                        errors[index] = e.what();
                        start.clear();
                    }
                }
            }
        }
    }

    GridSearchResult out;
    out.table.reserve(n_combo);
    for (std::size_t index = 0; index < n_combo; ++index) {
        GridSearchRow row;
        row.index = index;
        row.hp = grid.at(index);
        if (errors[index].empty()) {
            row.metrics = average(fold_metrics[index]);
        } else {
            row.ok = false;
            row.error = errors[index];
            row.metrics.mdape = kInf;
            row.metrics.iqr = kInf;
            row.metrics.pearson_r = std::numeric_limits<double>::quiet_NaN();
        }
        out.table.push_back(std::move(row));
    }
    out.best_index = select_best(out.table);
    out.best = out.table[out.best_index].hp;
    out.best_metrics = out.table[out.best_index].metrics;
    return out;
}

} // namespace pvfc
