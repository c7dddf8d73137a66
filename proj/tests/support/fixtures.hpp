#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pvfc/config.hpp"
#include "pvfc/sample.hpp"
#include "pvfc/svr.hpp"

namespace pvfc::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Coarse grid, one year of weather, a 3x2x2 search grid and 5 folds: a full
/// experiment on a handful of plants runs in seconds.
ExperimentConfig small_config(std::uint64_t seed, std::size_t plants = 2);

/// Samples with ssr in [1000, 8000], t in [-5, 35] and a mildly nonlinear,
/// noisy target.
std::vector<Sample> random_samples(std::size_t n, std::uint64_t seed);

/// Largest violation of the SVR optimality conditions over the training
/// set, in scaled target units: points strictly inside the box lie within
/// the tube, points at +-C lie on the matching side of it.
double svr_kkt_violation(const SvrModel& model, std::span<const Sample> training);

struct OracleComparison {
    std::size_t n = 0;
    SvrHyperParams hp;
    double objective = 0.0;
    double oracle_objective = 0.0;
    double objective_rel_error = 0.0;
    double max_prediction_error = 0.0;  ///< scaled target units, training and fresh points
    bool oracle_polished = false;
};

/// Draws a random instance (4..12 samples, random C, eps, gamma) from
/// `seed`, fits it with fit_svr and solves the same scaled dual with the
/// reference oracle.
OracleComparison compare_with_oracle(std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace pvfc::test
