#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "pvfc/date.hpp"

#include "svr_oracle.hpp"

namespace pvfc::test {

namespace {
std::atomic<int> counter{0};
}

TempDir::TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("pvfc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

ExperimentConfig small_config(std::uint64_t seed, std::size_t plants) {
    ExperimentConfig cfg;
    cfg.apply_seed(seed);
    cfg.weather.grid = GridSpec{35.0, 50.0, 5.0, 20.0, 11, 11};
    cfg.weather.start = parse_date("2012-01-01");
    cfg.weather.end = parse_date("2012-12-31");
    cfg.max_plants = plants;
    cfg.grid = SearchGrid{{1.0, 10.0, 100.0}, {0.01, 0.1}, {0.5, 2.0}};
    cfg.cv.k = 5;
    return cfg;
}

std::vector<Sample> random_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ssr(1000.0, 8000.0);
    std::uniform_real_distribution<double> temp(-5.0, 35.0);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<Sample> out(n);
    for (auto& s : out) {
        s.ssr = ssr(rng);
        s.t = temp(rng);
        const double derate = 1.0 - 0.01 * std::max(0.0, s.t - 15.0);
        s.y = 2.0 * (s.ssr / 6000.0) * derate * (1.0 + noise(rng));
    }
    return out;
}

double svr_kkt_violation(const SvrModel& model, std::span<const Sample> training) {
    const double c = model.hyper_params().c;
    const double eps = model.hyper_params().epsilon;
    std::vector<double> beta(training.size(), 0.0);
    for (std::size_t s = 0; s < model.support_indices().size(); ++s) {
        beta[model.support_indices()[s]] = model.coefficients()[s];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < training.size(); ++i) {
        const Feature x = model.scaler().transform(training[i].ssr, training[i].t);
        const double r = model.target_scale().to_scaled(training[i].y) - model.decision(x);
        const double b = beta[i];
        double v = 0.0;
        if (std::abs(b) < c * (1.0 - 1e-12)) {
            v = std::max(0.0, std::abs(r) - eps);
        } else if (b > 0.0) {
            v = std::max(0.0, eps - r);
        } else {
            v = std::max(0.0, eps + r);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

OracleComparison compare_with_oracle(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(4, 12);
    std::uniform_real_distribution<double> logc(-1.0, 2.0);
    std::uniform_real_distribution<double> eps(0.0, 0.3);
    std::uniform_real_distribution<double> loggamma(-2.0, 2.0);
    OracleComparison out;
    out.n = static_cast<std::size_t>(size(rng));
    out.hp = SvrHyperParams{std::pow(10.0, logc(rng)), eps(rng), std::exp2(loggamma(rng))};
    const auto s = random_samples(out.n, rng());
    const SvrModel model = fit_svr(s, out.hp);

    const Scaler sc = Scaler::fit(s);
    const TargetScale ts = TargetScale::fit(s);
    std::vector<std::array<double, 2>> x;
    Eigen::VectorXd y(static_cast<Eigen::Index>(out.n));
    for (std::size_t i = 0; i < out.n; ++i) {
        x.push_back(sc.transform(s[i].ssr, s[i].t));
        y(static_cast<Eigen::Index>(i)) = ts.to_scaled(s[i].y);
    }
    const auto ref = oracle::solve_projected_gradient(oracle::rbf_gram(x, out.hp.gamma), y, out.hp.c, out.hp.epsilon);
    out.oracle_polished = ref.polished;
    out.objective = model.stats().dual_objective;
    out.oracle_objective = ref.objective;
    out.objective_rel_error = std::abs(out.objective - ref.objective) / std::max(1.0, std::abs(ref.objective));

    auto probe = x;
    for (const auto& extra : random_samples(10, rng())) {
        probe.push_back(sc.transform(extra.ssr, extra.t));
    }
    for (const auto& p : probe) {
        double f = ref.bias;
        for (std::size_t j = 0; j < x.size(); ++j) {
            f += ref.beta(static_cast<Eigen::Index>(j)) * rbf_kernel(x[j], p, out.hp.gamma);
        }
        out.max_prediction_error = std::max(out.max_prediction_error, std::abs(model.decision(p) - f));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace pvfc::test
