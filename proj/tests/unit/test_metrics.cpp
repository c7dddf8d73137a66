#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "pvfc/errors.hpp"
#include "pvfc/metrics.hpp"

namespace pvfc {
namespace {

TEST(Mdape, PerfectForecastIsZero) {
    const std::vector<double> y{1.0, 2.0, 3.5};
    EXPECT_DOUBLE_EQ(mdape(y, y), 0.0);
}

TEST(Mdape, UniformTenPercentError) {
    const std::vector<double> y{1.0, 2.0, 3.5, 8.0};
    std::vector<double> p;
    for (double v : y) {
        p.push_back(1.1 * v);
    }
    EXPECT_NEAR(mdape(p, y), 10.0, 1e-12);
}

TEST(Mdape, HandComputedMedian) {
    EXPECT_NEAR(mdape(std::vector<double>{11.0, 19.0, 50.0}, std::vector<double>{10.0, 20.0, 40.0}), 10.0, 1e-12);
}

TEST(Mdape, ScaleInvariant) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.5, 5.0);
    std::vector<double> y(31);
    std::vector<double> p(31);
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] = u(rng);
        p[k] = u(rng);
    }
    std::vector<double> ys = y;
    std::vector<double> ps = p;
    for (std::size_t k = 0; k < y.size(); ++k) {
        ys[k] *= 37.5;
        ps[k] *= 37.5;
    }
    EXPECT_NEAR(mdape(p, y), mdape(ps, ys), 1e-12);
}

TEST(Mdape, FloorExcludesSmallTargets) {
    const std::vector<double> y{0.0, 0.001, 10.0, 20.0};
    const std::vector<double> p{5.0, 1.0, 11.0, 22.0};
    EXPECT_NEAR(mdape(p, y, 0.01), 10.0, 1e-12);
    EXPECT_EQ(absolute_percentage_errors(p, y, 0.01).size(), 2u);
    EXPECT_THROW(mdape(p, y, 100.0), ExcludedAll);
    EXPECT_THROW(mdape(std::vector<double>{1.0}, y), LengthMismatch);
}

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(median(v), 2.5);
    EXPECT_DOUBLE_EQ(interquartile_range(v), 1.5);
}

TEST(Pearson, IdentityAndAntisymmetry) {
    const std::vector<double> a{1.0, 4.0, 2.0, 8.0, 5.0};
    std::vector<double> flipped;
    for (double v : a) {
        flipped.push_back(4.0 - (v - 4.0));
    }
    EXPECT_NEAR(pearson(a, a), 1.0, 1e-15);
    EXPECT_NEAR(pearson(a, flipped), -1.0, 1e-15);
}

TEST(Pearson, MatchesCovarianceFormula) {
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 2.0, 4.0};
    const double mx = 2.0;
    const double my = 7.0 / 3.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (int k = 0; k < 3; ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    EXPECT_NEAR(pearson(x, y), sxy / std::sqrt(sxx * syy), 1e-15);
}

TEST(Pearson, Errors) {
    EXPECT_THROW(pearson(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}), ZeroVariance);
    EXPECT_THROW(pearson(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), LengthMismatch);
}

TEST(Spearman, RanksWithTies) {
    EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 100}), 1.0, 1e-15);
    EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}), -1.0, 1e-15);
    // ranks of {1, 2, 2, 3} are {1, 2.5, 2.5, 4}
    const double r = spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 2, 3});
    EXPECT_NEAR(r, pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2.5, 2.5, 4}), 1e-15);
}

TEST(ComputeMetrics, CombinesAndHandlesConstantPredictions) {
    const std::vector<double> y{10.0, 20.0, 40.0};
    const std::vector<double> p{11.0, 19.0, 50.0};
    const MetricSet m = compute_metrics(p, y);
    EXPECT_NEAR(m.mdape, 10.0, 1e-12);
    EXPECT_EQ(m.n_samples, 3u);
    EXPECT_NEAR(m.iqr, 10.0, 1e-12);
    const MetricSet flat = compute_metrics(std::vector<double>{5.0, 5.0, 5.0}, y);
    EXPECT_TRUE(std::isnan(flat.pearson_r));
    const std::vector<double> floors{15.0, 0.0, 0.0};
    EXPECT_EQ(compute_metrics(p, y, floors).n_samples, 2u);
}

} // namespace
} // namespace pvfc
