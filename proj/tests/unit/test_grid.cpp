#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

#include "pvfc/errors.hpp"
#include "pvfc/grid.hpp"
#include "pvfc/grid_io.hpp"
#include "pvfc/weather.hpp"

namespace pvfc {
namespace {

const Date kDay0 = parse_date("2011-06-01");

GridField make_field(GridSpec spec, std::size_t days, std::vector<double> values, Variable v = Variable::ssr) {
    return GridField(spec, v, kDay0, days, std::move(values));
}

TEST(BilinearInterpolate, ConstantField) {
    const auto f = make_field({40.0, 41.0, 10.0, 11.0, 2, 2}, 1, {5.0, 5.0, 5.0, 5.0});
    EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 40.3, 10.8).values[0], 5.0);
}

TEST(BilinearInterpolate, NodeIdentity) {
    const auto f = make_field({40.0, 42.0, 10.0, 13.0, 3, 4}, 1,
                              {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const auto s = bilinear_interpolate(f, f.spec().lat_at(i), f.spec().lon_at(j));
            EXPECT_EQ(s.values[0], f.at(0, i, j));
        }
    }
}

TEST(BilinearInterpolate, CellCenterIsCornerMean) {
    const auto f = make_field({0.0, 1.0, 0.0, 1.0, 2, 2}, 1, {0.0, 1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(bilinear_interpolate(f, 0.5, 0.5).values[0], 1.5);
}

TEST(BilinearInterpolate, ReproducesBilinearFunctionsExactly) {
    const GridSpec spec{35.0, 50.0, 5.0, 20.0, 16, 16};
    auto truth = [](double lat, double lon) { return 3.0 + 0.7 * lat - 1.3 * lon + 0.05 * lat * lon; };
    std::vector<double> v;
    for (std::size_t i = 0; i < spec.n_lat; ++i) {
        for (std::size_t j = 0; j < spec.n_lon; ++j) {
            v.push_back(truth(spec.lat_at(i), spec.lon_at(j)));
        }
    }
    const auto f = make_field(spec, 1, v);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lat(35.0, 50.0);
    std::uniform_real_distribution<double> lon(5.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = lat(rng);
        const double b = lon(rng);
        const double want = truth(a, b);
        EXPECT_NEAR(bilinear_interpolate(f, a, b).values[0], want, 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST(BilinearInterpolate, CarriesDatesAndRejectsOutside) {
    const auto f = make_field({40.0, 41.0, 10.0, 11.0, 2, 2}, 3, std::vector<double>(12, 1.0));
    const auto s = bilinear_interpolate(f, 40.5, 10.5);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.first_day, kDay0);
    EXPECT_THROW(bilinear_interpolate(f, 41.5, 10.5), OutOfDomain);
    EXPECT_THROW(bilinear_interpolate(f, 40.5, 9.0), OutOfDomain);
}

TEST(CoefficientOfVariation, HandValues) {
    const GridSpec spec{40.0, 41.0, 10.0, 11.0, 2, 2};
    const auto f = make_field(spec, 2, {1.0, 7.0, 7.0, 7.0, 3.0, 7.0, 7.0, 7.0});
    const CellMap cv = coefficient_of_variation(f);
    EXPECT_DOUBLE_EQ(cv.at(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(cv.at(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(cv.at(1, 1), 0.0);
}

TEST(CoefficientOfVariation, ScaleInvariant) {
    const GridSpec spec{40.0, 41.0, 10.0, 11.0, 2, 2};
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 2.5, 1.0, 6.0, 4.5, 3.0, 3.0, 1.0, 4.0};
    std::vector<double> b = a;
    for (double& x : b) {
        x *= 7.5;
    }
    const auto ca = coefficient_of_variation(make_field(spec, 3, a));
    const auto cb = coefficient_of_variation(make_field(spec, 3, b));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(ca.values[k], cb.values[k], 1e-14);
    }
}

TEST(CoefficientOfVariation, NorthMoreVariableThanSouth) {
    WeatherGenConfig cfg;
    cfg.seed = 31;
    cfg.grid = GridSpec{35.0, 50.0, 5.0, 20.0, 16, 16};
    const auto obs = generate_observations(cfg);
    const CellMap cv = coefficient_of_variation(obs.ssr);
    double north = 0.0;
    double south = 0.0;
    int nn = 0;
    int ns = 0;
    for (std::size_t i = 0; i < cfg.grid.n_lat; ++i) {
        for (std::size_t j = 0; j < cfg.grid.n_lon; ++j) {
            if (cfg.grid.lat_at(i) >= 42.5) {
                north += cv.at(i, j);
                ++nn;
            } else {
                south += cv.at(i, j);
                ++ns;
            }
        }
    }
    EXPECT_GT(north / nn, south / ns);
}

TEST(CoefficientOfVariation, RejectsZeroMeanCell) {
    const auto f = make_field({40.0, 41.0, 10.0, 11.0, 2, 2}, 1, {0.0, 1.0, 1.0, 1.0});
    EXPECT_THROW(coefficient_of_variation(f), DegenerateCell);
}

TEST(SpatialCorrelation, HandValues) {
    const GridSpec spec{40.0, 41.0, 10.0, 11.0, 2, 2};
    const auto a = make_field(spec, 1, {1.0, 2.0, 3.0, 4.0});
    const auto b = make_field(spec, 1, {2.0, 4.0, 6.0, 8.0});
    const auto flipped = make_field(spec, 1, {4.0, 3.0, 2.0, 1.0});
    EXPECT_NEAR(spatial_correlation(a, a, kDay0), 1.0, 1e-15);
    EXPECT_NEAR(spatial_correlation(a, b, kDay0), 1.0, 1e-15);
    EXPECT_NEAR(spatial_correlation(a, flipped, kDay0), -1.0, 1e-15);
}

TEST(SpatialCorrelation, SymmetricAndAffineInvariant) {
    const GridSpec spec{40.0, 42.0, 10.0, 12.0, 3, 3};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> va(9);
    std::vector<double> vb(9);
    for (std::size_t k = 0; k < 9; ++k) {
        va[k] = 10.0 + g(rng);
        vb[k] = va[k] + g(rng);
    }
    std::vector<double> vc = vb;
    for (double& x : vc) {
        x = 3.0 * x + 100.0;
    }
    const auto a = make_field(spec, 1, va);
    const auto b = make_field(spec, 1, vb);
    const auto c = make_field(spec, 1, vc);
    EXPECT_NEAR(spatial_correlation(a, b, kDay0), spatial_correlation(b, a, kDay0), 1e-15);
    EXPECT_NEAR(spatial_correlation(a, b, kDay0), spatial_correlation(a, c, kDay0), 1e-12);
}

TEST(SpatialCorrelation, ErrorCases) {
    const GridSpec spec{40.0, 41.0, 10.0, 11.0, 2, 2};
    const auto a = make_field(spec, 1, {1.0, 2.0, 3.0, 4.0});
    const auto flat = make_field(spec, 1, {2.0, 2.0, 2.0, 2.0});
    const auto other = make_field({40.0, 42.0, 10.0, 11.0, 3, 2}, 1, std::vector<double>(6, 1.0));
    EXPECT_THROW(spatial_correlation(a, flat, kDay0), ZeroVariance);
    EXPECT_THROW(spatial_correlation(a, other, kDay0), ShapeMismatch);
}

TEST(GridIo, RoundTripIsExact) {
    WeatherGenConfig cfg;
    cfg.seed = 4;
    cfg.grid = GridSpec{35.0, 50.0, 5.0, 20.0, 6, 5};
    cfg.end = parse_date("2011-01-20");
    const auto obs = generate_observations(cfg);
    test::TempDir dir("grid_io");
    store_field(obs.t2m, dir / "t2m.txt");
    EXPECT_EQ(load_field(dir / "t2m.txt"), obs.t2m);
}

TEST(GridIo, HandWrittenFile) {
    std::istringstream in(
        "variable,lead_days,lat_min,lat_max,lon_min,lon_max,n_lat,n_lon\n"
        "t2m,3,40,41,10,12,2,2\n"
        "date,i_lat,i_lon,value\n"
        "2011-06-01,0,0,1.5\n2011-06-01,0,1,2.5\n2011-06-01,1,0,3.5\n2011-06-01,1,1,4.5\n"
        "2011-06-02,0,0,-1\n2011-06-02,0,1,-2\n2011-06-02,1,0,-3\n2011-06-02,1,1,-4\n");
    const GridField f = read_field(in);
    EXPECT_EQ(f.variable(), Variable::t2m);
    EXPECT_EQ(f.lead_days(), 3);
    EXPECT_EQ(f.n_days(), 2u);
    EXPECT_EQ(f.first_day(), kDay0);
    EXPECT_DOUBLE_EQ(f.spec().lon_step(), 2.0);
    const std::vector<double> want{1.5, 2.5, 3.5, 4.5, -1.0, -2.0, -3.0, -4.0};
    EXPECT_EQ(std::vector<double>(f.values().begin(), f.values().end()), want);
}

TEST(GridIo, MissingRowIsParseError) {
    std::istringstream in(
        "variable,lead_days,lat_min,lat_max,lon_min,lon_max,n_lat,n_lon\n"
        "ssr,0,40,41,10,11,2,2\n"
        "date,i_lat,i_lon,value\n"
        "2011-06-01,0,0,1\n2011-06-01,0,1,2\n2011-06-01,1,1,4\n");
    EXPECT_THROW(read_field(in), ParseError);
}

TEST(GridIo, MissingColumnIsSchemaError) {
    std::istringstream in(
        "variable,lead_days,lat_min,lat_max,lon_min,lon_max,n_lat,n_lon\n"
        "ssr,0,40,41,10,11,2,2\n"
        "date,i_lat,value\n");
    EXPECT_THROW(read_field(in), SchemaError);
}

TEST(GridIo, MissingFileIsMissingInput) {
    EXPECT_THROW(load_field("/nonexistent/ssr_lead00.txt"), MissingInput);
}

} // namespace
} // namespace pvfc
