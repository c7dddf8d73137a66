#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

#include "pvfc/errors.hpp"
#include "pvfc/plant.hpp"
#include "pvfc/weather.hpp"

namespace pvfc {
namespace {

SiteSeries series(Variable v, std::vector<double> values) {
    SiteSeries s;
    s.lat = 42.0;
    s.lon = 12.0;
    s.variable = v;
    s.first_day = parse_date("2012-07-01");
    s.values = std::move(values);
    return s;
}

Plant plain_plant() {
    Plant p;
    p.id = "P1";
    p.lat = 42.0;
    p.lon = 12.0;
    p.capacity_mw = 1.0;
    p.efficiency = 0.15;
    return p;
}

TEST(SimulateProduction, ZeroIrradianceZeroOutput) {
    Plant p = plain_plant();
    p.noise_std = 0.1;
    const auto y = simulate_production(p, series(Variable::ssr, {0.0, 5000.0}), series(Variable::t2m, {20.0, 20.0}), 1);
    EXPECT_EQ(y.mwh[0], 0.0);
    EXPECT_GT(y.mwh[1], 0.0);
}

TEST(SimulateProduction, NoDeratingNoNoiseIsProportional) {
    const Plant p = plain_plant();
    const auto y = simulate_production(p, series(Variable::ssr, {3000.0, 6000.0, 7500.0}),
                                       series(Variable::t2m, {10.0, 25.0, -4.0}), 1);
    EXPECT_DOUBLE_EQ(y.mwh[0], 0.15 * 0.5);
    EXPECT_DOUBLE_EQ(y.mwh[1], 0.15);
    EXPECT_DOUBLE_EQ(y.mwh[2], 0.15 * 1.25);
    EXPECT_EQ(y.plant_id, "P1");
    EXPECT_EQ(y.first_day, parse_date("2012-07-01"));
}

TEST(SimulateProduction, HandEvaluatedDerating) {
    Plant p = plain_plant();
    p.derate_threshold_c = 25.0;
    p.derate_slope = 0.005;
    const auto y = simulate_production(p, series(Variable::ssr, {6000.0}), series(Variable::t2m, {35.0}), 1);
    EXPECT_NEAR(y.mwh[0], 0.1425, 1e-15);
    EXPECT_DOUBLE_EQ(derate_factor(p, 20.0), 1.0);
}

TEST(SimulateProduction, RejectsMisalignedInputs) {
    const Plant p = plain_plant();
    auto t = series(Variable::t2m, {10.0, 11.0});
    t.first_day = parse_date("2012-07-02");
    EXPECT_THROW(simulate_production(p, series(Variable::ssr, {1.0, 2.0}), t, 1), DateMismatch);
    EXPECT_THROW(simulate_production(p, series(Variable::ssr, {1.0, 2.0}), series(Variable::t2m, {1.0}), 1),
                 DateMismatch);
}

TEST(SimulateProduction, NoiseIsSeeded) {
    Plant p = plain_plant();
    p.noise_std = 0.05;
    const auto ssr = series(Variable::ssr, std::vector<double>(50, 5000.0));
    const auto t2m = series(Variable::t2m, std::vector<double>(50, 15.0));
    const auto a = simulate_production(p, ssr, t2m, 7);
    EXPECT_EQ(a.mwh, simulate_production(p, ssr, t2m, 7).mwh);
    EXPECT_NE(a.mwh, simulate_production(p, ssr, t2m, 8).mwh);
    for (double v : a.mwh) {
        EXPECT_GE(v, 0.0);
    }
}

TEST(DefaultFleet, MatchesRegionalTotals) {
    const Fleet f = build_default_fleet(1);
    EXPECT_EQ(f.plants.size(), 65u);
    EXPECT_EQ(f.count(Region::north), 34u);
    EXPECT_EQ(f.count(Region::south), 31u);
    EXPECT_NEAR(f.capacity(Region::north), 127.0, 1e-9);
    EXPECT_NEAR(f.capacity(Region::south), 288.0, 1e-9);
    for (const Plant& p : f.plants) {
        EXPECT_NO_THROW(p.validate());
        EXPECT_GE(p.record_days, 550);
        EXPECT_LE(p.record_days, 731);
        EXPECT_GE(p.lat, 35.0);
        EXPECT_LE(p.lat, 50.0);
    }
}

TEST(DefaultFleet, DeterministicAndSubsetsAlternate) {
    const Fleet a = build_default_fleet(3);
    const Fleet b = build_default_fleet(3);
    ASSERT_EQ(a.plants.size(), b.plants.size());
    for (std::size_t k = 0; k < a.plants.size(); ++k) {
        EXPECT_EQ(a.plants[k].id, b.plants[k].id);
        EXPECT_EQ(a.plants[k].lat, b.plants[k].lat);
        EXPECT_EQ(a.plants[k].derate_slope, b.plants[k].derate_slope);
    }
    const Fleet s = a.subset(8);
    EXPECT_EQ(s.count(Region::north), 4u);
    EXPECT_EQ(s.count(Region::south), 4u);
}

TEST(RegionSplit, BoundaryAt44Deg50Min) {
    EXPECT_EQ(region_of(44.83), Region::south);
    EXPECT_EQ(region_of(44.0 + 50.0 / 60.0), Region::south);
    EXPECT_EQ(region_of(44.84), Region::north);
    EXPECT_EQ(parse_region(to_string(Region::north)), Region::north);
}

TEST(NormalizedProduction, DividesByTopOfAtmospherePotential) {
    const Plant p = plain_plant();
    const Date day = parse_date("2012-06-21");
    const double h0 = clear_sky_insolation(p.lat, day_of_year(day));
    EXPECT_NEAR(normalized_production(p, 0.15 * h0 / 6000.0, day), 1.0, 1e-12);
}

TEST(FleetIo, RoundTripAndMissingColumn) {
    const Fleet f = build_default_fleet(4);
    test::TempDir dir("fleet");
    store_fleet(f, dir / "fleet.csv");
    const Fleet g = load_fleet(dir / "fleet.csv");
    ASSERT_EQ(g.plants.size(), f.plants.size());
    for (std::size_t k = 0; k < f.plants.size(); ++k) {
        EXPECT_EQ(g.plants[k].id, f.plants[k].id);
        EXPECT_EQ(g.plants[k].lon, f.plants[k].lon);
        EXPECT_EQ(g.plants[k].noise_std, f.plants[k].noise_std);
        EXPECT_EQ(g.plants[k].record_days, f.plants[k].record_days);
    }
    test::write_file(dir / "bad.csv", "id,lat,lon\nP1,40,10\n");
    EXPECT_THROW(load_fleet(dir / "bad.csv"), SchemaError);
}

TEST(ProductionIo, RoundTrip) {
    ProductionSeries s{"N01", parse_date("2011-03-04"), {0.0, 1.0 / 3.0, 2.5e-7}};
    test::TempDir dir("production");
    store_production(s, dir / "N01.txt");
    const ProductionSeries r = load_production(dir / "N01.txt");
    EXPECT_EQ(r.plant_id, s.plant_id);
    EXPECT_EQ(r.first_day, s.first_day);
    EXPECT_EQ(r.mwh, s.mwh);
    EXPECT_THROW(load_production(dir / "missing.txt"), MissingInput);
}

} // namespace
} // namespace pvfc
