#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"

#include "pvfc/errors.hpp"
#include "pvfc/pipeline.hpp"

namespace pvfc {
namespace {

class PipelineTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        cfg_ = new ExperimentConfig(test::small_config(5, 2));
        cfg_->leads = {1, 2, 3};
        weather_ = new WeatherBundle(generate_weather(*cfg_, cfg_->leads));
        fleet_ = new Fleet(build_default_fleet(cfg_->fleet_seed).subset(2));
    }
    static void TearDownTestSuite() {
        delete cfg_;
        delete weather_;
        delete fleet_;
    }

    static CalibrationSettings settings() {
        CalibrationSettings s;
        s.grid = cfg_->grid;
        s.cv = cfg_->cv;
        s.solver = cfg_->solver();
        s.floor_fraction = cfg_->floor_fraction;
        return s;
    }

    static ExperimentConfig* cfg_;
    static WeatherBundle* weather_;
    static Fleet* fleet_;
};

ExperimentConfig* PipelineTest::cfg_ = nullptr;
WeatherBundle* PipelineTest::weather_ = nullptr;
Fleet* PipelineTest::fleet_ = nullptr;

TEST_F(PipelineTest, BundleServesObservationsAndLeads) {
    EXPECT_EQ(weather_->leads(), (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(&weather_->field(Variable::ssr, 0), &weather_->obs.ssr);
    EXPECT_EQ(weather_->field(Variable::t2m, 2).lead_days(), 2);
    EXPECT_THROW(weather_->field(Variable::ssr, 4), MissingLead);
}

TEST_F(PipelineTest, StoreLoadRoundTrip) {
    test::TempDir dir("weather");
    store_weather(*weather_, dir.path(), *cfg_);
    const std::vector<int> leads{2};
    const WeatherBundle back = load_weather(dir.path(), leads);
    EXPECT_EQ(back.obs.ssr, weather_->obs.ssr);
    EXPECT_EQ(back.field(Variable::t2m, 2), weather_->field(Variable::t2m, 2));
    const std::vector<int> missing{5};
    try {
        load_weather(dir.path(), missing);
        FAIL();
    } catch (const MissingInput& e) {
        EXPECT_NE(e.path().find("ssr_lead05.txt"), std::string::npos);
    }
}

TEST_F(PipelineTest, AlignSamplesRequiresCoverage) {
    const Plant& p = fleet_->plants[0];
    const SiteWeather obs = site_weather(*weather_, p, 0);
    ProductionSeries prod = simulate_plant_record(p, obs, 1);
    EXPECT_EQ(align_samples(obs, prod).size(), prod.size());
    prod.first_day = add_days(prod.first_day, 10);
    EXPECT_THROW(align_samples(obs, prod), DateMismatch);
}

TEST_F(PipelineTest, LeadZeroInputsReproduceFitMetrics) {
    const Plant& p = fleet_->plants[0];
    const SiteWeather obs = site_weather(*weather_, p, 0);
    const ProductionSeries prod = simulate_plant_record(p, obs, cfg_->production_seed(p.id));
    const Calibration cal = calibrate_plant(p, obs, prod, settings());
    const std::map<int, SiteWeather> inputs{{0, obs}};
    const std::vector<int> leads{0};
    const auto fc = forecast_plant(cal.svr, cal.linear, inputs, prod, leads, cal.y_floor);
    ASSERT_EQ(fc.size(), 1u);
    EXPECT_EQ(fc[0].svr.mdape, cal.svr_fit.mdape);
    EXPECT_EQ(fc[0].svr.pearson_r, cal.svr_fit.pearson_r);
    EXPECT_EQ(fc[0].linear.mdape, cal.linear_fit.mdape);
}

TEST_F(PipelineTest, CalibrationRejectsForecastInputs) {
    const Plant& p = fleet_->plants[0];
    const SiteWeather obs = site_weather(*weather_, p, 0);
    const ProductionSeries prod = simulate_plant_record(p, obs, 1);
    EXPECT_THROW(calibrate_plant(p, site_weather(*weather_, p, 1), prod, settings()), ValidationError);
}

TEST_F(PipelineTest, MissingLeadIsReported) {
    const Plant& p = fleet_->plants[0];
    const SiteWeather obs = site_weather(*weather_, p, 0);
    const ProductionSeries prod = simulate_plant_record(p, obs, 1);
    const Calibration cal = calibrate_plant(p, obs, prod, settings());
    const std::map<int, SiteWeather> inputs{{1, site_weather(*weather_, p, 1)}};
    const std::vector<int> leads{1, 2};
    EXPECT_THROW(forecast_plant(cal.svr, cal.linear, inputs, prod, leads, cal.y_floor), MissingLead);
}

TEST_F(PipelineTest, CalibrationNeverReadsForecastFields) {
    WeatherBundle poisoned = *weather_;
    for (auto* fields : {&poisoned.ssr_forecast, &poisoned.t2m_forecast}) {
        for (auto& [lead, f] : *fields) {
            std::vector<double> v(f.values().begin(), f.values().end());
            for (double& x : v) {
                x = 3.0 * x + 1000.0;
            }
            f = GridField(f.spec(), f.variable(), f.first_day(), f.n_days(), std::move(v), lead);
        }
    }
    const ExperimentReport clean = run_experiment(*cfg_, weather_, fleet_);
    const ExperimentReport dirty = run_experiment(*cfg_, &poisoned, fleet_);
    ASSERT_EQ(clean.plants.size(), dirty.plants.size());
    for (std::size_t k = 0; k < clean.plants.size(); ++k) {
        const Calibration& a = clean.plants[k].calibration;
        const Calibration& b = dirty.plants[k].calibration;
        EXPECT_EQ(a.hp, b.hp);
        EXPECT_EQ(a.svr_cv.mdape, b.svr_cv.mdape);
        EXPECT_EQ(a.linear_cv.mdape, b.linear_cv.mdape);
        EXPECT_EQ(a.svr.coefficients(), b.svr.coefficients());
        EXPECT_NE(clean.plants[k].forecasts[0].svr.mdape, dirty.plants[k].forecasts[0].svr.mdape);
    }
}

TEST_F(PipelineTest, ExperimentIsDeterministicAndComplete) {
    const ExperimentReport a = run_experiment(*cfg_, weather_, fleet_);
    const ExperimentReport b = run_experiment(*cfg_, weather_, fleet_);
    ASSERT_EQ(a.plants.size(), 2u);
    EXPECT_TRUE(std::is_sorted(a.plants.begin(), a.plants.end(),
                               [](const PlantResult& x, const PlantResult& y) { return x.plant.id < y.plant.id; }));
    for (std::size_t k = 0; k < a.plants.size(); ++k) {
        EXPECT_EQ(a.plants[k].forecasts.size(), 3u);
        EXPECT_EQ(a.plants[k].input_errors.size(), 3u);
        for (std::size_t l = 0; l < 3; ++l) {
            EXPECT_EQ(a.plants[k].forecasts[l].lead, static_cast<int>(l) + 1);
            EXPECT_EQ(a.plants[k].forecasts[l].svr_prediction, b.plants[k].forecasts[l].svr_prediction);
        }
    }
    const FleetSummary s = summarize(a);
    EXPECT_EQ(s.plants, 2u);
    EXPECT_EQ(s.north + s.south, 2u);
    EXPECT_EQ(s.leads.size(), 3u);
}

TEST_F(PipelineTest, ThreadCountDoesNotChangeResults) {
    ExperimentConfig threaded = *cfg_;
    threaded.threads = 3;
    const ExperimentReport a = run_experiment(*cfg_, weather_, fleet_);
    const ExperimentReport b = run_experiment(threaded, weather_, fleet_);
    for (std::size_t k = 0; k < a.plants.size(); ++k) {
        EXPECT_EQ(a.plants[k].calibration.svr_out_of_fold, b.plants[k].calibration.svr_out_of_fold);
        EXPECT_EQ(a.plants[k].forecasts[2].svr_prediction, b.plants[k].forecasts[2].svr_prediction);
    }
}

TEST_F(PipelineTest, SkillTablesCoverLeads) {
    const auto skill = forecast_skill(*weather_, weather_->leads());
    EXPECT_EQ(skill.size(), 6u);
    for (const auto& row : skill) {
        EXPECT_LE(row.q1, row.median);
        EXPECT_LE(row.median, row.q3);
        EXPECT_EQ(row.days, weather_->obs.ssr.n_days());
    }
    const auto bands = latitude_band_mdape(*weather_, weather_->leads());
    EXPECT_EQ(bands.size(), 6u * 3u);
    for (const auto& b : bands) {
        EXPECT_GE(b.lat_lo, 35.0);
        EXPECT_LE(b.lat_hi, 50.0);
        EXPECT_GT(b.n, 0u);
    }
}

TEST(InputError, ZeroForIdenticalInputs) {
    SiteWeather w;
    w.ssr.first_day = parse_date("2012-01-01");
    w.ssr.values = {1000.0, 2000.0, 3000.0};
    w.t2m.first_day = w.ssr.first_day;
    w.t2m.variable = Variable::t2m;
    w.t2m.values = {1.0, 2.0, 3.0};
    const ProductionSeries prod{"X", w.ssr.first_day, {1.0, 1.0, 1.0}};
    const InputError e = input_error(w, w, prod);
    EXPECT_EQ(e.ssr_mdape, 0.0);
    EXPECT_EQ(e.t2m_mae, 0.0);
    SiteWeather f = w;
    f.t2m.values = {2.0, 0.0, 3.5};
    EXPECT_DOUBLE_EQ(input_error(w, f, prod).t2m_mae, 1.0);
}

} // namespace
} // namespace pvfc
