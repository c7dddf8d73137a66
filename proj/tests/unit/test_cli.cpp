#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

#include "pvfc/cli.hpp"
#include "pvfc/plot.hpp"

namespace pvfc {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "pvfc");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        ExperimentConfig cfg = test::small_config(1, 2);
        cfg.leads = {1, 2};
        test::write_file(dir_ / "small.cfg", render_config(cfg));
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    test::TempDir dir_{"cli"};
};

TEST_F(CliTest, HelpAndUsageErrors) {
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"no-such-command"}).code, 1);
    EXPECT_EQ(run({"run-experiment", "--seed", "banana", "--out", path("x")}).code, 1);
}

TEST_F(CliTest, SeedIsRequired) {
    const Outcome r = run({"run-experiment", "--config", path("small.cfg"), "--out", path("report")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--seed"), std::string::npos);
}

TEST_F(CliTest, MissingConfigFileNamesPath) {
    const Outcome r = run({"generate-weather", "--seed", "1", "--config", path("absent.cfg"), "--out", path("w")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("absent.cfg"), std::string::npos);
}

TEST_F(CliTest, StagedCommandsAndMissingProduction) {
    const std::string cfg = path("small.cfg");
    ASSERT_EQ(run({"generate-weather", "--config", cfg, "--seed", "3", "--out", path("weather")}).code, 0);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "weather" / "ssr_lead02.txt"));
    ASSERT_EQ(run({"generate-fleet", "--config", cfg, "--seed", "3", "--weather", path("weather"), "--out",
                   path("fleet")})
                  .code,
              0);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "fleet" / "config_echo"));
    const Outcome cal = run({"calibrate", "--config", cfg, "--seed", "3", "--weather", path("weather"), "--fleet",
                             path("fleet/fleet.txt"), "--production", path("fleet/production"), "--out",
                             path("cal")});
    ASSERT_EQ(cal.code, 0) << cal.err;
    EXPECT_TRUE(std::filesystem::exists(dir_ / "cal" / "tables" / "plant_calibration.csv"));
    const Outcome fc = run({"forecast", "--config", cfg, "--weather", path("weather"), "--fleet",
                            path("fleet/fleet.txt"), "--production", path("fleet/production"), "--models",
                            path("cal/models"), "--out", path("fc")});
    ASSERT_EQ(fc.code, 0) << fc.err;
    EXPECT_TRUE(std::filesystem::exists(dir_ / "fc" / "tables" / "plant_forecast.csv"));

    const Outcome bad = run({"calibrate", "--config", cfg, "--seed", "3", "--weather", path("weather"), "--fleet",
                             path("fleet/fleet.txt"), "--production", path("nowhere"), "--out", path("cal2")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("nowhere"), std::string::npos);
    EXPECT_NE(bad.err.find(".txt"), std::string::npos);

    const Outcome lead = run({"forecast", "--config", cfg, "--leads", "7", "--weather", path("weather"), "--fleet",
                              path("fleet/fleet.txt"), "--production", path("fleet/production"), "--models",
                              path("cal/models"), "--out", path("fc2")});
    EXPECT_EQ(lead.code, 1);
}

TEST_F(CliTest, VerifyWeatherPrintsDecreasingCorrelation) {
    const Outcome r = run({"verify-weather", "--config", path("small.cfg"), "--seed", "4", "--leads", "1,5,10"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("ssr,10,"), std::string::npos);
    EXPECT_NE(r.out.find("decreasing with lead: yes"), std::string::npos);
}

TEST_F(CliTest, ExperimentAndPlotsAreDeterministic) {
    const std::string cfg = path("small.cfg");
    ASSERT_EQ(run({"run-experiment", "--config", cfg, "--seed", "6", "--leads", "1,5,10", "--out", path("report"),
                   "--format", "structured"})
                  .code,
              0);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "report" / "report.json"));
    ASSERT_EQ(run({"plot", "--report", path("report"), "--out", path("p1")}).code, 0);
    ASSERT_EQ(run({"plot", "--report", path("report"), "--out", path("p2")}).code, 0);
    for (const auto& id : cli::figure_ids()) {
        const std::string a = test::read_file(dir_ / "p1" / (id + ".svg"));
        EXPECT_FALSE(a.empty()) << id;
        EXPECT_EQ(a.rfind("<svg", 0) == 0 || a.rfind("<?xml", 0) == 0, true) << id;
        EXPECT_EQ(a, test::read_file(dir_ / "p2" / (id + ".svg"))) << id;
    }
    EXPECT_EQ(run({"plot", "--report", path("report"), "--figure", "fig99"}).code, 1);
    EXPECT_EQ(run({"plot", "--report", path("no_report"), "--figure", "fig9"}).code, 1);
    EXPECT_EQ(run({"run-experiment", "--config", cfg, "--seed", "6", "--out", path("r2"), "--format", "xml"}).code, 1);
}

} // namespace
} // namespace pvfc
