#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "aoci/config_io.hpp"
#include "baseline.hpp"

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("aoci_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    static int run(const std::string& binary, const std::string& args, std::string* out = nullptr) {
        const std::string capture = (fs::temp_directory_path() / ("aoci_cli_out_" + std::to_string(::getpid()))).string();
        const int status = std::system((binary + " " + args + " > " + capture + " 2>&1").c_str());
        if (out) *out = read(capture);
        fs::remove(capture);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string read(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }

    std::string config_with(const char* path, double value) const {
        auto cfg = aoci::testing::baseline_config();
        aoci::config_io::set_parameter(cfg, path, value);
        return write("config.json", aoci::config_io::serialize(cfg));
    }

    fs::path dir_;
    const std::string cli_ = AOCI_CLI;
};

TEST_F(Cli, EvalPrintsReportAndIsDeterministic) {
    const std::string cfg = write("config.json", aoci::config_io::serialize(aoci::testing::baseline_config()));
    std::string first;
    std::string second;
    ASSERT_EQ(run(cli_, "eval --config " + cfg + " --method mc --samples 50000 --seed 42", &first), 0) << first;
    ASSERT_EQ(run(cli_, "eval --config " + cfg + " --method mc --samples 50000 --seed 42", &second), 0);
    EXPECT_EQ(first, second);
    for (const char* key : {"h_l", "w_delta", "upsilon", "w_eq", "A0", "G_c", "k ", "monte_carlo", "link budget",
                            "P_hearing", "P_damage", "P_false_hearing", "dynamic range", "config_hash"}) {
        EXPECT_NE(first.find(key), std::string::npos) << key;
    }
}

TEST_F(Cli, EvalWritesCsvWithProvenance) {
    const std::string cfg = write("config.json", aoci::config_io::serialize(aoci::testing::baseline_config()));
    ASSERT_EQ(run(cli_, "eval --config " + cfg + " --seed 9 --out " + (dir_ / "o").string()), 0);
    const std::string csv = read(dir_ / "o" / "eval.csv");
    EXPECT_EQ(csv.rfind("config_hash,seed,quantity", 0), 0u);
    EXPECT_NE(csv.find(aoci::config_io::config_hash(aoci::testing::baseline_config()) + ",9,mean_flux,"),
              std::string::npos);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    std::string out;
    EXPECT_EQ(run(cli_, "eval --config " + (dir_ / "missing.json").string(), &out), 2);
    auto doc = aoci::config_io::to_json(aoci::testing::baseline_config());
    doc["skin"].erase("delta_m");
    doc["skin"]["delta_mm"] = -1;
    const std::string bad = write("bad.json", doc.dump());
    EXPECT_EQ(run(cli_, "eval --config " + bad, &out), 2);
    EXPECT_NE(out.find("skin.delta"), std::string::npos) << out;
    EXPECT_EQ(run(cli_, "eval --config " + bad + " --method bogus"), 2);
    EXPECT_EQ(run(cli_, "frobnicate"), 2);
}

TEST_F(Cli, EmptySweepAxisExitsTwo) {
    const std::string cfg = write("config.json", aoci::config_io::serialize(aoci::testing::baseline_config()));
    const std::string spec = write("s.json", R"({"metric": "mean_flux", "axis1": {"path": "skin.delta_mm", "values": []}})");
    EXPECT_EQ(run(cli_, "sweep " + spec + " --config " + cfg + " --out " + dir_.string()), 2);
}

TEST_F(Cli, SweepWritesCsvAndSvg) {
    const std::string cfg = write("config.json", aoci::config_io::serialize(aoci::testing::baseline_config()));
    const std::string spec = write("sigma.json", R"({"metric": "mean_flux", "method": "series",
        "axis1": {"path": "beam.sigma_s_mm", "range": {"from": 0.01, "to": 1, "count": 5, "scale": "log"}},
        "plot": {"log_x": true, "log_y": true}})");
    ASSERT_EQ(run(cli_, "sweep " + spec + " --config " + cfg + " --svg --out " + dir_.string()), 0);
    const std::string csv = read(dir_ / "sigma.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_NE(read(dir_ / "sigma.svg").find("</svg>"), std::string::npos);
}

TEST_F(Cli, StrictSeriesFailureExitsThree) {
    const std::string cfg = config_with("beam.sigma_s_mm", 5.0);
    std::string out;
    EXPECT_EQ(run(cli_, "eval --config " + cfg + " --method series --strict", &out), 3);
    EXPECT_NE(out.find("quadrature"), std::string::npos) << out;
    EXPECT_EQ(run(cli_, "eval --config " + cfg + " --method series", &out), 0);
    EXPECT_NE(out.find("note: series failed"), std::string::npos) << out;
}

TEST_F(Cli, FigureWritesBothFilesAndTrends) {
    std::string out;
    ASSERT_EQ(run(cli_, "figure 5 --out " + dir_.string(), &out), 0);
    EXPECT_TRUE(fs::exists(dir_ / "fig5.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "fig5.svg"));
    EXPECT_NE(out.find("trend checks for figure 5"), std::string::npos);
    EXPECT_EQ(run(cli_, "figure 9"), 2);
}

TEST_F(Cli, QuickValidationPasses) {
    std::string out;
    EXPECT_EQ(run(cli_, "validate --quick", &out), 0) << out;
    EXPECT_NE(out.find("validation passed"), std::string::npos);
}

TEST_F(Cli, PerturbedBuildFailsValidation) {
    std::string out;
    EXPECT_EQ(run(AOCI_CLI_PERTURBED, "validate --quick", &out), 1) << out;
    EXPECT_NE(out.find("[FAIL] criterion 1"), std::string::npos) << out;
}

}  // namespace
