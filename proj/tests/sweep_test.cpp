#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "aoci/csv.hpp"
#include "aoci/figures.hpp"
#include "aoci/svg.hpp"
#include "aoci/sweep.hpp"
#include "baseline.hpp"

namespace {

using aoci::config_io::Json;
namespace sweep = aoci::sweep;

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

sweep::SweepSpec spec_from(const char* text) { return sweep::parse_spec(Json::parse(text)); }

TEST(Csv, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(aoci::csv::field("plain"), "plain");
    EXPECT_EQ(aoci::csv::field("a,b"), "\"a,b\"");
    EXPECT_EQ(aoci::csv::field("say \"hi\""), "\"say \"\"hi\"\"\"");
    aoci::csv::Writer w;
    w.row({"x", "line\nbreak"});
    EXPECT_EQ(w.str(), "x,\"line\nbreak\"\n");
}

TEST(Csv, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
        EXPECT_EQ(std::stod(aoci::csv::number(v)), v);
    }
    EXPECT_EQ(aoci::csv::number(NAN), "nan");
    EXPECT_EQ(aoci::csv::number(-INFINITY), "-inf");
}

TEST(SweepSpec, RangeExpansion) {
    const auto s = spec_from(R"({"metric": "mean_flux", "method": "quadrature",
        "axis1": {"path": "beam.sigma_s_mm", "range": {"from": 0.01, "to": 1, "count": 3, "scale": "log"}}})");
    ASSERT_EQ(s.axis1.values.size(), 3u);
    EXPECT_NEAR(s.axis1.values[1], 0.1, 1e-15);
    EXPECT_FALSE(s.axis2);
}

TEST(SweepSpec, RejectsBadInput) {
    EXPECT_THROW(spec_from(R"({"metric": "mean_flux", "axis1": {"path": "skin.delta_mm", "values": []}})"),
                 aoci::ConfigError);
    EXPECT_THROW(spec_from(R"({"metric": "mean_flux", "axis1": {"path": "skin.delta_mm", "values": [4, 4]}})"),
                 aoci::ConfigError);
    EXPECT_THROW(spec_from(R"({"metric": "nope", "axis1": {"path": "skin.delta_mm", "values": [4]}})"),
                 aoci::ConfigError);
    EXPECT_THROW(spec_from(R"({"metric": "mean_flux", "axis1": {"path": "skin.depth", "values": [4]}})"),
                 aoci::ConfigError);
    EXPECT_THROW(spec_from(R"({"metric": "mean_flux", "extra": 1, "axis1": {"path": "skin.delta_mm", "values": [4]}})"),
                 aoci::ConfigError);
}

TEST(Sweep, CsvShapeAndGridOrder) {
    const auto s = spec_from(R"({"metric": "mean_flux", "method": "quadrature",
        "axis1": {"path": "skin.delta_mm", "values": [4, 6, 8]},
        "axis2": {"path": "source.power_mw", "values": [10, 20]}})");
    const auto base = aoci::testing::baseline_config();
    const auto res = sweep::run(base, s);
    const auto rows = lines(sweep::to_csv(res));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0],
              "config_hash,seed,samples,skin.delta_mm,source.power_mw,metric,value,err_bound,ci_low,ci_high,method,note,"
              "error");
    EXPECT_EQ(rows[1].rfind(aoci::config_io::config_hash(base) + ",", 0), 0u);
    // axis1 varies fastest
    EXPECT_NE(rows[1].find(",4,10,"), std::string::npos);
    EXPECT_NE(rows[2].find(",6,10,"), std::string::npos);
    EXPECT_NE(rows[4].find(",4,20,"), std::string::npos);
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
        if (res.rows[i].v2 == res.rows[i + 1].v2) {
            EXPECT_GT(res.rows[i].value, res.rows[i + 1].value);
        }
    }
    // linear in power
    EXPECT_NEAR(res.rows[3].value / res.rows[0].value, 2.0, 1e-12);
}

TEST(Sweep, InvalidPointIsRecordedNotFatal) {
    const auto s = spec_from(R"({"metric": "mean_flux", "method": "quadrature",
        "axis1": {"path": "skin.delta_mm", "values": [-1, 6]}})");
    const auto res = sweep::run(aoci::testing::baseline_config(), s);
    ASSERT_EQ(res.rows.size(), 2u);
    EXPECT_FALSE(res.rows[0].error.empty());
    EXPECT_TRUE(std::isnan(res.rows[0].value));
    EXPECT_TRUE(res.rows[1].error.empty());
    EXPECT_GT(res.rows[1].value, 0.0);
    EXPECT_FALSE(res.any_numerical_failure());
}

TEST(Sweep, FluxFallsWithPointingError) {
    const auto s = spec_from(R"({"metric": "mean_flux", "method": "series",
        "axis1": {"path": "beam.sigma_s_mm", "range": {"from": 0.01, "to": 1, "count": 9, "scale": "log"}}})");
    const auto res = sweep::run(aoci::testing::baseline_config(), s);
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) EXPECT_GT(res.rows[i].value, res.rows[i + 1].value);
}

TEST(Sweep, MonteCarloRerunsAreByteIdentical) {
    const auto s = spec_from(R"({"metric": ["p_hearing", "p_damage"], "method": "mc", "mc": {"samples": 10000, "seed": 7},
        "axis1": {"path": "source.power_mw", "values": [10, 100]}})");
    const auto base = aoci::testing::baseline_config();
    sweep::Options one;
    one.workers = 1;
    sweep::Options many;
    many.workers = 4;
    const auto a = sweep::to_csv(sweep::run(base, s, one));
    const auto b = sweep::to_csv(sweep::run(base, s, many));
    EXPECT_EQ(a, b);
    const auto res = sweep::run(base, s);
    EXPECT_EQ(res.rows.size(), 4u);
    EXPECT_TRUE(res.rows[0].ci_low.has_value());
    sweep::Options reseeded;
    reseeded.seed = 8;
    EXPECT_NE(sweep::to_csv(sweep::run(base, s, reseeded)), a);
}

TEST(Svg, LinePlotAndHeatmapAreWellFormed) {
    const auto base = aoci::testing::baseline_config();
    const auto lines_spec = spec_from(R"({"metric": "mean_flux", "method": "quadrature",
        "axis1": {"path": "source.power_w", "values": [0.01, 1, 5]},
        "axis2": {"path": "skin.delta_mm", "values": [4, 8]},
        "plot": {"kind": "lines", "log_x": true, "mpe_line": true}})");
    const auto line_svg = sweep::to_svg(sweep::run(base, lines_spec), base);
    EXPECT_EQ(line_svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(line_svg.find("</svg>"), std::string::npos);
    EXPECT_NE(line_svg.find("skin MPE"), std::string::npos);
    EXPECT_NE(line_svg.find("config_hash=" + aoci::config_io::config_hash(base)), std::string::npos);
    EXPECT_NE(line_svg.find("delta_mm=4"), std::string::npos);
    ASSERT_TRUE(sweep::skin_mpe_marker(base, "source.power_w"));
    EXPECT_NEAR(*sweep::skin_mpe_marker(base, "source.power_w"), 500.0 * M_PI * 1.066e-3 * 1.066e-3 * 1e3, 1e-9);
    EXPECT_FALSE(sweep::skin_mpe_marker(base, "skin.delta_mm"));

    const auto heat_spec = spec_from(R"({"metric": "mean_flux", "method": "quadrature",
        "axis1": {"path": "skin.delta_mm", "values": [4, 6, 8]},
        "axis2": {"path": "source.power_mw", "values": [10, 20]},
        "plot": {"kind": "heatmap"}})");
    const auto heat_svg = sweep::to_svg(sweep::run(base, heat_spec), base);
    EXPECT_EQ(heat_svg.rfind("<?xml", 0), 0u);
    std::size_t cells = 0;
    for (std::size_t at = 0; (at = heat_svg.find("<rect", at)) != std::string::npos; ++at) ++cells;
    EXPECT_GE(cells, 6u);
}

TEST(Figures, PresetsLoadAndTrendsHold) {
    for (int n = aoci::figures::kFirst; n <= aoci::figures::kLast; ++n) {
        const auto p = aoci::figures::load_preset(n);
        EXPECT_FALSE(p.sweep.axis1.values.empty()) << n;
        if (n == 8) continue;  // contains the documented 2 W damage conflict
        for (const auto& t : aoci::figures::trend_checks(n, p)) EXPECT_TRUE(t.ok) << n << " " << t.name << " " << t.value;
    }
    EXPECT_THROW(aoci::figures::load_preset(2), aoci::DomainError);
    EXPECT_DOUBLE_EQ(aoci::figures::change_vs_larger(0.5, 1.0), 0.5);
}

}  // namespace
