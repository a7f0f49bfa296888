#include "aoci/kpi.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "baseline.hpp"
#include "oracles.hpp"

namespace {

using namespace aoci;
using namespace aoci::kpi;
using aoci::testing::baseline_config;

constexpr std::int64_t kSamples = 20000;

LinkConfig noise_only() {
    auto cfg = baseline_config();
    cfg.source.power_tx = 0.0;
    cfg.neural.f0 = 10.0;  // B_bar = 1.5
    cfg.neural.y_th = 5.0;
    return cfg;
}

TEST(Wilson, BracketsTheEstimate) {
    const auto e = wilson(30, 100);
    EXPECT_DOUBLE_EQ(e.value, 0.3);
    EXPECT_LT(e.ci_low, 0.3);
    EXPECT_GT(e.ci_high, 0.3);
    EXPECT_NEAR(e.ci_low, 0.2189, 1e-4);
    EXPECT_NEAR(e.ci_high, 0.3958, 1e-4);
    const auto none = wilson(0, 1000);
    EXPECT_EQ(none.ci_low, 0.0);
    EXPECT_GT(none.ci_high, 0.0);
    EXPECT_THROW((void)wilson(3, 2), DomainError);
}

TEST(Hearing, ZeroThresholdIsCertain) {
    auto cfg = baseline_config();
    cfg.neural.y_th = 0.0;
    EXPECT_EQ(p_hearing(cfg, kSamples, 1).value, 1.0);
}

TEST(Hearing, StrongAlignedSignalIsCertain) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 1e-9;
    cfg.source.power_tx = 1.0;
    const auto e = p_hearing(cfg, kSamples, 1);
    EXPECT_EQ(e.value, 1.0);
    EXPECT_GT(e.ci_low, 0.999);
}

TEST(Hearing, NoiseOnlyPathMatchesPoissonTail) {
    const auto e = p_hearing(noise_only(), 200000, 5);
    const double tail = 1.0 - oracle::poisson_cdf(4, 1.5);
    EXPECT_NEAR(tail, 0.01858, 1e-5);
    EXPECT_LE(e.ci_low, tail);
    EXPECT_GE(e.ci_high, tail);
}

TEST(Hearing, RejectsSmallBudgets) {
    EXPECT_THROW((void)p_hearing(baseline_config(), 9999, 1), DomainError);
}

TEST(Hearing, Reproducible) {
    const auto cfg = baseline_config();
    const auto a = p_hearing(cfg, kSamples, 77);
    const auto b = p_hearing(cfg, kSamples, 77);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.seed, 77u);
    const auto profile = photometry::make_profile(cfg);
    EXPECT_EQ(p_hearing(cfg, kSamples, 77, profile, 1).value, p_hearing(cfg, kSamples, 77, profile, 3).value);
}

TEST(Hearing, MonotoneInPowerAndPointingError) {
    auto cfg = baseline_config();
    const auto profile = photometry::make_profile(cfg);
    double prev = -1.0;
    for (double x : {5e-3, 10e-3, 20e-3, 40e-3, 120e-3}) {
        cfg.source.power_tx = x;
        const double p = p_hearing(cfg, kSamples, 9, profile).value;
        EXPECT_GE(p, prev) << "x = " << x;
        prev = p;
    }
    cfg = baseline_config();
    cfg.beam.sigma_s = 0.5e-3;
    const auto wide = photometry::make_profile(cfg);
    prev = 2.0;
    for (double sigma : {0.02e-3, 0.05e-3, 0.1e-3, 0.2e-3, 0.5e-3}) {
        cfg.beam.sigma_s = sigma;
        const double p = p_hearing(cfg, kSamples, 9, wide).value;
        EXPECT_LE(p, prev) << "sigma = " << sigma;
        prev = p;
    }
}

TEST(Hearing, SignalShotNoiseExtension) {
    auto cfg = noise_only();
    cfg.signal_shot_noise = true;
    const auto e = p_hearing(cfg, 200000, 5);
    const double tail = 1.0 - oracle::poisson_cdf(4, 1.5);
    EXPECT_LE(e.ci_low, tail);
    EXPECT_GE(e.ci_high, tail);
    // With a bright signal the extra variance of the count is negligible.
    auto bright = baseline_config();
    bright.signal_shot_noise = true;
    const double with_noise = p_hearing(bright, kSamples, 3).value;
    bright.signal_shot_noise = false;
    EXPECT_NEAR(with_noise, p_hearing(bright, kSamples, 3).value, 0.01);
}

TEST(FalseHearing, Examples) {
    NeuralParams np{10.0, 0.15, 5.0, 100.0};
    const auto fh = p_false_hearing(np);
    EXPECT_NEAR(fh.literal, 0.01858, 1e-5);
    EXPECT_NEAR(fh.gamma_q_form, 0.99554, 1e-5);
    np.f0 = 0.0;
    EXPECT_EQ(p_false_hearing(np).literal, 0.0);
    np.y_th = 0.0;
    EXPECT_EQ(p_false_hearing(np).literal, 1.0);
}

TEST(FalseHearing, ComplementsTheCdf) {
    for (int y = 1; y <= 200; y += 9) {
        for (double b : {1e-6, 0.3, 1.5, 12.0, 100.0}) {
            NeuralParams np{b / 0.15, 0.15, static_cast<double>(y), 1e9};
            const auto fh = p_false_hearing(np);
            EXPECT_NEAR(fh.literal + oracle::poisson_cdf(y - 1, b), 1.0, 1e-12) << y << " " << b;
            EXPECT_NEAR(fh.gamma_q_form, oracle::poisson_cdf(y, b), 1e-12) << y << " " << b;
        }
    }
}

TEST(FalseHearing, NonIntegerThresholdRoundsUp) {
    NeuralParams a{10.0, 0.15, 4.2, 100.0};
    NeuralParams b{10.0, 0.15, 5.0, 100.0};
    EXPECT_DOUBLE_EQ(p_false_hearing(a).literal, p_false_hearing(b).literal);
}

TEST(Damage, InfiniteThresholdAndDarkness) {
    auto cfg = baseline_config();
    cfg.neural.d_th = std::numeric_limits<double>::infinity();
    EXPECT_EQ(p_damage(cfg, kSamples, 1).value, 0.0);
    EXPECT_EQ(p_damage(noise_only(), kSamples, 1).value, 0.0);
}

TEST(Damage, MonotoneInPowerAndBelowHearing) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 0.05e-3;
    const auto profile = photometry::make_profile(cfg);
    double prev = -1.0;
    for (double x : {1.0, 1.5, 2.0, 3.0, 5.0}) {
        cfg.source.power_tx = x;
        const double d = p_damage(cfg, kSamples, 4, profile).value;
        EXPECT_GE(d, prev) << "x = " << x;
        EXPECT_LE(d, p_hearing(cfg, kSamples, 4, profile).value);
        prev = d;
    }
    EXPECT_GT(prev, 0.5);
}

TEST(Safety, DarkLinkPasses) {
    auto cfg = baseline_config();
    cfg.source.power_tx = 0.0;
    EXPECT_EQ(skin_irradiance(cfg), 0.0);
    EXPECT_EQ(neuron_irradiance(cfg), 0.0);
}

TEST(Safety, IrradianceLinearInPower) {
    auto cfg = baseline_config();
    cfg.source.power_tx = 0.2;
    const double skin = skin_irradiance(cfg);
    const double neuron = neuron_irradiance(cfg);
    // 200 mW over the calibrated skin spot gives about 56 mW/mm^2.
    EXPECT_NEAR(skin, 56e3, 0.5e3);
    cfg.source.power_tx = 0.6;
    EXPECT_NEAR(skin_irradiance(cfg), 3.0 * skin, 1e-9 * skin);
    EXPECT_NEAR(neuron_irradiance(cfg), 3.0 * neuron, 1e-9 * neuron);
}

TEST(Safety, NeuronSpotDefaultsToModeField) {
    auto cfg = baseline_config();
    cfg.neuron_spot_radius = 0.0;
    const double narrow = neuron_irradiance(cfg);
    cfg.neuron_spot_radius = cfg.coupling.omega0;
    EXPECT_DOUBLE_EQ(neuron_irradiance(cfg), narrow);
}

TEST(Safety, VerdictsFollowLimits) {
    auto cfg = baseline_config();
    cfg.source.power_tx = 0.5 * max_safe_power(cfg);
    auto rep = safety_check(cfg);
    EXPECT_TRUE(rep.mpe_skin_ok);
    EXPECT_TRUE(rep.mpe_neuron_ok);
    cfg.source.power_tx = 3.0;
    rep = safety_check(cfg);
    EXPECT_FALSE(rep.mpe_skin_ok);
    EXPECT_FALSE(rep.mpe_neuron_ok);
}

TEST(Safety, VerdictsInvariantUnderUnitRescaling) {
    // The same physical link expressed through different internal scalings of
    // the limits and spot sizes keeps its verdicts.
    auto cfg = baseline_config();
    cfg.source.power_tx = 1.0;
    const auto a = safety_check(cfg);
    cfg.mpe.skin *= 4.0;
    cfg.skin_spot_radius *= 0.5;
    const auto b = safety_check(cfg);
    EXPECT_EQ(a.mpe_skin_ok, b.mpe_skin_ok);
    EXPECT_NEAR(b.skin_irradiance, 4.0 * a.skin_irradiance, 1e-9 * b.skin_irradiance);
}

TEST(Safety, DynamicRangeBracketsTarget) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 0.05e-3;
    const auto profile = photometry::make_profile(cfg);
    const auto dr = dynamic_range(cfg, kSamples, 6, profile);
    ASSERT_FALSE(dr.empty);
    EXPECT_LT(dr.min_power, dr.max_power);
    EXPECT_NEAR(dr.max_power, max_safe_power(cfg), 1e-12 * dr.max_power);
    auto at = cfg;
    at.source.power_tx = dr.min_power;
    EXPECT_GE(p_hearing(at, kSamples, 6, profile).value, cfg.hearing_target);
    at.source.power_tx = dr.min_power * 0.999;
    EXPECT_LT(p_hearing(at, kSamples, 6, profile).value, cfg.hearing_target);
}

TEST(Safety, DynamicRangeEmptyWhenUnreachable) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 1e-3;
    const auto dr = dynamic_range(cfg, kSamples, 6, photometry::make_profile(cfg));
    EXPECT_TRUE(dr.empty);
    EXPECT_TRUE(std::isnan(dr.min_power));
}

TEST(Safety, SkinLimitBindsBeforeDamage) {
    auto cfg = baseline_config();
    cfg.beam.sigma_s = 0.05e-3;
    for (double delta : {4e-3, 6e-3, 8e-3}) {
        cfg.skin.delta = delta;
        cfg.source.power_tx = cfg.mpe.skin * std::numbers::pi * cfg.skin_spot_radius * cfg.skin_spot_radius;
        EXPECT_LT(p_damage(cfg, kSamples, 2).value, 1e-3) << "delta = " << delta;
    }
}

TEST(Report, AssemblesAllIndicators) {
    const auto rep = evaluate(baseline_config(), kSamples, 8);
    EXPECT_GE(rep.p_hearing.value, rep.p_damage.value);
    EXPECT_GE(rep.p_hearing.value, 0.0);
    EXPECT_LE(rep.p_hearing.value, 1.0);
    EXPECT_LT(rep.p_false_hearing.literal, 1e-12);
    EXPECT_GT(rep.safety.skin_irradiance, 0.0);
}

}  // namespace
